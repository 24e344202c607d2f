//! Classify node sets by their A -> 0 (flat kernel) behavior.
//!
//! The limit depends on two Vandermonde-type matrices: P (plain polynomial
//! interpolation) and Q (the collocation functionals applied to
//! polynomials). Four cases arise from which of them are singular; the
//! bundled ten-point configurations exhibit each degenerate case on the
//! unit square.

use helmholtz_rbf::flatlimit::{classify, fixture, generic_ten_points};
use helmholtz_rbf::collocation::ProblemSpec;

fn main() -> helmholtz_rbf::Result<()> {
    for name in ["example-ii", "example-iii", "example-iv"] {
        let (problem, nodes) = fixture(name)?;
        let report = classify(&problem, &nodes)?;
        println!(
            "{name}: case {} (rank P = {}, rank Q = {}, dim null P = {}, dim null Q = {})",
            report.case.label(),
            report.rank_p,
            report.rank_q,
            report.m,
            report.p
        );
    }

    // A generic perturbed set is unisolvent both ways: case i.
    let nodes = generic_ten_points(3)?;
    let problem = ProblemSpec::rectangle(7.0, 1, 1.0)?;
    let report = classify(&problem, &nodes)?;
    println!(
        "generic ten points: case {} (minimal basis degree {}, target degree {})",
        report.case.label(),
        report.min_basis_degree,
        report.target_degree
    );
    Ok(())
}
