//! Measure how the collocation solution grows as the kernels flatten.
//!
//! On a PDE-degenerate node set (case iii) the solution diverges like
//! eps^-2; on a healthy set it stays bounded. The probe solves along a
//! decreasing eps ladder and fits the growth exponent of max|s|.

use helmholtz_rbf::collocation::ProblemSpec;
use helmholtz_rbf::flatlimit::{divergence_probe, fixture, generic_ten_points};
use helmholtz_rbf::kernels::Family;

fn main() -> helmholtz_rbf::Result<()> {
    // Stay above the conditioning floor: past cond ~ 1e16 the computed
    // solution stops tracking the analytic eps^-2 growth.
    let eps_list = [0.5, 0.35, 0.25, 0.18, 0.125];

    let (problem, degenerate) = fixture("example-iii")?;
    let probe = divergence_probe(&problem, &degenerate, Family::Multiquadric, &eps_list)?;
    println!("degenerate node set:  max|s| ~ eps^{:.2}", probe.slope);
    for s in &probe.samples {
        println!("    eps = {:.4}  max|s| = {:.3e}  cond = {:.2e}", s.eps, s.max_abs, s.cond);
    }

    let healthy = generic_ten_points(3)?;
    let problem = ProblemSpec::rectangle(7.0, 1, 1.0)?;
    let probe = divergence_probe(&problem, &healthy, Family::Multiquadric, &eps_list)?;
    println!("generic node set:     max|s| ~ eps^{:.2} (bounded limit)", probe.slope);
    Ok(())
}
