//! Residual-based a-posteriori error estimation.
//!
//! Convolving the interior residual with a Green's-function bound turns it
//! into a computable surrogate for the max error: a strict upper bound on
//! the interval problem, a mode-by-mode surrogate on waveguides.

use helmholtz_rbf::collocation::{solve, ProblemSpec};
use helmholtz_rbf::errorest;
use helmholtz_rbf::geometry::{nodes_interval, nodes_waveguide, Domain};
use helmholtz_rbf::kernels::Kernel;

fn main() -> helmholtz_rbf::Result<()> {
    println!("interval problem, kappa = 2 pi, multiquadric eps = 4:");
    println!("{:>4}  {:>12}  {:>12}  {:>7}", "N", "estimate", "true error", "ratio");
    let problem = ProblemSpec::one_d(2.0 * std::f64::consts::PI);
    for n in [15, 20, 25, 30, 35] {
        let nodes = nodes_interval(n)?;
        let sol = solve(&problem, &nodes, Kernel::multiquadric(4.0), None)?;
        let report = errorest::report(&sol.approximant, &problem, None)?;
        let t = report.true_error.unwrap();
        println!("{n:>4}  {:>12.3e}  {t:>12.3e}  {:>7.2}", report.estimate, report.estimate / t);
    }

    println!("\nduct problem, kappa = 6 pi (no exact solution available):");
    let problem = ProblemSpec::duct(6.0 * std::f64::consts::PI, 0.3, Domain::duct_m())?;
    let nodes = nodes_waveguide(13, 16, &problem.domain(), 1)?;
    let eps = 1.5 / nodes.h().sqrt();
    let sol = solve(&problem, &nodes, Kernel::multiquadric(eps), None)?;
    let report = errorest::report(&sol.approximant, &problem, None)?;
    println!(
        "  {} nodes: estimate = {:.3e}, residual l2 = {:.3e}, max = {:.3e}",
        nodes.len(),
        report.estimate,
        report.residual_l2,
        report.residual_max
    );
    Ok(())
}
