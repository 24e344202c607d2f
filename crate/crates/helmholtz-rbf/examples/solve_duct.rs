//! Solve the curved M-shaped duct with nonlocal DtN radiation conditions at
//! both ends, driven by a point source on the inlet, and summarize the
//! a-posteriori error report.

use helmholtz_rbf::collocation::{solve, ProblemSpec};
use helmholtz_rbf::errorest;
use helmholtz_rbf::geometry::{eval_grid, nodes_waveguide, Domain};
use helmholtz_rbf::kernels::Kernel;

fn main() -> helmholtz_rbf::Result<()> {
    let kappa = 6.0 * std::f64::consts::PI;
    let problem = ProblemSpec::duct(kappa, 0.3, Domain::duct_m())?;
    let nodes = nodes_waveguide(16, 20, &problem.domain(), 1)?;
    // eps = 1.5 / sqrt(h) keeps the kernel scale matched to the spacing.
    let eps = 1.5 / nodes.h().sqrt();
    let sol = solve(&problem, &nodes, Kernel::multiquadric(eps), None)?;

    println!(
        "M-duct, kappa = 6 pi, {} nodes, eps = {eps:.2}, cond = {:.2e}",
        nodes.len(),
        sol.cond
    );
    let report = errorest::report(&sol.approximant, &problem, None)?;
    let grid = eval_grid(&problem.domain(), 60, 60)?;
    let umax = sol
        .approximant
        .evaluate_many(&grid.points)
        .iter()
        .map(|v| v.norm())
        .fold(0.0f64, f64::max);
    println!("  error estimate     = {:.3e} ({:.1}% of the solution max)",
        report.estimate, 100.0 * report.estimate / umax);
    println!("  interior residual  = {:.3e} (l2), {:.3e} (max)",
        report.residual_l2, report.residual_max);

    let mut shares = report.mode_breakdown.clone();
    shares.sort_by(|a, b| b.contribution.total_cmp(&a.contribution));
    println!("  dominant transverse modes in the estimate:");
    for share in shares.iter().take(4) {
        println!("    mode {:<2} contributes {:.3e}", share.m, share.contribution);
    }
    Ok(())
}
