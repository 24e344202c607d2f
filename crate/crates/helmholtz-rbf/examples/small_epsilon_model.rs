//! The near-flat error model: just above the stability edge, the interval
//! problem's error tracks (kappa h)^(N-1) / 2.
//!
//! Deep in the flat regime a direct solve hits the conditioning floor
//! (error ~ cond * machine epsilon) and the model no longer describes what
//! the computed solution does, so each cell below uses the smallest eps
//! whose condition number stays workable.

use helmholtz_rbf::collocation::{solve, ProblemSpec};
use helmholtz_rbf::geometry::{eval_grid, nodes_interval};
use helmholtz_rbf::kernels::Kernel;
use helmholtz_rbf::shapeconv::small_eps_model;

fn main() -> helmholtz_rbf::Result<()> {
    use std::f64::consts::PI;
    println!(
        "{:>6} {:>4} {:>5}  {:>12} {:>12} {:>7} {:>10}",
        "kappa", "N", "eps", "error", "model", "ratio", "cond"
    );
    for (kappa, n, eps) in [
        (PI, 8usize, 0.3),
        (PI, 10, 0.5),
        (2.0 * PI, 10, 0.5),
        (2.0 * PI, 12, 0.8),
    ] {
        let problem = ProblemSpec::one_d(kappa);
        let nodes = nodes_interval(n)?;
        let sol = solve(&problem, &nodes, Kernel::multiquadric(eps), None)?;
        let grid = eval_grid(&problem.domain(), 300, 1)?;
        let err = grid
            .points
            .iter()
            .zip(sol.approximant.evaluate_many(&grid.points))
            .map(|(p, v)| (v - problem.exact_solution(*p).unwrap()).norm())
            .fold(0.0f64, f64::max);
        let model = small_eps_model(1, kappa, nodes.h(), nodes.len())?;
        println!(
            "{:>6.3} {:>4} {:>5.2}  {:>12.3e} {:>12.3e} {:>7.2} {:>10.2e}",
            kappa,
            n,
            eps,
            err,
            model,
            err / model,
            sol.cond
        );
    }
    Ok(())
}
