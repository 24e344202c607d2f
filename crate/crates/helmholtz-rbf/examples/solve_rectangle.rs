//! Solve the rectangle waveguide problem with sound-soft walls and a
//! single-mode radiation condition, where the exact solution
//! `exp(i beta_1 x2) sin(alpha_1 x1)` is known.

use helmholtz_rbf::collocation::{solve, ProblemSpec};
use helmholtz_rbf::geometry::{eval_grid, nodes_rectangle};
use helmholtz_rbf::kernels::Kernel;

fn main() -> helmholtz_rbf::Result<()> {
    let problem = ProblemSpec::rectangle(7.0, 1, 1.0)?;
    let grid = eval_grid(&problem.domain(), 50, 50)?;

    println!("rectangle, kappa = 7, mode 1, multiquadric eps = 3");
    for n in [6usize, 8, 10, 12] {
        let nodes = nodes_rectangle(n, n, 1.0)?;
        let sol = solve(&problem, &nodes, Kernel::multiquadric(3.0), None)?;
        let err = grid
            .points
            .iter()
            .zip(sol.approximant.evaluate_many(&grid.points))
            .map(|(p, v)| (v - problem.exact_solution(*p).unwrap()).norm())
            .fold(0.0f64, f64::max);
        println!(
            "  {n} x {n} nodes (N = {:<3}) max error = {err:.3e}   cond = {:.2e}",
            nodes.len(),
            sol.cond
        );
    }
    Ok(())
}
