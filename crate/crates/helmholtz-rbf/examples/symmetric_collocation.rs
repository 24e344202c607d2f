//! Compare non-symmetric (Kansa) and symmetric collocation on the 1D
//! problem. The symmetric form applies the conjugated operators to the
//! kernel's second argument too, giving a Hermitian matrix at the cost of
//! higher kernel derivatives.

use helmholtz_rbf::collocation::{solve, solve_symmetric_1d, ProblemSpec};
use helmholtz_rbf::geometry::{eval_grid, nodes_interval};
use helmholtz_rbf::kernels::Kernel;

fn main() -> helmholtz_rbf::Result<()> {
    let problem = ProblemSpec::one_d(2.0 * std::f64::consts::PI);
    let grid = eval_grid(&problem.domain(), 400, 1)?;
    let kernel = Kernel::multiquadric(4.0);

    println!("kappa = 2 pi, multiquadric eps = 4");
    println!("{:>4}  {:>15}  {:>15}", "N", "non-symmetric", "symmetric");
    for n in [10, 15, 20, 25, 30] {
        let nodes = nodes_interval(n)?;
        let mut errs = Vec::new();
        for sol in [solve(&problem, &nodes, kernel, None)?, solve_symmetric_1d(&problem, &nodes, kernel)?] {
            errs.push(
                grid.points
                    .iter()
                    .zip(sol.approximant.evaluate_many(&grid.points))
                    .map(|(p, v)| (v - problem.exact_solution(*p).unwrap()).norm())
                    .fold(0.0f64, f64::max),
            );
        }
        println!("{:>4}  {:>15.3e}  {:>15.3e}", n, errs[0], errs[1]);
    }
    println!("both converge exponentially; the non-symmetric form is cheaper to assemble");
    Ok(())
}
