//! Adaptive quadrature cost for the DtN inner products.
//!
//! Assembling the radiation rows means integrating kernel traces against
//! transverse eigenmodes; the integrands get more oscillatory with the mode
//! index. The adaptive Gauss-Lobatto pair spends evaluations roughly in
//! proportion to -log(tol).

use helmholtz_rbf::geometry::Domain;
use helmholtz_rbf::kernels::Kernel;
use helmholtz_rbf::quadrature::{inner_product_mode, integrate};

fn main() -> helmholtz_rbf::Result<()> {
    let domain = Domain::duct_m();
    let kernel = Kernel::multiquadric(6.0);
    // Kernel trace along the inlet section against mode 7, center mid-duct.
    let g = move |x1: f64| {
        let r = ((x1 - 0.4).powi(2) + 0.25f64.powi(2)).sqrt();
        num_complex::Complex64::new(kernel.eval(r), 0.0)
    };

    println!("{:>8}  {:>22}  {:>8}", "tol", "inner product", "evals");
    for tol in [1e-4, 1e-6, 1e-8, 1e-10, 1e-12] {
        let q = inner_product_mode(g, 7, 0.0, &domain, tol)?;
        println!("{tol:>8.0e}  {:>22.16}  {:>8}", q.value.re, q.n_evals);
    }

    // A plain real integral with a known value for comparison.
    let r = integrate(|x| (10.0 * x).cos(), 0.0, 1.0, 1e-12)?;
    println!(
        "\nsanity: int cos(10x) over (0,1) = {:.16} (exact {:.16}), {} evals",
        r.value,
        (10.0f64).sin() / 10.0,
        r.n_evals
    );
    Ok(())
}
