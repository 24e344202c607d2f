//! Find the wavenumbers at which the 1D collocation matrix is exactly
//! singular, by linearizing the quadratic eigenvalue problem in kappa.
//!
//! The spectrum always contains two structural zeros and is symmetric under
//! kappa -> -conj(kappa). The physically relevant eigenvalues (positive
//! real part, near-real) sit below 4 points per wavelength: a grid that
//! resolves the wave cannot hit a singularity.

use helmholtz_rbf::geometry::nodes_interval;
use helmholtz_rbf::kernels::Kernel;
use helmholtz_rbf::singularity::{
    build_pencil, count_structural_zeros, pairing_defect, resolution_of, singular_wavenumbers,
};

fn main() -> helmholtz_rbf::Result<()> {
    let kernel = Kernel::multiquadric(5.0);
    for n in [6usize, 8, 10, 12] {
        let nodes = nodes_interval(n)?;
        let pencil = build_pencil(&nodes, kernel)?;
        let kappas = singular_wavenumbers(&pencil)?;
        println!(
            "N = {n}: {} eigenvalues, {} structural zeros, pairing defect {:.1e}",
            kappas.len(),
            count_structural_zeros(&kappas),
            pairing_defect(&kappas)
        );
        for k in kappas.iter().filter(|k| k.re > 1e-9 && k.im.abs() < 0.5) {
            println!(
                "    kappa = {:.4} {:+.4}i  -> {:.2} points per wavelength",
                k.re,
                k.im,
                resolution_of(*k, n)
            );
        }
    }
    Ok(())
}
