//! Singular wavenumbers of the 1D collocation matrix.
//!
//! Negating the PDE rows and multiplying the radiation rows by `i*kappa`
//! turns the interval problem's collocation matrix into a quadratic matrix
//! polynomial
//!
//! ```text
//! M(kappa) = kappa^2 A + i kappa B + C,
//! ```
//!
//! where `A` is the plain RBF interpolation matrix, `B` carries the boundary
//! first-derivative rows, and `C` the interior second-derivative rows. The
//! wavenumbers at which collocation breaks down are the values making
//! `M(kappa)` singular; they are the eigenvalues of the `2N x 2N` companion
//! linearization `[[0, I], [-A^{-1}C, -i A^{-1}B]]`.
//!
//! Two structural zero eigenvalues are always present, and the remaining
//! spectrum is invariant under `kappa -> -conj(kappa)`, so at most `N - 1`
//! wavenumbers with positive real part can interfere with a physical
//! problem. [`resolution_of`] converts each to points per wavelength; on the
//! grids we use, all of them sit below the resolution any sensible
//! discretization would employ.

use num_complex::Complex64;

use crate::geometry::{NodeSet, Region};
use crate::kernels::Kernel;
use crate::linalg::{eig, CMatrix, LuFactors};
use crate::{Error, Result};

/// Real coefficient matrices of `M(kappa) = kappa^2 A + i kappa B + C`.
///
/// Entries are stored as complex with zero imaginary part so the pencil can
/// be fed directly to the complex factorization and eigenvalue routines;
/// `build_pencil` only ever writes real values.
#[derive(Debug, Clone)]
pub struct Pencil {
    /// Interpolation matrix `phi_k(x_j)` (every row).
    pub a: CMatrix,
    /// Boundary rows: `-phi_k'(0)` on the left row, `+phi_k'(1)` on the
    /// right row; interior rows are zero.
    pub b: CMatrix,
    /// Interior rows: `phi_k''(x_j)`; boundary rows are zero.
    pub c: CMatrix,
    n: usize,
}

impl Pencil {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Evaluates `M(kappa) = kappa^2 A + i kappa B + C`.
    pub fn reconstruct(&self, kappa: Complex64) -> CMatrix {
        let n = self.n;
        let k2 = kappa * kappa;
        let ik = Complex64::i() * kappa;
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = k2 * self.a[(i, j)] + ik * self.b[(i, j)] + self.c[(i, j)];
            }
        }
        m
    }
}

/// Builds the pencil for a 1D node set with the standard region tagging.
pub fn build_pencil(nodes: &NodeSet, kernel: Kernel) -> Result<Pencil> {
    if nodes.dim != 1 {
        return Err(Error::invalid("nodes", "the pencil is defined for the 1D problem only"));
    }
    if nodes.regions.iter().any(|r| *r == Region::Wall) {
        return Err(Error::invalid("nodes", "1D node sets carry no wall regions"));
    }
    let n = nodes.len();
    let mut a = CMatrix::zeros(n, n);
    let mut b = CMatrix::zeros(n, n);
    let mut c = CMatrix::zeros(n, n);
    for j in 0..n {
        let xj = nodes.points[j][0];
        for k in 0..n {
            let d = kernel.derivs_1d(xj, nodes.points[k][0]);
            a[(j, k)] = Complex64::new(d[0], 0.0);
            match nodes.regions[j] {
                Region::Interior => c[(j, k)] = Complex64::new(d[2], 0.0),
                Region::Left => b[(j, k)] = Complex64::new(-d[1], 0.0),
                Region::Right => b[(j, k)] = Complex64::new(d[1], 0.0),
                Region::Wall => unreachable!(),
            }
        }
    }
    Ok(Pencil { a, b, c, n })
}

/// All `2N` wavenumbers at which `M(kappa)` is singular, sorted by real part
/// (ties by imaginary part).
///
/// Fails if the interpolation matrix `A` cannot be factored; for the three
/// supported families and distinct nodes it is nonsingular in exact
/// arithmetic.
pub fn singular_wavenumbers(pencil: &Pencil) -> Result<Vec<Complex64>> {
    let n = pencil.n;
    let lu = LuFactors::factor(&pencil.a)?;
    // Companion blocks: top half [0 | I], bottom half [-A^{-1}C | -i A^{-1}B].
    let mut g = CMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        g[(i, n + i)] = Complex64::new(1.0, 0.0);
    }
    let minus_i = Complex64::new(0.0, -1.0);
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = pencil.c[(i, j)];
        }
        let sol = lu.solve(&col);
        for i in 0..n {
            g[(n + i, j)] = -sol[i];
        }
        for i in 0..n {
            col[i] = pencil.b[(i, j)];
        }
        let sol = lu.solve(&col);
        for i in 0..n {
            g[(n + i, n + j)] = minus_i * sol[i];
        }
    }
    let mut kappas = eig(&g)?;
    kappas.sort_by(|p, q| {
        p.re.partial_cmp(&q.re).unwrap().then(p.im.partial_cmp(&q.im).unwrap())
    });
    Ok(kappas)
}

/// Points per wavelength a real problem at wavenumber `Re(kappa)` would have
/// on an `N`-point unit-interval grid: `2 pi N / Re(kappa)`.
pub fn resolution_of(kappa: Complex64, n: usize) -> f64 {
    2.0 * std::f64::consts::PI * n as f64 / kappa.re
}

/// Number of eigenvalues within `1e-6 * max|kappa|` of the origin.
///
/// The companion matrix always carries exactly two of these structural
/// zeros; more indicate a defective solve.
pub fn count_structural_zeros(kappas: &[Complex64]) -> usize {
    let scale = spectrum_scale(kappas);
    kappas.iter().filter(|k| k.norm() <= 1e-6 * scale).count()
}

/// Largest relative mismatch when greedily pairing the spectrum with its
/// image under `kappa -> -conj(kappa)`.
///
/// A structurally sound pencil returns a defect at rounding level; the unit
/// tests gate it at `1e-6`.
pub fn pairing_defect(kappas: &[Complex64]) -> f64 {
    let scale = spectrum_scale(kappas);
    if scale == 0.0 {
        return 0.0;
    }
    let mut pool: Vec<Complex64> = kappas.to_vec();
    let mut worst = 0.0f64;
    for &k in kappas {
        let target = -k.conj();
        let (idx, dist) = pool
            .iter()
            .enumerate()
            .map(|(i, z)| (i, (z - target).norm()))
            .min_by(|p, q| p.1.partial_cmp(&q.1).unwrap())
            .expect("pool tracks the input length");
        worst = worst.max(dist);
        pool.swap_remove(idx);
    }
    worst / scale
}

fn spectrum_scale(kappas: &[Complex64]) -> f64 {
    kappas.iter().map(|k| k.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collocation::{assemble_nonsymmetric, ProblemSpec};
    use crate::geometry::nodes_interval;
    use crate::kernels::Kernel;
    use std::f64::consts::PI;

    #[test]
    fn reconstruction_matches_rescaled_collocation() {
        let kappa = 2.0 * PI;
        let nodes = nodes_interval(8).unwrap();
        let kernel = Kernel::multiquadric(3.0);
        let pencil = build_pencil(&nodes, kernel).unwrap();
        let m = pencil.reconstruct(Complex64::new(kappa, 0.0));

        let problem = ProblemSpec::one_d(kappa);
        let asm = assemble_nonsymmetric(&problem, &nodes, kernel, 1e-12).unwrap();
        let ik = Complex64::i() * kappa;
        let scale = (0..8)
            .flat_map(|i| (0..8).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm())
            .fold(0.0f64, f64::max);
        for i in 0..8 {
            // PDE rows were negated, boundary rows multiplied by i*kappa.
            let factor = match nodes.regions[i] {
                Region::Interior => -Complex64::new(1.0, 0.0),
                _ => ik,
            };
            for j in 0..8 {
                let want = factor * asm.matrix[(i, j)];
                assert!(
                    (m[(i, j)] - want).norm() <= 1e-12 * scale,
                    "entry ({i},{j}): {} vs {}",
                    m[(i, j)],
                    want
                );
            }
        }
    }

    #[test]
    fn gaussian_interpolation_matrix_is_positive_definite() {
        let nodes = nodes_interval(8).unwrap();
        let pencil = build_pencil(&nodes, Kernel::gaussian(2.0)).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(pencil.a[(i, j)].im, 0.0);
                assert!((pencil.a[(i, j)] - pencil.a[(j, i)]).norm() <= 1e-14);
            }
        }
        for l in eig(&pencil.a).unwrap() {
            assert!(l.re > 0.0 && l.im.abs() <= 1e-10, "eigenvalue {l}");
        }
    }

    #[test]
    fn pencil_blocks_have_the_advertised_sparsity() {
        let nodes = nodes_interval(6).unwrap();
        let pencil = build_pencil(&nodes, Kernel::multiquadric(5.0)).unwrap();
        for (i, region) in nodes.regions.iter().enumerate() {
            for j in 0..6 {
                match region {
                    Region::Interior => assert_eq!(pencil.b[(i, j)].norm(), 0.0),
                    _ => assert_eq!(pencil.c[(i, j)].norm(), 0.0),
                }
            }
        }
    }

    #[test]
    fn two_structural_zeros_and_conjugate_pairing() {
        for &n in &[6usize, 8, 10] {
            let nodes = nodes_interval(n).unwrap();
            for kernel in [Kernel::multiquadric(5.0), Kernel::gaussian(10.0)] {
                let pencil = build_pencil(&nodes, kernel).unwrap();
                let kappas = singular_wavenumbers(&pencil).unwrap();
                assert_eq!(kappas.len(), 2 * n);
                assert_eq!(
                    count_structural_zeros(&kappas),
                    2,
                    "{} N={n}: {kappas:?}",
                    kernel.family().name()
                );
                let defect = pairing_defect(&kappas);
                assert!(
                    defect <= 1e-6,
                    "{} N={n}: pairing defect {defect:.3e}",
                    kernel.family().name()
                );
                let scale = kappas.iter().map(|k| k.norm()).fold(0.0, f64::max);
                let positive =
                    kappas.iter().filter(|k| k.re > 1e-6 * scale).count();
                assert!(positive <= n - 1, "{positive} right-half eigenvalues at N={n}");
            }
        }
    }

    #[test]
    fn smallest_singular_value_vanishes_at_each_root() {
        let nodes = nodes_interval(8).unwrap();
        let pencil = build_pencil(&nodes, Kernel::multiquadric(5.0)).unwrap();
        let kappas = singular_wavenumbers(&pencil).unwrap();
        let scale = kappas.iter().map(|k| k.norm()).fold(0.0, f64::max);
        for &k in kappas.iter().filter(|k| k.re > 1e-6 * scale) {
            let m = pencil.reconstruct(k);
            let svd = crate::linalg::svd(&m);
            let smax = svd.sigma[0];
            let smin = *svd.sigma.last().unwrap();
            assert!(smin <= 1e-6 * smax, "kappa={k}: sigma_min/sigma_max = {}", smin / smax);
        }
    }

    #[test]
    fn resolution_small_cases() {
        assert!((resolution_of(Complex64::new(2.0 * PI, 0.0), 10) - 10.0).abs() <= 1e-12);
        assert!((resolution_of(Complex64::new(PI, 0.0), 1) - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn near_real_roots_sit_below_usable_resolution() {
        // Counterpart of the paper's scatter plot: nothing close to the real
        // axis is resolved to even 4 points per wavelength.
        for n in 6..=14 {
            let nodes = nodes_interval(n).unwrap();
            let pencil = build_pencil(&nodes, Kernel::multiquadric(5.0)).unwrap();
            let kappas = singular_wavenumbers(&pencil).unwrap();
            let scale = kappas.iter().map(|k| k.norm()).fold(0.0, f64::max);
            for &k in &kappas {
                if k.re > 1e-6 * scale && k.im.abs() < 0.5 {
                    let ppw = resolution_of(k, n);
                    assert!(ppw < 4.0, "N={n}, kappa={k}: ppw={ppw}");
                }
            }
        }
    }
}
