//! A-posteriori error estimates built from interior residuals.
//!
//! Each model problem admits a Green's-function representation of the error,
//! which turns the interior residual `r = L^1 s - f^1` into a computable
//! surrogate for `||e||_inf`. On the interval the kernel magnitude is the
//! constant `1/(2 kappa)`, giving a true upper bound (the endpoint rows are
//! collocated exactly, so the error solves the PDE with homogeneous
//! radiation data). On the rectangle the residual is decomposed over the
//! transverse eigenmodes and each coefficient is weighted by its horizontal
//! wavenumber: `1/(sqrt(2) beta_m)` while the mode propagates, and the
//! integrated decay `(sqrt(2)/|beta_m|^2)(1 - e^{-|beta_m|/2})` past cut-off.
//! The duct estimate applies the same weights station by station with the
//! local cross-section modes; that one is a heuristic, not a bound.
//!
//! Estimates evaluate the residual of the approximant exactly at quadrature
//! nodes. Fixed evaluation grids enter only through [`residual_norms`].

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::collocation::{residual, Approximant, ProblemSpec};
use crate::geometry::{eval_grid, Domain};
use crate::quadrature;
use crate::{Error, Result};

/// Station count for the outer trapezoid rule of the modal estimates.
const STATIONS: usize = 60;

/// Default mode count for the modal estimates: every propagating mode, the
/// same number again, and ten more. Evanescent contributions decay like
/// `1/|beta_m|^2`, so the tail beyond this cap is negligible.
pub fn default_n_modes(mu0: usize) -> usize {
    2 * mu0 + 10
}

/// One transverse mode's share of a modal error estimate.
#[derive(Debug, Clone, Copy)]
pub struct ModeShare {
    /// Mode index (1-based).
    pub m: usize,
    /// Contribution to the estimate; the estimate is the sum of these.
    pub contribution: f64,
}

/// Interior residual sampled on explicit points.
#[derive(Debug, Clone)]
pub struct ResidualField {
    pub points: Vec<[f64; 2]>,
    pub values: Vec<Complex64>,
}

impl ResidualField {
    pub fn on(approx: &Approximant, problem: &ProblemSpec, points: &[[f64; 2]]) -> ResidualField {
        ResidualField { points: points.to_vec(), values: residual(approx, problem, points) }
    }

    /// `(rms l2, max)` of `|r|` over the sample.
    pub fn norms(&self) -> (f64, f64) {
        norms_of(&self.values)
    }
}

/// An error estimate together with the residual diagnostics that accompany
/// it in the experiment tables.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    /// Green's-function surrogate for the max error.
    pub estimate: f64,
    /// RMS-scaled l2 norm of `|r|` on the interior evaluation grid.
    pub residual_l2: f64,
    /// Max of `|r|` on the interior evaluation grid.
    pub residual_max: f64,
    /// Max-norm error against the exact solution, where one is known.
    pub true_error: Option<f64>,
    /// Per-mode contributions to `estimate` (2D problems only).
    pub mode_breakdown: Vec<ModeShare>,
}

/// Discrete norms of pointwise values: RMS-scaled l2 and max, so a constant
/// field `|c|` reports `(|c|, |c|)` regardless of the point count.
pub fn norms_of(values: &[Complex64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mut sum = 0.0;
    let mut max = 0.0f64;
    for v in values {
        let a = v.norm();
        sum += a * a;
        max = max.max(a);
    }
    ((sum / values.len() as f64).sqrt(), max)
}

/// Residual norms `(rms l2, max)` on an explicit grid of interior points.
pub fn residual_norms(approx: &Approximant, problem: &ProblemSpec, grid: &[[f64; 2]]) -> (f64, f64) {
    norms_of(&residual(approx, problem, grid))
}

/// `(1/(2 kappa)) int_0^1 |r|` for the interval problem, by adaptive
/// quadrature on the exact residual of the approximant.
pub fn estimate_1d(approx: &Approximant, problem: &ProblemSpec) -> Result<f64> {
    estimate_1d_residual(|x| approx.interior_apply(&[x, 0.0]), problem)
}

/// [`estimate_1d`] for an arbitrary residual function.
pub fn estimate_1d_residual<F: FnMut(f64) -> Complex64>(
    mut r: F,
    problem: &ProblemSpec,
) -> Result<f64> {
    let ProblemSpec::OneD { kappa } = *problem else {
        return Err(Error::invalid("problem", "estimate_1d needs the interval problem"));
    };
    // The integrand |r| has kinks at the residual's zero crossings, so the
    // quadrature tolerance is absolute, scaled to a coarse magnitude sample.
    let mut scale = 0.0f64;
    for i in 0..64 {
        scale = scale.max(r((i as f64 + 0.5) / 64.0).norm());
    }
    // A relative target keeps the tolerance above the residual's own
    // roundoff noise on ill-conditioned solves, where an absolute target
    // below the noise floor can never be met locally.
    let q = quadrature::integrate(|x| r(x).norm(), 0.0, 1.0, (1e-8 * scale).max(1e-14))?;
    Ok(q.value / (2.0 * kappa))
}

/// Modal error estimate for the rectangle: transverse mode coefficients
/// `r_m(x2) = <r(., x2), psi_m>` at each station, `int_0^1 |r_m|` by the
/// composite trapezoid rule over stations, each mode weighted by its
/// horizontal wavenumber. `n_modes = None` uses [`default_n_modes`];
/// explicit counts must cover every propagating mode.
pub fn estimate_rect(
    approx: &Approximant,
    problem: &ProblemSpec,
    n_modes: Option<usize>,
) -> Result<f64> {
    estimate_rect_residual(|p| approx.interior_apply(&p), problem, n_modes)
}

/// [`estimate_rect`] for an arbitrary residual function.
pub fn estimate_rect_residual<F>(r: F, problem: &ProblemSpec, n_modes: Option<usize>) -> Result<f64>
where
    F: Fn([f64; 2]) -> Complex64 + Sync,
{
    if !matches!(problem, ProblemSpec::Rectangle { .. }) {
        return Err(Error::invalid("problem", "estimate_rect needs the rectangle problem"));
    }
    Ok(modal_breakdown(&r, problem, n_modes)?.iter().map(|s| s.contribution).sum())
}

/// Heuristic estimate for the curved duct: the rectangle weights applied
/// station by station with the local cross-section modes. Modes contribute
/// the propagating weight where `Re beta_m(x2) > 0` and the evanescent
/// weight where `Im beta_m(x2) > 0`, so a mode crossing cut-off along the
/// duct switches weight mid-integral.
pub fn estimate_duct(
    approx: &Approximant,
    problem: &ProblemSpec,
    n_modes: Option<usize>,
) -> Result<f64> {
    estimate_duct_residual(|p| approx.interior_apply(&p), problem, n_modes)
}

/// [`estimate_duct`] for an arbitrary residual function.
pub fn estimate_duct_residual<F>(r: F, problem: &ProblemSpec, n_modes: Option<usize>) -> Result<f64>
where
    F: Fn([f64; 2]) -> Complex64 + Sync,
{
    if !matches!(problem, ProblemSpec::Duct { .. }) {
        return Err(Error::invalid("problem", "estimate_duct needs the duct problem"));
    }
    Ok(modal_breakdown(&r, problem, n_modes)?.iter().map(|s| s.contribution).sum())
}

/// Shared engine of the modal estimates. Stations are decomposed
/// concurrently; each station integrates all `n_modes` inner products in one
/// adaptive pass over the cross-section.
fn modal_breakdown<F>(
    r: &F,
    problem: &ProblemSpec,
    n_modes: Option<usize>,
) -> Result<Vec<ModeShare>>
where
    F: Fn([f64; 2]) -> Complex64 + Sync,
{
    let stations: Vec<f64> =
        (0..STATIONS).map(|j| j as f64 / (STATIONS - 1) as f64).collect();
    // The widest section governs the propagating-mode count.
    let mut mu0 = 0usize;
    for &x2 in &stations {
        mu0 = mu0.max(problem.modal_basis(x2)?.mu());
    }
    let n_modes = match n_modes {
        Some(0) => return Err(Error::invalid("n_modes", "need at least one mode")),
        Some(n) => {
            if matches!(problem, ProblemSpec::Rectangle { .. }) && n < mu0 + 1 {
                return Err(Error::invalid(
                    "n_modes",
                    format!("need n_modes >= {} to cover every propagating mode", mu0 + 1),
                ));
            }
            n
        }
        None => default_n_modes(mu0),
    };

    // Absolute quadrature tolerance from a coarse residual magnitude sample.
    let mut scale = 0.0f64;
    for &x2 in &stations {
        let basis = problem.modal_basis(x2)?;
        for i in 0..9 {
            let x1 = basis.lo() + basis.width() * (i as f64 + 0.5) / 9.0;
            scale = scale.max(r([x1, x2]).norm());
        }
    }
    let tol = (1e-8 * scale).max(1e-14);

    // Per station: weighted coefficient magnitudes w_m(x2) |r_m(x2)|.
    let per_station: Vec<Result<Vec<f64>>> = stations
        .par_iter()
        .map(|&x2| {
            let basis = problem.modal_basis(x2)?;
            let lo = basis.lo();
            let hi = lo + basis.width();
            let q = quadrature::integrate_vec(
                |x1, out| {
                    let v = r([x1, x2]);
                    for m in 1..=n_modes {
                        out[m - 1] = v * basis.psi(m, x1);
                    }
                },
                n_modes,
                lo,
                hi,
                tol,
            )?;
            let mut c = vec![0.0; n_modes];
            for m in 1..=n_modes {
                let beta = basis.beta(m);
                let w = if beta.re > 0.0 {
                    1.0 / (SQRT_2 * beta.re)
                } else if beta.im > 0.0 {
                    SQRT_2 / (beta.im * beta.im) * (1.0 - (-0.5 * beta.im).exp())
                } else {
                    // Exactly at cut-off the split assigns no weight.
                    0.0
                };
                c[m - 1] = w * q.value[m - 1].norm();
            }
            Ok(c)
        })
        .collect();

    let h = 1.0 / (STATIONS - 1) as f64;
    let mut shares = vec![0.0f64; n_modes];
    for (j, station) in per_station.into_iter().enumerate() {
        let c = station?;
        let tw = if j == 0 || j == STATIONS - 1 { 0.5 * h } else { h };
        for (share, value) in shares.iter_mut().zip(&c) {
            *share += tw * value;
        }
    }
    Ok(shares
        .into_iter()
        .enumerate()
        .map(|(i, contribution)| ModeShare { m: i + 1, contribution })
        .collect())
}

fn is_interior(domain: &Domain, p: [f64; 2]) -> bool {
    match domain {
        Domain::Interval => p[0] > 0.0 && p[0] < 1.0,
        Domain::Rectangle { width } => {
            p[0] > 0.0 && p[0] < *width && p[1] > 0.0 && p[1] < 1.0
        }
        Domain::Waveguide { lower, upper } => {
            p[1] > 0.0 && p[1] < 1.0 && p[0] > lower.eval(p[1]) && p[0] < upper.eval(p[1])
        }
    }
}

/// Full diagnostics for a solved problem: the estimate appropriate to the
/// domain, residual norms on an interior evaluation grid (200 points in 1D,
/// inside a 60x60 grid in 2D), and the true max error when the problem has
/// an exact solution.
pub fn report(
    approx: &Approximant,
    problem: &ProblemSpec,
    n_modes: Option<usize>,
) -> Result<ErrorReport> {
    let domain = problem.domain();
    let (m1, m2) = if domain.dim() == 1 { (200, 1) } else { (60, 60) };
    let grid = eval_grid(&domain, m1, m2)?;
    let interior: Vec<[f64; 2]> =
        grid.points.iter().copied().filter(|&p| is_interior(&domain, p)).collect();
    let (residual_l2, residual_max) = residual_norms(approx, problem, &interior);

    let (estimate, mode_breakdown) = match problem {
        ProblemSpec::OneD { .. } => (estimate_1d(approx, problem)?, Vec::new()),
        _ => {
            let shares =
                modal_breakdown(&|p: [f64; 2]| approx.interior_apply(&p), problem, n_modes)?;
            (shares.iter().map(|s| s.contribution).sum(), shares)
        }
    };

    let true_error = if problem.exact_solution(grid.points[0]).is_some() {
        Some(
            grid.points
                .iter()
                .map(|p| (approx.evaluate(p) - problem.exact_solution(*p).unwrap()).norm())
                .fold(0.0, f64::max),
        )
    } else {
        None
    };

    for v in [estimate, residual_l2, residual_max] {
        if !v.is_finite() {
            return Err(Error::Unresolved("error report contains non-finite entries".into()));
        }
    }
    Ok(ErrorReport { estimate, residual_l2, residual_max, true_error, mode_breakdown })
}
