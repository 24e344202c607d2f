//! Adaptive Gauss-Lobatto quadrature.
//!
//! The engine pairs the 4-point Gauss-Lobatto rule (degree 5) with its
//! 7-point Kronrod extension (degree 9) on each interval, accepts the
//! extended value when the two rules agree to the interval's share of the
//! absolute tolerance, and otherwise bisects, halving the tolerance per
//! child. Complex and vector-valued integrands run through the same engine,
//! sharing function evaluations across components; `n_evals` counts every
//! call of the integrand.

use num_complex::Complex64;

use crate::geometry::Domain;
use crate::{Error, Result};

/// Hard recursion limit; an interval that still disagrees at this depth is
/// accepted and the run is flagged `converged = false`.
pub const MAX_DEPTH: usize = 50;

/// Work budget. Once this many integrand evaluations have been spent the
/// engine stops refining and accepts every remaining interval at its current
/// paired-rule value, flagging the run `converged = false` if any of them is
/// still above tolerance. This bounds the cost of integrands whose pointwise
/// noise floor sits above the requested tolerance, where bisection can never
/// succeed locally.
pub const MAX_EVALS: usize = 200_000;

/// Outcome of an adaptive integration.
#[derive(Debug, Clone)]
pub struct QuadResult<T> {
    pub value: T,
    /// Sum of the per-interval discrepancies between the paired rules.
    pub error_estimate: f64,
    /// Number of integrand evaluations.
    pub n_evals: usize,
    /// False if any interval was accepted above tolerance because the depth
    /// limit or the evaluation budget was hit.
    pub converged: bool,
}

const ALPHA: f64 = 0.816496580927726; // sqrt(2/3)
const BETA: f64 = 0.4472135954999579; // 1/sqrt(5)

struct Engine<F: FnMut(f64, &mut [Complex64])> {
    f: F,
    k: usize,
    n_evals: usize,
    converged: bool,
    err_acc: f64,
}

impl<F: FnMut(f64, &mut [Complex64])> Engine<F> {
    fn eval(&mut self, x: f64) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.k];
        (self.f)(x, &mut buf);
        self.n_evals += 1;
        buf
    }

    fn rec(
        &mut self,
        a: f64,
        b: f64,
        fa: &[Complex64],
        fb: &[Complex64],
        tol: f64,
        depth: usize,
    ) -> Vec<Complex64> {
        let h = 0.5 * (b - a);
        let m = 0.5 * (a + b);
        let fmll = self.eval(m - ALPHA * h);
        let fml = self.eval(m - BETA * h);
        let fm = self.eval(m);
        let fmr = self.eval(m + BETA * h);
        let fmrr = self.eval(m + ALPHA * h);
        let mut err: f64 = 0.0;
        let mut i1 = vec![Complex64::new(0.0, 0.0); self.k];
        for c in 0..self.k {
            let i2 = h / 6.0 * (fa[c] + fb[c] + 5.0 * (fml[c] + fmr[c]));
            let v = h / 1470.0
                * (77.0 * (fa[c] + fb[c])
                    + 432.0 * (fmll[c] + fmrr[c])
                    + 625.0 * (fml[c] + fmr[c])
                    + 672.0 * fm[c]);
            err = err.max((v - i2).norm());
            i1[c] = v;
        }
        if err <= tol || depth >= MAX_DEPTH || self.n_evals >= MAX_EVALS {
            if err > tol {
                self.converged = false;
            }
            self.err_acc += err;
            return i1;
        }
        let left = self.rec(a, m, fa, &fm, 0.5 * tol, depth + 1);
        let right = self.rec(m, b, &fm, fb, 0.5 * tol, depth + 1);
        left.iter().zip(&right).map(|(l, r)| l + r).collect()
    }
}

fn validate(a: f64, b: f64, tol: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::invalid("bounds", format!("need finite a < b, got [{a}, {b}]")));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::invalid("tol", format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// Adaptive integration of a vector of complex components over `[a, b]` to
/// absolute tolerance `tol`, controlled by the worst component. All
/// components share the same evaluation points.
pub fn integrate_vec<F: FnMut(f64, &mut [Complex64])>(
    mut f: F,
    k: usize,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadResult<Vec<Complex64>>> {
    validate(a, b, tol)?;
    if k == 0 {
        return Err(Error::invalid("k", "need at least one component"));
    }
    let mut engine = Engine { f: &mut f, k, n_evals: 0, converged: true, err_acc: 0.0 };
    let fa = engine.eval(a);
    let fb = engine.eval(b);
    let value = engine.rec(a, b, &fa, &fb, tol, 0);
    Ok(QuadResult {
        value,
        error_estimate: engine.err_acc,
        n_evals: engine.n_evals,
        converged: engine.converged,
    })
}

/// Adaptive integration of a complex integrand.
pub fn integrate_complex<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadResult<Complex64>> {
    let r = integrate_vec(|x, out| out[0] = f(x), 1, a, b, tol)?;
    Ok(QuadResult {
        value: r.value[0],
        error_estimate: r.error_estimate,
        n_evals: r.n_evals,
        converged: r.converged,
    })
}

/// Adaptive integration of a real integrand.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadResult<f64>> {
    let r = integrate_complex(|x| Complex64::new(f(x), 0.0), a, b, tol)?;
    Ok(QuadResult {
        value: r.value.re,
        error_estimate: r.error_estimate,
        n_evals: r.n_evals,
        converged: r.converged,
    })
}

/// Transverse eigenmode `psi_m(x1) = sqrt(2) sin(m pi (x1 - lo) / w)` of the
/// cross-section `[lo, lo + w]`. Orthonormal on unit-width sections.
pub fn mode_fn(m: usize, lo: f64, w: f64) -> impl Fn(f64) -> f64 {
    let alpha = m as f64 * std::f64::consts::PI / w;
    move |x1: f64| std::f64::consts::SQRT_2 * (alpha * (x1 - lo)).sin()
}

/// `<g, psi_m>` over the cross-section of `domain` at station `x2`, by
/// adaptive quadrature at absolute tolerance `tol`.
pub fn inner_product_mode<F: FnMut(f64) -> Complex64>(
    mut g: F,
    m: usize,
    x2: f64,
    domain: &Domain,
    tol: f64,
) -> Result<QuadResult<Complex64>> {
    if m == 0 {
        return Err(Error::invalid("m", "mode index must be >= 1"));
    }
    let (lo, hi, w) = domain.section(x2)?;
    let psi = mode_fn(m, lo, w);
    integrate_complex(|x1| g(x1) * psi(x1), lo, hi, tol)
}
