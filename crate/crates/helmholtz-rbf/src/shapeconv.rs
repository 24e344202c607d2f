//! Shape-parameter studies: sweeps over `eps`, selection of `eps` from
//! estimates, exponential convergence fits, `eps = C h^beta` refinement, and
//! the flat-limit error models.
//!
//! The central empirical facts these tools expose: at fixed `eps` the
//! multiquadric error follows `||e|| ~ A_M exp(-C_M / h)` until rounding
//! takes over; the error-vs-`eps` curve is U-shaped with the minimum near
//! the edge of the ill-conditioned regime; and the a-posteriori estimate and
//! the residual norm both track the true error well enough to place their
//! argmin near the true optimum. Scaling `eps` with `h^beta` trades the
//! stationary non-convergent regime (`beta = -1`) against progressively
//! flatter, better-resolved bases (`beta in (-1, 0]`).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::collocation::{solve, ProblemSpec};
use crate::errorest;
use crate::flatlimit::poly_dim;
use crate::geometry::NodeSet;
use crate::kernels::{Family, Kernel};
use crate::{Error, Result};

/// Records with a condition estimate beyond this are excluded from fits.
pub const COND_LIMIT: f64 = 1e16;

/// One `(eps, node set)` cell of a sweep: solve diagnostics plus the error
/// measures used for selection and fitting. A failed solve keeps its `eps`,
/// `n`, `h` key and carries the reason in `flags`.
#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub eps: f64,
    /// Node count.
    pub n: usize,
    /// Fill-distance proxy: `1/(n - 1)` in 1D, `max(h1, h2)` in 2D.
    pub h: f64,
    /// Max error against the exact solution, where one is known.
    pub true_error: Option<f64>,
    pub estimate: f64,
    pub residual_l2: f64,
    pub cond: f64,
    pub failed: bool,
    pub flags: Vec<String>,
}

impl SweepRecord {
    /// Usable for selection and fitting: solved, finite, and not past the
    /// conditioning limit.
    pub fn usable(&self) -> bool {
        !self.failed && self.estimate.is_finite() && self.cond <= COND_LIMIT
    }
}

/// Argument of the exponential convergence model `A exp(-C f(h))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitKind {
    /// `f(h) = 1/h`: the fixed-`eps` multiquadric regime.
    InvH,
    /// `f(h) = 1/sqrt(h)`: the `eps = C/sqrt(h)` scaled regime.
    InvSqrtH,
}

impl FitKind {
    pub fn apply(self, h: f64) -> f64 {
        match self {
            FitKind::InvH => 1.0 / h,
            FitKind::InvSqrtH => 1.0 / h.sqrt(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FitKind::InvH => "1/h",
            FitKind::InvSqrtH => "1/sqrt(h)",
        }
    }
}

/// Least-squares fit of `log(err) = log(A_M) - C_M f(h)`.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub a_m: f64,
    pub c_m: f64,
    pub f_kind: FitKind,
    /// Coefficient of determination of the log-linear fit.
    pub r2: f64,
    /// Records surviving the ill-conditioning filter.
    pub points_used: usize,
}

/// Outcome of [`select_epsilon`].
#[derive(Debug, Clone, Copy)]
pub struct EpsSelection {
    /// `eps` minimizing the error estimate.
    pub eps_est: f64,
    /// `eps` minimizing the residual l2 norm.
    pub eps_res: f64,
    /// Scale-free constant `mean(eps_est, eps_res) * sqrt(h)`, the `C` of
    /// the `eps = C/sqrt(h)` strategy implied by the selection.
    pub c_tilde: f64,
    /// True when a selected minimum sits at the edge of the swept grid, so
    /// the real optimum may lie outside it.
    pub at_edge: bool,
}

fn record_h(nodes: &NodeSet) -> f64 {
    if nodes.dim == 1 {
        1.0 / (nodes.len() - 1) as f64
    } else {
        nodes.h()
    }
}

fn run_cell(problem: &ProblemSpec, nodes: &NodeSet, kernel: Kernel) -> SweepRecord {
    let mut rec = SweepRecord {
        eps: kernel.eps(),
        n: nodes.len(),
        h: record_h(nodes),
        true_error: None,
        estimate: f64::NAN,
        residual_l2: f64::NAN,
        cond: f64::NAN,
        failed: true,
        flags: Vec::new(),
    };
    let sol = match solve(problem, nodes, kernel, None) {
        Ok(sol) => sol,
        Err(e) => {
            rec.flags.push(format!("solve failed: {e}"));
            return rec;
        }
    };
    rec.cond = sol.cond;
    rec.flags.extend(sol.warnings.iter().cloned());
    match errorest::report(&sol.approximant, problem, None) {
        Ok(rep) => {
            rec.true_error = rep.true_error;
            rec.estimate = rep.estimate;
            rec.residual_l2 = rep.residual_l2;
            rec.failed = false;
            if sol.cond > COND_LIMIT {
                rec.flags.push("ill-conditioned".into());
            }
        }
        Err(e) => rec.flags.push(format!("estimate failed: {e}")),
    }
    rec
}

/// Solves and estimates every `(node set, eps)` pair. Cells run
/// concurrently; the output is ordered by node set, then by the `eps_list`
/// order, regardless of scheduling. Failed cells are recorded, not fatal.
pub fn sweep(
    problem: &ProblemSpec,
    node_sets: &[NodeSet],
    family: Family,
    eps_list: &[f64],
) -> Result<Vec<SweepRecord>> {
    if node_sets.is_empty() {
        return Err(Error::invalid("node_sets", "need at least one node set"));
    }
    if eps_list.is_empty() {
        return Err(Error::invalid("eps_list", "need at least one shape parameter"));
    }
    let mut jobs = Vec::with_capacity(node_sets.len() * eps_list.len());
    for nodes in node_sets {
        for &eps in eps_list {
            jobs.push((nodes, Kernel::new(family, eps)?));
        }
    }
    Ok(jobs.par_iter().map(|(nodes, kernel)| run_cell(problem, nodes, *kernel)).collect())
}

/// Refinement traversal with `eps = c * h^beta` applied per node set.
pub fn converge(
    problem: &ProblemSpec,
    node_sets: &[NodeSet],
    family: Family,
    c: f64,
    beta: f64,
) -> Result<Vec<SweepRecord>> {
    if node_sets.is_empty() {
        return Err(Error::invalid("node_sets", "need at least one node set"));
    }
    let kernels = node_sets
        .iter()
        .map(|nodes| Kernel::new(family, eps_strategy(c, beta, record_h(nodes))))
        .collect::<Result<Vec<Kernel>>>()?;
    Ok(node_sets
        .par_iter()
        .zip(kernels)
        .map(|(nodes, kernel)| run_cell(problem, nodes, kernel))
        .collect())
}

/// Picks the shape parameters minimizing the estimate and the residual norm
/// over a sweep of a single node set.
pub fn select_epsilon(records: &[SweepRecord]) -> Result<EpsSelection> {
    if records.len() < 3 {
        return Err(Error::invalid("records", "need at least 3 sweep records to select eps"));
    }
    let usable: Vec<&SweepRecord> = records.iter().filter(|r| !r.failed).collect();
    if usable.is_empty() {
        return Err(Error::Unresolved("every sweep cell failed; nothing to select from".into()));
    }
    if usable.iter().any(|r| r.n != usable[0].n) {
        return Err(Error::invalid("records", "select_epsilon expects records of one node set"));
    }
    let argmin = |value: &dyn Fn(&SweepRecord) -> f64| -> f64 {
        usable
            .iter()
            .map(|r| (value(r), r.eps))
            .fold((f64::INFINITY, f64::NAN), |best, cur| if cur.0 < best.0 { cur } else { best })
            .1
    };
    let eps_est = argmin(&|r: &SweepRecord| r.estimate);
    let eps_res = argmin(&|r: &SweepRecord| r.residual_l2);
    let lo = usable.iter().map(|r| r.eps).fold(f64::INFINITY, f64::min);
    let hi = usable.iter().map(|r| r.eps).fold(f64::NEG_INFINITY, f64::max);
    let at_edge = [eps_est, eps_res].iter().any(|&e| e == lo || e == hi);
    let h = usable[0].h;
    Ok(EpsSelection {
        eps_est,
        eps_res,
        c_tilde: 0.5 * (eps_est + eps_res) * h.sqrt(),
        at_edge,
    })
}

/// Least-squares fit of `log(value)` against `f(h)` over an h-ladder at
/// fixed `eps`, with `value` taken from each record. The ill-conditioning
/// filter drops unusable records and any record whose value jumps by more
/// than 10x from the last kept coarser rung (rounding error growth under
/// refinement).
pub fn fit_exponential_to(
    records: &[SweepRecord],
    f_kind: FitKind,
    value: impl Fn(&SweepRecord) -> Option<f64>,
) -> Result<FitResult> {
    let mut usable: Vec<(f64, f64)> = Vec::new();
    let mut ordered: Vec<&SweepRecord> = records.iter().filter(|r| r.usable()).collect();
    ordered.sort_by(|a, b| b.h.total_cmp(&a.h));
    for r in ordered {
        let Some(v) = value(r) else { continue };
        if !(v.is_finite() && v > 0.0) {
            continue;
        }
        if let Some(&(_, prev)) = usable.last() {
            if v > 10.0 * prev {
                continue;
            }
        }
        usable.push((r.h, v));
    }
    if usable.len() < 3 {
        return Err(Error::invalid(
            "records",
            format!("need at least 3 usable records to fit, have {}", usable.len()),
        ));
    }
    if usable.iter().all(|&(h, _)| h == usable[0].0) {
        return Err(Error::invalid("records", "all records share one h; the fit is degenerate"));
    }
    let pts: Vec<(f64, f64)> = usable.iter().map(|&(h, v)| (f_kind.apply(h), v.ln())).collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 =
        pts.iter().map(|p| (p.1 - (intercept + slope * p.0)).powi(2)).sum();
    let r2 = if ss_tot <= f64::EPSILON * mean_y.abs().max(1.0) {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(FitResult {
        a_m: intercept.exp(),
        c_m: -slope,
        f_kind,
        r2,
        points_used: pts.len(),
    })
}

/// [`fit_exponential_to`] on the true error.
pub fn fit_exponential(records: &[SweepRecord], f_kind: FitKind) -> Result<FitResult> {
    fit_exponential_to(records, f_kind, |r| r.true_error)
}

/// The shape-parameter strategy `eps = c * h^beta`. Panics on a
/// non-positive `c` or `h`; the refinement drivers validate inputs first.
pub fn eps_strategy(c: f64, beta: f64, h: f64) -> f64 {
    assert!(c > 0.0 && c.is_finite(), "strategy constant must be positive");
    assert!(h > 0.0 && h.is_finite(), "spacing must be positive");
    c * h.powf(beta)
}

/// Largest polynomial degree whose full basis fits in `n` 2D points:
/// `max k` with `(k+1)(k+2)/2 <= n`.
pub fn complete_degree(n: usize) -> usize {
    let mut k = 0;
    while poly_dim(k + 1, 2) <= n {
        k += 1;
    }
    k
}

/// Predicted error of the flat (small-`eps`) limit on a resolved grid:
/// `(kappa h)^(n-1) / 2` in 1D and `(kappa h)^K` in 2D, where `K` is the
/// complete polynomial degree of the node count. Grids with `kappa h >= 1`
/// do not resolve the wave and are rejected.
pub fn small_eps_model(dim: usize, kappa: f64, h: f64, n: usize) -> Result<f64> {
    if dim != 1 && dim != 2 {
        return Err(Error::invalid("dim", format!("dimension must be 1 or 2, got {dim}")));
    }
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::invalid("kappa", "wavenumber must be positive"));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::invalid("h", "spacing must be positive"));
    }
    if n < 2 {
        return Err(Error::invalid("n", "need at least 2 nodes"));
    }
    let kh = kappa * h;
    if kh >= 1.0 {
        return Err(Error::Unresolved(format!(
            "kappa h = {kh:.3} >= 1: the grid does not resolve the wave"
        )));
    }
    Ok(match dim {
        1 => 0.5 * kh.powi(n as i32 - 1),
        _ => kh.powi(complete_degree(n) as i32),
    })
}

/// Default 1D sweep grid `10^(-2 + 4q/9)`, `q = 1..9`: log-spaced from the
/// flat limit to past the stable regime.
pub fn default_eps_grid_1d() -> Vec<f64> {
    (1..=9).map(|q| 10f64.powf(-2.0 + 4.0 * q as f64 / 9.0)).collect()
}

/// Default duct sweep grid: linear 3 to 14 in steps of 0.5, bracketing the
/// optimum of every node set used in the experiments.
pub fn default_eps_grid_duct() -> Vec<f64> {
    (0..=22).map(|q| 3.0 + 0.5 * q as f64).collect()
}

/// Relative max difference of two value sets on a shared grid, the measure
/// used when comparing against a reference solve.
pub fn relative_max_difference(coarse: &[Complex64], fine: &[Complex64]) -> Result<f64> {
    if coarse.len() != fine.len() || coarse.is_empty() {
        return Err(Error::invalid(
            "values",
            format!("need matching nonempty grids, got {} vs {}", coarse.len(), fine.len()),
        ));
    }
    let denom = fine.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    if denom == 0.0 {
        return Err(Error::invalid("fine", "reference values are identically zero"));
    }
    let num = coarse.iter().zip(fine).map(|(a, b)| (a - b).norm()).fold(0.0f64, f64::max);
    Ok(num / denom)
}
