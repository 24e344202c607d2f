//! Flat-limit classification of a problem / node-set pair.
//!
//! As the shape parameter tends to zero, the RBF approximant either settles
//! on a polynomial or blows up like `eps^-2`, depending on two ranks: that
//! of the Vandermonde-type matrix `P` (polynomial unisolvency of the nodes)
//! and of the collocation matrix `Q` built by applying each node's operator
//! to the same monomials (PDE unisolvency). This module constructs both
//! matrices over a graded monomial basis, classifies the four possible
//! outcomes, extracts the nullspace polynomials that control the degenerate
//! cases, and backs the classification up with a numeric probe that solves
//! the actual collocation system along a decreasing list of shape
//! parameters.
//!
//! The probe is deliberately crude: it uses the plain (unstable) basis, so
//! it can only walk down to moderately small `eps` before conditioning eats
//! the solve. That window is enough to expose the `eps^-2` growth of a
//! PDE-degenerate configuration and the bounded behavior of a healthy one.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::collocation::{solve, ProblemSpec, SolveOptions};
use crate::geometry::{eval_grid, NodeSet, Region, XorShift64};
use crate::kernels::{Family, Kernel};
use crate::linalg::{svd, CMatrix};
use crate::{Error, Result};

/// Monomials `x1^a x2^b` in graded order: degree ascending, and within a
/// degree decreasing `x1` exponent (`1, x1, x2, x1^2, x1 x2, x2^2, ...`).
/// One-dimensional bases hold plain powers of `x1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    d: usize,
    exps: Vec<(u32, u32)>,
}

impl MonomialBasis {
    /// The first `count` monomials in graded order.
    pub fn graded(d: usize, count: usize) -> MonomialBasis {
        let mut exps = Vec::with_capacity(count);
        let mut deg = 0u32;
        while exps.len() < count {
            match d {
                1 => exps.push((deg, 0)),
                _ => {
                    for e2 in 0..=deg {
                        if exps.len() == count {
                            break;
                        }
                        exps.push((deg - e2, e2));
                    }
                }
            }
            deg += 1;
        }
        MonomialBasis { d, exps }
    }

    /// A basis from explicit exponent tuples (used by `minimal_basis`).
    pub fn from_exponents(d: usize, exps: Vec<(u32, u32)>) -> MonomialBasis {
        MonomialBasis { d, exps }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self) -> &[(u32, u32)] {
        &self.exps
    }

    /// Total degree of the last (highest) member.
    pub fn degree(&self) -> usize {
        self.exps.last().map_or(0, |&(a, b)| (a + b) as usize)
    }

    /// Value of the `j`-th monomial at `x`.
    pub fn eval(&self, j: usize, x: [f64; 2]) -> f64 {
        let (a, b) = self.exps[j];
        x[0].powi(a as i32) * x[1].powi(b as i32)
    }

    /// Evaluates the polynomial with coefficients `coeffs` at `x`.
    pub fn eval_poly(&self, coeffs: &[Complex64], x: [f64; 2]) -> Complex64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * self.eval(j, x))
            .sum()
    }

    fn d1(&self, j: usize, x: [f64; 2], axis: usize) -> f64 {
        let (a, b) = self.exps[j];
        let e = if axis == 0 { a } else { b };
        if e == 0 {
            return 0.0;
        }
        let mut f = [a, b];
        f[axis] -= 1;
        e as f64 * x[0].powi(f[0] as i32) * x[1].powi(f[1] as i32)
    }

    fn laplacian(&self, j: usize, x: [f64; 2]) -> f64 {
        let (a, b) = self.exps[j];
        let mut out = 0.0;
        if a >= 2 {
            out += (a * (a - 1)) as f64 * x[0].powi(a as i32 - 2) * x[1].powi(b as i32);
        }
        if self.d == 2 && b >= 2 {
            out += (b * (b - 1)) as f64 * x[0].powi(a as i32) * x[1].powi(b as i32 - 2);
        }
        out
    }
}

/// `N_{K,d}`: dimension of polynomials of total degree at most `K` in `d`
/// variables, `C(K + d, d)`.
pub fn poly_dim(k: usize, d: usize) -> usize {
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 1..=d {
        num *= (k + i) as u128;
        den *= i as u128;
    }
    (num / den) as usize
}

/// The unique `K` with `N_{K-1,d} < N <= N_{K,d}`.
pub fn degree_for(n: usize, d: usize) -> usize {
    let mut k = 0;
    while poly_dim(k, d) < n {
        k += 1;
    }
    k
}

/// Vandermonde-type matrix `P_{ij} = p_j(x_i)`.
pub fn build_p(nodes: &NodeSet, basis: &MonomialBasis) -> CMatrix {
    let mut p = CMatrix::zeros(nodes.len(), basis.len());
    for (i, &x) in nodes.points.iter().enumerate() {
        for j in 0..basis.len() {
            p[(i, j)] = Complex64::new(basis.eval(j, x), 0.0);
        }
    }
    p
}

/// Collocation matrix on monomials: row `i` applies node `i`'s regional
/// operator to every basis member. Closed-form for the interval and
/// rectangle problems; the duct's nonlocal DtN rows are out of scope.
pub fn build_q(problem: &ProblemSpec, nodes: &NodeSet, basis: &MonomialBasis) -> Result<CMatrix> {
    let kappa = problem.kappa();
    let k2 = kappa * kappa;
    let beta = match problem {
        ProblemSpec::OneD { .. } => Complex64::new(kappa, 0.0),
        ProblemSpec::Rectangle { m, .. } => problem.modal_basis(0.0)?.beta(*m),
        ProblemSpec::Duct { .. } => {
            return Err(Error::invalid(
                "problem",
                "the duct's DtN rows have no closed form on monomials",
            ))
        }
    };
    let mut q = CMatrix::zeros(nodes.len(), basis.len());
    for (i, &x) in nodes.points.iter().enumerate() {
        for j in 0..basis.len() {
            let val = basis.eval(j, x);
            q[(i, j)] = match (problem, nodes.regions[i]) {
                (_, Region::Interior) => {
                    Complex64::new(-basis.laplacian(j, x) - k2 * val, 0.0)
                }
                (_, Region::Wall) => Complex64::new(val, 0.0),
                // Radiation rows: -d/dn - i ktrans, with ktrans = kappa in
                // 1D and beta_m for the rectangle's mode.
                (ProblemSpec::OneD { .. }, Region::Left) => {
                    Complex64::new(-basis.d1(j, x, 0), 0.0) - Complex64::i() * beta * val
                }
                (ProblemSpec::OneD { .. }, Region::Right) => {
                    Complex64::new(basis.d1(j, x, 0), 0.0) - Complex64::i() * beta * val
                }
                (ProblemSpec::Rectangle { .. }, Region::Left) => {
                    Complex64::new(-basis.d1(j, x, 1), 0.0) - Complex64::i() * beta * val
                }
                (ProblemSpec::Rectangle { .. }, Region::Right) => {
                    Complex64::new(basis.d1(j, x, 1), 0.0) - Complex64::i() * beta * val
                }
                (ProblemSpec::Duct { .. }, _) => unreachable!("rejected above"),
            };
        }
    }
    Ok(q)
}

/// Greedy minimal non-degenerate basis: scan monomials in graded order and
/// keep those that raise the numerical column rank of the growing `P`,
/// until `N` columns are kept. Returns the basis and the degree `M` of its
/// last member.
pub fn minimal_basis(nodes: &NodeSet) -> (MonomialBasis, usize) {
    let n = nodes.len();
    let d = nodes.dim;
    let mut kept: Vec<(u32, u32)> = Vec::with_capacity(n);
    let mut deg = 0u32;
    while kept.len() < n {
        let members: Vec<(u32, u32)> = match d {
            1 => vec![(deg, 0)],
            _ => (0..=deg).map(|e2| (deg - e2, e2)).collect(),
        };
        for e in members {
            if kept.len() == n {
                break;
            }
            kept.push(e);
            let basis = MonomialBasis::from_exponents(d, kept.clone());
            let p = build_p(nodes, &basis);
            let s = svd(&p);
            let tol = rank_tolerance(&s.sigma, n);
            if s.rank(tol) < kept.len() {
                kept.pop();
            }
        }
        deg += 1;
    }
    let basis = MonomialBasis::from_exponents(d, kept);
    let m = basis.degree();
    (basis, m)
}

/// Which of the four flat-limit outcomes applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitCase {
    /// Both matrices nonsingular: the limit exists, degree `K`.
    I,
    /// Only `P` singular: the limit exists, RBF-dependent, degree `M`.
    II,
    /// Only `Q` singular: divergence proportional to `eps^-2 n(x)`.
    III,
    /// Both singular: outcome depends on `m` vs `p`.
    IV,
}

impl LimitCase {
    pub fn label(self) -> &'static str {
        match self {
            LimitCase::I => "i",
            LimitCase::II => "ii",
            LimitCase::III => "iii",
            LimitCase::IV => "iv",
        }
    }
}

/// Ranks, nullspaces, and derived degrees for a problem / node-set pair.
#[derive(Debug, Clone)]
pub struct LimitReport {
    pub rank_p: usize,
    pub rank_q: usize,
    /// Nullspace polynomials of `P` over [`LimitReport::basis`], normalized
    /// so the largest coefficient is `1`.
    pub nullspace_p: Vec<Vec<Complex64>>,
    pub nullspace_q: Vec<Vec<Complex64>>,
    /// `dim null P`.
    pub m: usize,
    /// `dim null Q`.
    pub p: usize,
    /// Degree of the minimal non-degenerate basis.
    pub min_basis_degree: usize,
    /// Target degree `K` from the node count.
    pub target_degree: usize,
    pub case: LimitCase,
    /// Set when some singular value falls within a factor 10 of the rank
    /// tolerance, making the rank call unreliable.
    pub indeterminate: bool,
    /// The graded basis the coefficient vectors refer to.
    pub basis: MonomialBasis,
}

fn rank_tolerance(sigma: &[f64], n: usize) -> f64 {
    1e-10 * n as f64 * sigma.first().copied().unwrap_or(0.0)
}

fn normalize_null(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let mut lead = 0usize;
    for (j, c) in v.iter().enumerate() {
        if c.norm() > v[lead].norm() {
            lead = j;
        }
    }
    let scale = v[lead];
    if scale.norm() > 0.0 {
        for c in v.iter_mut() {
            *c /= scale;
        }
    }
    v
}

/// Classifies the flat limit of `problem` on `nodes` per the four cases.
pub fn classify(problem: &ProblemSpec, nodes: &NodeSet) -> Result<LimitReport> {
    let n = nodes.len();
    let d = nodes.dim;
    let basis = MonomialBasis::graded(d, n);
    let p_mat = build_p(nodes, &basis);
    let q_mat = build_q(problem, nodes, &basis)?;
    let sp = svd(&p_mat);
    let sq = svd(&q_mat);
    let tol_p = rank_tolerance(&sp.sigma, n);
    let tol_q = rank_tolerance(&sq.sigma, n);
    let rank_p = sp.rank(tol_p);
    let rank_q = sq.rank(tol_q);
    let borderline = |sigma: &[f64], tol: f64| {
        sigma.iter().any(|&s| s > tol / 10.0 && s < tol * 10.0)
    };
    let indeterminate = borderline(&sp.sigma, tol_p) || borderline(&sq.sigma, tol_q);
    let m = n - rank_p;
    let p = n - rank_q;
    let case = match (m > 0, p > 0) {
        (false, false) => LimitCase::I,
        (true, false) => LimitCase::II,
        (false, true) => LimitCase::III,
        (true, true) => LimitCase::IV,
    };
    let (_, min_basis_degree) = minimal_basis(nodes);
    Ok(LimitReport {
        rank_p,
        rank_q,
        nullspace_p: sp.nullspace(tol_p).into_iter().map(normalize_null).collect(),
        nullspace_q: sq.nullspace(tol_q).into_iter().map(normalize_null).collect(),
        m,
        p,
        min_basis_degree,
        target_degree: degree_for(n, d),
        case,
        indeterminate,
        basis,
    })
}

/// One shape-parameter sample of the divergence probe.
#[derive(Debug, Clone, Copy)]
pub struct ProbeSample {
    pub eps: f64,
    pub max_abs: f64,
    pub cond: f64,
}

/// Result of [`divergence_probe`]: fitted exponent of `max|s| ~ eps^slope`.
#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub slope: f64,
    pub samples: Vec<ProbeSample>,
}

/// Solves the collocation system along `eps_list` (decreasing), records the
/// largest `|s|` on a probe grid, and fits the growth exponent of
/// `log max|s|` against `log eps`. Solver failures shrink the fit set;
/// fewer than three usable samples is an error.
pub fn divergence_probe(
    problem: &ProblemSpec,
    nodes: &NodeSet,
    family: Family,
    eps_list: &[f64],
) -> Result<ProbeReport> {
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("eps_list", "shape parameters must decrease"));
    }
    let grid = match problem.domain().dim() {
        1 => eval_grid(&problem.domain(), 60, 1)?,
        _ => eval_grid(&problem.domain(), 20, 20)?,
    };
    let samples: Vec<ProbeSample> = eps_list
        .par_iter()
        .filter_map(|&eps| {
            let kernel = Kernel::new(family, eps).ok()?;
            let sol = solve(problem, nodes, kernel, Some(SolveOptions::default())).ok()?;
            let vals = sol.approximant.evaluate_many(&grid.points);
            let max_abs = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
            max_abs.is_finite().then_some(ProbeSample { eps, max_abs, cond: sol.cond })
        })
        .collect();
    if samples.len() < 3 {
        return Err(Error::Unresolved(format!(
            "only {} of {} probe solves usable",
            samples.len(),
            eps_list.len()
        )));
    }
    // Least-squares line through (log eps, log max|s|).
    let n = samples.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for s in &samples {
        let x = s.eps.ln();
        let y = s.max_abs.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    Ok(ProbeReport { slope, samples })
}

/// The wavenumber shared by the three degenerate-configuration fixtures.
pub fn fixture_kappa() -> f64 {
    4.0 * 246.0f64.sqrt() / 9.0
}

/// Built-in degenerate node configurations for the rectangle problem
/// (`example-ii`, `example-iii`, `example-iv`).
///
/// Each returns the problem (mode 1, unit width, wavenumber
/// [`fixture_kappa`]) and the ten-point node set exhibiting the named
/// degeneracy: `ii` is not polynomially unisolvent, `iii` is not
/// PDE-unisolvent at exactly this wavenumber, `iv` is degenerate for both
/// matrices.
pub fn fixture(name: &str) -> Result<(ProblemSpec, NodeSet)> {
    let points: Vec<[f64; 2]> = match name {
        "example-ii" => {
            let mut pts = vec![[0.5, 0.5], [1.0, 0.5]];
            for k in 0..4 {
                pts.push([k as f64 / 4.0, 0.0]);
            }
            for k in 0..4 {
                pts.push([k as f64 / 4.0, 1.0]);
            }
            pts
        }
        "example-iii" => {
            let s = 9233.0f64.sqrt();
            vec![
                [0.0, 0.0],
                [0.5, 0.0],
                [1.0, 0.0],
                [0.0, 1.0],
                [0.25, 1.0],
                [1.0, 1.0],
                [1.0 / 6.0, (2545.0 - 23.0 * s) / 3936.0],
                [0.25, 0.25],
                [0.75, 0.25],
                [0.75, 969.0 / 1804.0],
            ]
        }
        "example-iv" => {
            let mut pts = vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];
            for k in 0..=5 {
                pts.push([0.5, k as f64 / 5.0]);
            }
            pts
        }
        other => {
            return Err(Error::invalid(
                "fixture",
                format!("unknown fixture {other:?}; expected example-ii/iii/iv"),
            ))
        }
    };
    let regions = points.iter().map(|&p| rectangle_region(p)).collect();
    let nodes = NodeSet::from_parts(2, points, regions, 0.25, 0.25)?;
    let problem = ProblemSpec::rectangle(fixture_kappa(), 1, 1.0)?;
    Ok((problem, nodes))
}

/// Region of a point on the closed unit square, Dirichlet walls winning at
/// corners.
pub fn rectangle_region(p: [f64; 2]) -> Region {
    if p[0].abs() <= 1e-12 || (p[0] - 1.0).abs() <= 1e-12 {
        Region::Wall
    } else if p[1].abs() <= 1e-12 {
        Region::Left
    } else if (p[1] - 1.0).abs() <= 1e-12 {
        Region::Right
    } else {
        Region::Interior
    }
}

/// Generic (perturbed-grid) ten-point set on the unit square; unisolvent
/// with probability one, used as the healthy counterpart of the fixtures.
pub fn generic_ten_points(seed: u64) -> Result<NodeSet> {
    let mut rng = XorShift64::new(seed);
    let raw = [
        [0.0, 0.0],
        [1.0, 0.0],
        [0.0, 1.0],
        [1.0, 1.0],
        [0.4, 0.0],
        [0.6, 1.0],
        [0.3, 0.4],
        [0.7, 0.3],
        [0.5, 0.6],
        [0.2, 0.7],
    ];
    let points: Vec<[f64; 2]> = raw
        .iter()
        .map(|&[a, b]| {
            // Jitter only coordinates that are free to move without leaving
            // the region assignment.
            let x = if a == 0.0 || a == 1.0 { a } else { (a + rng.pm(0.08)).clamp(0.05, 0.95) };
            let y = if b == 0.0 || b == 1.0 { b } else { (b + rng.pm(0.08)).clamp(0.05, 0.95) };
            [x, y]
        })
        .collect();
    let regions = points.iter().map(|&p| rectangle_region(p)).collect();
    NodeSet::from_parts(2, points, regions, 0.25, 0.25)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::nodes_interval;
    use crate::linalg::LuFactors;
    use std::f64::consts::PI;

    fn example(name: &str) -> (ProblemSpec, NodeSet, LimitReport) {
        let (problem, nodes) = fixture(name).unwrap();
        let report = classify(&problem, &nodes).unwrap();
        (problem, nodes, report)
    }

    #[test]
    fn poly_dims_and_degrees() {
        assert_eq!(poly_dim(3, 2), 10);
        assert_eq!(poly_dim(0, 2), 1);
        assert_eq!(poly_dim(4, 1), 5);
        assert_eq!(degree_for(10, 2), 3);
        // N = 7 sits strictly between N_{2,2} = 6 and N_{3,2} = 10; the
        // defining inequality picks 3 (a closed-form floor formula that is
        // sometimes quoted gives 2 here).
        assert_eq!(degree_for(7, 2), 3);
        assert_eq!(degree_for(1, 2), 0);
        assert_eq!(degree_for(6, 2), 2);
        for n in 1..40 {
            let k = degree_for(n, 2);
            assert!(poly_dim(k, 2) >= n);
            assert!(k == 0 || poly_dim(k - 1, 2) < n);
        }
        // 1D: K = N - 1 always.
        for n in 1..10 {
            assert_eq!(degree_for(n, 1), n - 1);
        }
    }

    #[test]
    fn graded_order_is_the_documented_one() {
        let b = MonomialBasis::graded(2, 7);
        assert_eq!(
            b.exponents(),
            &[(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0)]
        );
        let b1 = MonomialBasis::graded(1, 4);
        assert_eq!(b1.exponents(), &[(0, 0), (1, 0), (2, 0), (3, 0)]);
    }

    #[test]
    fn vandermonde_on_three_points() {
        let nodes = nodes_interval(3).unwrap();
        let basis = MonomialBasis::graded(1, 3);
        let p = build_p(&nodes, &basis);
        let want = [[1.0, 0.0, 0.0], [1.0, 0.5, 0.25], [1.0, 1.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((p[(i, j)].re - want[i][j]).abs() <= 1e-15);
                assert_eq!(p[(i, j)].im, 0.0);
            }
        }
        let det = LuFactors::factor(&p).unwrap().det();
        assert!((det - Complex64::new(0.25, 0.0)).norm() <= 1e-14);
    }

    #[test]
    fn example_ii_is_polynomially_degenerate() {
        let (_, nodes, report) = example("example-ii");
        assert_eq!(report.case, LimitCase::II);
        assert_eq!(report.rank_p, 9);
        assert_eq!(report.m, 1);
        assert_eq!(report.p, 0);
        assert!(!report.indeterminate);
        assert_eq!(report.target_degree, 3);

        // Nullspace must be a multiple of x2 (x2 - 1/2)(x2 - 1).
        let null = &report.nullspace_p[0];
        let reference = |x: [f64; 2]| x[1] * (x[1] - 0.5) * (x[1] - 1.0);
        let mut rng = XorShift64::new(7);
        // Fix the scale at one probe point, then compare at 20 random ones.
        let x0 = [0.3, 0.7];
        let scale = report.basis.eval_poly(null, x0) / reference(x0);
        for _ in 0..20 {
            let x = [rng.next_f64(), rng.next_f64()];
            let got = report.basis.eval_poly(null, x);
            let want = scale * reference(x);
            assert!(
                (got - want).norm() <= 1e-8 * scale.norm().max(1.0),
                "nullspace mismatch at {x:?}: {got} vs {want}"
            );
        }

        let (basis, m) = minimal_basis(&nodes);
        assert_eq!(m, 4);
        assert_eq!(report.min_basis_degree, 4);
        // The degree-3 slot skips x2^3 (dependent through the nullspace);
        // x1^4 is also dependent on this grid (P's determinant collapses to
        // rounding noise with it), so the first repairing monomial is
        // x1^3 x2.
        assert_eq!(
            basis.exponents(),
            &[
                (0, 0),
                (1, 0),
                (0, 1),
                (2, 0),
                (1, 1),
                (0, 2),
                (3, 0),
                (2, 1),
                (1, 2),
                (3, 1)
            ]
        );
    }

    #[test]
    fn example_iii_is_pde_degenerate_at_the_magic_wavenumber() {
        let (_, _, report) = example("example-iii");
        assert_eq!(report.case, LimitCase::III);
        assert_eq!(report.rank_p, 10);
        assert_eq!(report.rank_q, 9);
        assert!(!report.indeterminate);

        // Nullspace polynomial: (1/2)x1 - (5/32)x2 - (3/2)x1^2
        // + (3/16)x1x2 + (5/32)x2^2 + x1^3 + (1/4)x1^2x2 - (7/16)x1x2^2.
        let reference = |x: [f64; 2]| {
            0.5 * x[0] - 5.0 / 32.0 * x[1] - 1.5 * x[0] * x[0]
                + 3.0 / 16.0 * x[0] * x[1]
                + 5.0 / 32.0 * x[1] * x[1]
                + x[0] * x[0] * x[0]
                + 0.25 * x[0] * x[0] * x[1]
                - 7.0 / 16.0 * x[0] * x[1] * x[1]
        };
        let null = &report.nullspace_q[0];
        let x0 = [0.4, 0.8];
        let scale = report.basis.eval_poly(null, x0) / reference(x0);
        let mut rng = XorShift64::new(3);
        for _ in 0..20 {
            let x = [rng.next_f64(), rng.next_f64()];
            let got = report.basis.eval_poly(null, x);
            let want = scale * reference(x);
            assert!(
                (got - want).norm() <= 1e-7 * scale.norm().max(1.0),
                "Q nullspace mismatch at {x:?}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn example_iii_wavenumber_shift_restores_unisolvency() {
        let (_, nodes) = fixture("example-iii").unwrap();
        let shifted = ProblemSpec::rectangle(fixture_kappa() + 1e-3, 1, 1.0).unwrap();
        let report = classify(&shifted, &nodes).unwrap();
        assert_eq!(report.case, LimitCase::I);
        assert_eq!(report.rank_q, 10);
    }

    #[test]
    fn example_iv_has_a_common_two_dimensional_nullspace() {
        let (_, _nodes, report) = example("example-iv");
        assert_eq!(report.case, LimitCase::IV);
        assert_eq!(report.m, 2);
        assert_eq!(report.p, 2);
        assert_eq!(report.min_basis_degree, 5);

        // Both q1 = x1(x1-1/2)(x1-1) and q2 = x2(x1-1/2)(x2-1) must lie in
        // the span of the computed nullspaces (for P and Q alike).
        let coeffs = |f: &dyn Fn([f64; 2]) -> f64| {
            // Fit the 10 graded-basis coefficients by sampling; the fit is
            // exact because both polynomials have degree 3.
            let mut rng = XorShift64::new(11);
            let pts: Vec<[f64; 2]> = (0..10).map(|_| [rng.next_f64(), rng.next_f64()]).collect();
            let basis = MonomialBasis::graded(2, 10);
            let mut a = CMatrix::zeros(10, 10);
            for (i, &x) in pts.iter().enumerate() {
                for j in 0..10 {
                    a[(i, j)] = Complex64::new(basis.eval(j, x), 0.0);
                }
            }
            let rhs: Vec<Complex64> =
                pts.iter().map(|&x| Complex64::new(f(x), 0.0)).collect();
            LuFactors::factor(&a).unwrap().solve(&rhs)
        };
        let q1 = coeffs(&|x| x[0] * (x[0] - 0.5) * (x[0] - 1.0));
        let q2 = coeffs(&|x| x[1] * (x[0] - 0.5) * (x[1] - 1.0));
        for null in [&report.nullspace_p, &report.nullspace_q] {
            for target in [&q1, &q2] {
                // Residual after projecting the target onto the span.
                let mut resid: Vec<Complex64> = target.clone();
                for b in null.iter() {
                    let norm2: f64 = b.iter().map(|c| c.norm_sqr()).sum();
                    let inner: Complex64 =
                        b.iter().zip(resid.iter()).map(|(bi, ri)| bi.conj() * ri).sum();
                    for (ri, bi) in resid.iter_mut().zip(b.iter()) {
                        *ri -= inner / norm2 * bi;
                    }
                }
                let rn: f64 = resid.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                let tn: f64 = target.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                assert!(rn <= 1e-8 * tn, "projection residual {rn:.3e}");
            }
        }
    }

    #[test]
    fn generic_set_is_case_i_with_minimal_graded_basis() {
        let nodes = generic_ten_points(42).unwrap();
        let problem = ProblemSpec::rectangle(2.2 * PI, 1, 1.0).unwrap();
        let report = classify(&problem, &nodes).unwrap();
        assert_eq!(report.case, LimitCase::I);
        assert_eq!(report.rank_p, 10);
        assert_eq!(report.rank_q, 10);
        let (basis, m) = minimal_basis(&nodes);
        assert_eq!(m, 3);
        assert_eq!(basis.exponents(), MonomialBasis::graded(2, 10).exponents());
        assert_eq!(report.min_basis_degree, degree_for(10, 2));
    }

    #[test]
    fn collinear_points_need_pure_powers() {
        let points: Vec<[f64; 2]> =
            (0..5).map(|k| [k as f64 / 4.0, k as f64 / 4.0]).collect();
        let regions = vec![Region::Interior; 5];
        let nodes = NodeSet::from_parts(2, points, regions, 0.25, 0.25).unwrap();
        let (basis, m) = minimal_basis(&nodes);
        assert_eq!(m, 4);
        assert_eq!(basis.exponents(), &[(0, 0), (1, 0), (2, 0), (3, 0), (4, 0)]);
    }

    #[test]
    fn classification_survives_permutation_and_p_rank_translation() {
        let (problem, nodes, report) = example("example-ii");
        let mut permuted_points = nodes.points.clone();
        let mut permuted_regions = nodes.regions.clone();
        permuted_points.reverse();
        permuted_regions.reverse();
        let permuted =
            NodeSet::from_parts(2, permuted_points, permuted_regions, 0.25, 0.25).unwrap();
        let report_p = classify(&problem, &permuted).unwrap();
        assert_eq!(report_p.case, report.case);
        assert_eq!(report_p.rank_p, report.rank_p);
        assert_eq!(report_p.rank_q, report.rank_q);

        // P-rank is purely geometric: translating every node keeps it.
        let shifted: Vec<[f64; 2]> =
            nodes.points.iter().map(|&[a, b]| [a + 0.37, b - 0.21]).collect();
        let shifted_nodes =
            NodeSet::from_parts(2, shifted, nodes.regions.clone(), 0.25, 0.25).unwrap();
        let basis = MonomialBasis::graded(2, 10);
        let s = svd(&build_p(&shifted_nodes, &basis));
        assert_eq!(s.rank(rank_tolerance(&s.sigma, 10)), report.rank_p);
    }

    #[test]
    fn probe_diverges_on_example_iii_and_stays_bounded_on_healthy_sets() {
        let eps_list = [0.5, 0.35, 0.25, 0.18, 0.125];
        let (problem, nodes) = fixture("example-iii").unwrap();
        let probe =
            divergence_probe(&problem, &nodes, Family::Multiquadric, &eps_list).unwrap();
        assert!(
            (probe.slope + 2.0).abs() <= 0.3,
            "example-iii slope {} not in -2 +- 0.3",
            probe.slope
        );

        // Healthy configuration of the same problem: bounded limit, flat
        // profile across the whole window.
        let rect = ProblemSpec::rectangle(2.2 * PI, 1, 1.0).unwrap();
        let generic = generic_ten_points(42).unwrap();
        let flat =
            divergence_probe(&rect, &generic, Family::Multiquadric, &eps_list).unwrap();
        assert!(flat.slope.abs() <= 0.3, "healthy slope {}", flat.slope);
        assert!(flat.samples.iter().all(|s| s.max_abs < 10.0));
    }

    #[test]
    fn probe_rejects_bad_eps_lists() {
        let (problem, nodes) = fixture("example-iii").unwrap();
        assert!(divergence_probe(&problem, &nodes, Family::Multiquadric, &[0.2, 0.3]).is_err());
    }

    #[test]
    fn duct_q_is_rejected() {
        let problem =
            ProblemSpec::duct(6.0 * PI, 0.3, crate::geometry::Domain::duct_m()).unwrap();
        let nodes = crate::geometry::nodes_waveguide(6, 7, &problem.domain(), 1).unwrap();
        let basis = MonomialBasis::graded(2, nodes.len());
        assert!(build_q(&problem, &nodes, &basis).is_err());
    }
}
