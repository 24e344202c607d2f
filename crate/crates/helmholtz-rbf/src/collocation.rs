//! Problem definitions, operator application, system assembly, and solving.
//!
//! The solver collocates the Helmholtz operator and its boundary conditions
//! on a tagged node set: interior nodes carry the PDE row `-lap(u) - k^2 u`,
//! the `x2 = 0` and `x2 = 1` boundaries carry radiation (impedance, modal,
//! or DtN) rows, and curved walls carry Dirichlet rows. Assembly produces a
//! dense complex system solved by LU; the result is packaged with its
//! condition estimate so callers can judge how far into the ill-conditioned
//! regime a given shape parameter has pushed the basis.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::geometry::{Domain, NodeSet, Region};
use crate::kernels::{dist, Kernel};
use crate::linalg::{cond_estimate, CMatrix, LuFactors};
use crate::quadrature;
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Transverse mode data of a waveguide cross-section.
///
/// Modes are `psi_m(x1) = sqrt(2) sin(m pi (x1 - lo)/w)`; the horizontal
/// wavenumber of mode `m` is `beta_m = sqrt(kappa^2 - alpha_m^2)` on the
/// branch with `Im beta_m >= 0`, so propagating modes (`m <= mu`) carry
/// real `beta_m >= 0` and evanescent modes decay.
#[derive(Debug, Clone)]
pub struct ModalBasis {
    kappa: f64,
    x2: f64,
    lo: f64,
    width: f64,
    mu: usize,
}

impl ModalBasis {
    pub fn new(kappa: f64, x2: f64, domain: &Domain) -> Result<ModalBasis> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::invalid("kappa", format!("wavenumber must be positive, got {kappa}")));
        }
        let (lo, _hi, width) = domain.section(x2)?;
        let mu = (kappa * width / PI).floor() as usize;
        Ok(ModalBasis { kappa, x2, lo, width, mu })
    }

    pub fn x2(&self) -> f64 {
        self.x2
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Number of propagating modes.
    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn alpha(&self, m: usize) -> f64 {
        m as f64 * PI / self.width
    }

    pub fn beta(&self, m: usize) -> Complex64 {
        let a = self.alpha(m);
        let d = self.kappa * self.kappa - a * a;
        if d >= 0.0 {
            Complex64::new(d.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-d).sqrt())
        }
    }

    pub fn psi(&self, m: usize, x1: f64) -> f64 {
        std::f64::consts::SQRT_2 * (self.alpha(m) * (x1 - self.lo)).sin()
    }
}

/// One of the three model problems.
#[derive(Debug, Clone)]
pub enum ProblemSpec {
    /// `-u'' - k^2 u = 0` on `(0, 1)` with impedance radiation conditions
    /// `-u'(0) - i k u(0) = -2ik` and `u'(1) - i k u(1) = 0`; the exact
    /// solution is `exp(i k x)`.
    OneD { kappa: f64 },
    /// Rectangle `(0, width) x (0, 1)`, sound-soft walls, single-mode
    /// radiation conditions for mode `m`; exact solution
    /// `exp(i beta_m x2) sin(alpha_m x1)`.
    Rectangle { kappa: f64, m: usize, width: f64 },
    /// Curved duct with full DtN radiation conditions at `x2 = 0, 1`,
    /// driven by a point source at `(x_s, 0)` expanded over the
    /// propagating modes.
    Duct { kappa: f64, x_s: f64, domain: Domain },
}

impl ProblemSpec {
    /// The interval problem. Panics if `kappa` is not a positive finite
    /// number; use the richer constructors for fallible setup.
    pub fn one_d(kappa: f64) -> ProblemSpec {
        assert!(kappa.is_finite() && kappa > 0.0, "wavenumber must be positive");
        ProblemSpec::OneD { kappa }
    }

    pub fn rectangle(kappa: f64, m: usize, width: f64) -> Result<ProblemSpec> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::invalid("kappa", format!("wavenumber must be positive, got {kappa}")));
        }
        if m == 0 {
            return Err(Error::invalid("m", "mode index must be >= 1"));
        }
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::invalid("width", format!("width must be positive, got {width}")));
        }
        let alpha = m as f64 * PI / width;
        let d = kappa * kappa - alpha * alpha;
        if d.abs() <= 1e-10 * (kappa * kappa).max(1.0) {
            return Err(Error::invalid(
                "m",
                format!("mode {m} is at cut-off (beta_m = 0) for kappa = {kappa}"),
            ));
        }
        Ok(ProblemSpec::Rectangle { kappa, m, width })
    }

    pub fn duct(kappa: f64, x_s: f64, domain: Domain) -> Result<ProblemSpec> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::invalid("kappa", format!("wavenumber must be positive, got {kappa}")));
        }
        let (lo, hi, _w) = domain.section(0.0)?;
        if !(x_s > lo && x_s < hi) {
            return Err(Error::invalid(
                "x_s",
                format!("source abscissa {x_s} outside the inlet section ({lo}, {hi})"),
            ));
        }
        Ok(ProblemSpec::Duct { kappa, x_s, domain })
    }

    pub fn kappa(&self) -> f64 {
        match self {
            ProblemSpec::OneD { kappa }
            | ProblemSpec::Rectangle { kappa, .. }
            | ProblemSpec::Duct { kappa, .. } => *kappa,
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            ProblemSpec::OneD { .. } => Domain::Interval,
            ProblemSpec::Rectangle { width, .. } => Domain::Rectangle { width: *width },
            ProblemSpec::Duct { domain, .. } => domain.clone(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ProblemSpec::OneD { .. } => "1d",
            ProblemSpec::Rectangle { .. } => "rect",
            ProblemSpec::Duct { .. } => "duct",
        }
    }

    /// Modal basis of the cross-section at `x2` (2D problems only).
    pub fn modal_basis(&self, x2: f64) -> Result<ModalBasis> {
        ModalBasis::new(self.kappa(), x2, &self.domain())
    }

    /// Exact solution where one is known (interval and rectangle problems).
    pub fn exact_solution(&self, p: [f64; 2]) -> Option<Complex64> {
        match self {
            ProblemSpec::OneD { kappa } => Some((I * *kappa * p[0]).exp()),
            ProblemSpec::Rectangle { kappa, m, width } => {
                let alpha = *m as f64 * PI / width;
                let d = kappa * kappa - alpha * alpha;
                let beta = if d >= 0.0 {
                    Complex64::new(d.sqrt(), 0.0)
                } else {
                    Complex64::new(0.0, (-d).sqrt())
                };
                Some((I * beta * p[1]).exp() * (alpha * p[0]).sin())
            }
            ProblemSpec::Duct { .. } => None,
        }
    }
}

/// Per-station DtN data: the modal basis and the cached inner products
/// `<phi_j(., x2), psi_m>` for every center `j` and propagating mode `m`.
struct DtnStation {
    basis: ModalBasis,
    /// `inner[j][m - 1]`.
    inner: Vec<Vec<Complex64>>,
    converged: bool,
}

fn dtn_station(
    kernel: Kernel,
    kappa: f64,
    domain: &Domain,
    centers: &[[f64; 2]],
    x2: f64,
    quad_tol: f64,
) -> Result<DtnStation> {
    let basis = ModalBasis::new(kappa, x2, domain)?;
    let mu = basis.mu();
    if mu == 0 {
        return Ok(DtnStation { basis, inner: vec![Vec::new(); centers.len()], converged: true });
    }
    let lo = basis.lo();
    let hi = lo + basis.width();
    let per_center: Vec<Result<(Vec<Complex64>, bool)>> = centers
        .par_iter()
        .map(|&c| {
            let r = quadrature::integrate_vec(
                |x1, out| {
                    let phi = kernel.eval(dist([x1, x2], c));
                    for m in 1..=mu {
                        out[m - 1] = Complex64::new(phi * basis.psi(m, x1), 0.0);
                    }
                },
                mu,
                lo,
                hi,
                quad_tol,
            )?;
            Ok((r.value, r.converged))
        })
        .collect();
    let mut inner = Vec::with_capacity(centers.len());
    let mut converged = true;
    for r in per_center {
        let (v, ok) = r?;
        converged &= ok;
        inner.push(v);
    }
    Ok(DtnStation { basis, inner, converged })
}

/// DtN row value at `point` for a single kernel center, with the modal inner
/// products already available.
fn dtn_entry(
    kernel: Kernel,
    station: &DtnStation,
    inner: &[Complex64],
    right: bool,
    point: [f64; 2],
    center: [f64; 2],
) -> Complex64 {
    let g = kernel.grad(point, center);
    let sign = if right { 1.0 } else { -1.0 };
    let mut v = Complex64::new(sign * g[1], 0.0);
    for m in 1..=station.basis.mu() {
        v -= I * station.basis.beta(m) * inner[m - 1] * station.basis.psi(m, point[0]);
    }
    v
}

/// Applies the operator of `region` to the kernel centered at `center`,
/// evaluated at `point`. DtN rows integrate their modal inner products on
/// the fly at tolerance `quad_tol`; assembly uses a cached equivalent.
pub fn apply_operator(
    problem: &ProblemSpec,
    region: Region,
    kernel: Kernel,
    center: [f64; 2],
    point: [f64; 2],
    quad_tol: f64,
) -> Result<Complex64> {
    let kappa = problem.kappa();
    match (problem, region) {
        (_, Region::Interior) => {
            let dim = problem.domain().dim();
            let r = dist(point, center);
            Ok(Complex64::new(-kernel.laplacian(r, dim) - kappa * kappa * kernel.eval(r), 0.0))
        }
        (ProblemSpec::OneD { .. }, Region::Left) => {
            let d = kernel.derivs_1d(point[0], center[0]);
            Ok(Complex64::new(-d[1], -kappa * d[0]))
        }
        (ProblemSpec::OneD { .. }, Region::Right) => {
            let d = kernel.derivs_1d(point[0], center[0]);
            Ok(Complex64::new(d[1], -kappa * d[0]))
        }
        (ProblemSpec::OneD { .. }, Region::Wall) => {
            Err(Error::invalid("region", "the interval problem has no wall nodes"))
        }
        (ProblemSpec::Rectangle { .. } | ProblemSpec::Duct { .. }, Region::Wall) => {
            Ok(Complex64::new(kernel.eval(dist(point, center)), 0.0))
        }
        (ProblemSpec::Rectangle { m, .. }, Region::Left | Region::Right) => {
            let basis = problem.modal_basis(point[1])?;
            let beta = basis.beta(*m);
            let g = kernel.grad(point, center);
            let sign = if region == Region::Right { 1.0 } else { -1.0 };
            let phi = kernel.eval(dist(point, center));
            Ok(Complex64::new(sign * g[1], 0.0) - I * beta * phi)
        }
        (ProblemSpec::Duct { domain, .. }, Region::Left | Region::Right) => {
            let x2 = if region == Region::Right { 1.0 } else { 0.0 };
            let station = dtn_station(kernel, kappa, domain, &[center], x2, quad_tol)?;
            Ok(dtn_entry(kernel, &station, &station.inner[0], region == Region::Right, point, center))
        }
    }
}

/// An assembled collocation system.
#[derive(Debug)]
pub struct Assembly {
    pub matrix: CMatrix,
    pub rhs: Vec<Complex64>,
    pub warnings: Vec<String>,
}

fn check_compatible(problem: &ProblemSpec, nodes: &NodeSet) -> Result<()> {
    let dim = problem.domain().dim();
    if nodes.dim != dim {
        return Err(Error::invalid(
            "nodes",
            format!("problem is {dim}-dimensional but nodes have dim {}", nodes.dim),
        ));
    }
    if dim == 1 && nodes.regions.iter().any(|&r| r == Region::Wall) {
        return Err(Error::invalid("nodes", "interval node sets cannot contain wall nodes"));
    }
    if nodes.is_empty() {
        return Err(Error::invalid("nodes", "empty node set"));
    }
    Ok(())
}

/// Assembles the non-symmetric collocation system: row `i` applies the
/// operator of node `i`'s region to every kernel, and the right-hand side
/// stacks the boundary data by region.
pub fn assemble_nonsymmetric(
    problem: &ProblemSpec,
    nodes: &NodeSet,
    kernel: Kernel,
    quad_tol: f64,
) -> Result<Assembly> {
    check_compatible(problem, nodes)?;
    let kappa = problem.kappa();
    let n = nodes.len();
    let pts = &nodes.points;
    let mut warnings = Vec::new();

    // DtN inner products are shared by every boundary row of a station, so
    // they are batched up-front (one adaptive pass per center).
    let stations = if let ProblemSpec::Duct { domain, .. } = problem {
        let s0 = dtn_station(kernel, kappa, domain, pts, 0.0, quad_tol)?;
        let s1 = dtn_station(kernel, kappa, domain, pts, 1.0, quad_tol)?;
        for (s, name) in [(&s0, "x2 = 0"), (&s1, "x2 = 1")] {
            if !s.converged {
                warnings.push(format!("DtN quadrature hit the depth limit at station {name}"));
            }
        }
        Some((s0, s1))
    } else {
        None
    };

    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let p = pts[i];
            let mut row = Vec::with_capacity(n);
            match (nodes.regions[i], problem, &stations) {
                (Region::Interior, _, _) => {
                    let dim = nodes.dim;
                    for &c in pts {
                        let r = dist(p, c);
                        row.push(Complex64::new(
                            -kernel.laplacian(r, dim) - kappa * kappa * kernel.eval(r),
                            0.0,
                        ));
                    }
                }
                (Region::Left, ProblemSpec::OneD { .. }, _) => {
                    for &c in pts {
                        let d = kernel.derivs_1d(p[0], c[0]);
                        row.push(Complex64::new(-d[1], -kappa * d[0]));
                    }
                }
                (Region::Right, ProblemSpec::OneD { .. }, _) => {
                    for &c in pts {
                        let d = kernel.derivs_1d(p[0], c[0]);
                        row.push(Complex64::new(d[1], -kappa * d[0]));
                    }
                }
                (Region::Wall, _, _) => {
                    for &c in pts {
                        row.push(Complex64::new(kernel.eval(dist(p, c)), 0.0));
                    }
                }
                (reg @ (Region::Left | Region::Right), ProblemSpec::Rectangle { m, width, .. }, _) => {
                    let alpha = *m as f64 * PI / width;
                    let d = kappa * kappa - alpha * alpha;
                    let beta = if d >= 0.0 {
                        Complex64::new(d.sqrt(), 0.0)
                    } else {
                        Complex64::new(0.0, (-d).sqrt())
                    };
                    let sign = if reg == Region::Right { 1.0 } else { -1.0 };
                    for &c in pts {
                        let g = kernel.grad(p, c);
                        let phi = kernel.eval(dist(p, c));
                        row.push(Complex64::new(sign * g[1], 0.0) - I * beta * phi);
                    }
                }
                (reg @ (Region::Left | Region::Right), ProblemSpec::Duct { .. }, Some((s0, s1))) => {
                    let right = reg == Region::Right;
                    let s = if right { s1 } else { s0 };
                    for (j, &c) in pts.iter().enumerate() {
                        row.push(dtn_entry(kernel, s, &s.inner[j], right, p, c));
                    }
                }
                _ => unreachable!("region/problem mismatch survived validation"),
            }
            row
        })
        .collect();

    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        if nodes.regions[i] != Region::Left {
            continue;
        }
        rhs[i] = match (problem, &stations) {
            (ProblemSpec::OneD { .. }, _) => Complex64::new(0.0, -2.0 * kappa),
            (ProblemSpec::Rectangle { m, width, .. }, _) => {
                let alpha = *m as f64 * PI / width;
                let d = kappa * kappa - alpha * alpha;
                let beta = if d >= 0.0 {
                    Complex64::new(d.sqrt(), 0.0)
                } else {
                    Complex64::new(0.0, (-d).sqrt())
                };
                -2.0 * I * beta * (alpha * pts[i][0]).sin()
            }
            (ProblemSpec::Duct { x_s, .. }, Some((s0, _))) => {
                let mut f = Complex64::new(0.0, 0.0);
                for m in 1..=s0.basis.mu() {
                    let a_m = s0.basis.psi(m, *x_s);
                    f -= 2.0 * I * a_m * s0.basis.beta(m) * s0.basis.psi(m, pts[i][0]);
                }
                f
            }
            _ => unreachable!(),
        };
    }

    Ok(Assembly { matrix: CMatrix::from_rows(&rows), rhs, warnings })
}

/// Hermitian 1D collocation: `H[i][j] = L_x^{r_i} conj(L_xi^{r_j}) phi` at
/// `(x_i, x_j)` for the interval operators.
fn symmetric_block(kernel: Kernel, kappa: f64, ri: Region, rj: Region, xi: f64, xj: f64) -> Complex64 {
    let f = kernel.derivs_1d(xi, xj);
    let k2 = kappa * kappa;
    let bc = Complex64::new(0.0, kappa * (f[2] + k2 * f[0]));
    match (ri, rj) {
        (Region::Interior, Region::Interior) => {
            Complex64::new(f[4] + 2.0 * k2 * f[2] + k2 * k2 * f[0], 0.0)
        }
        (Region::Interior, Region::Left) => Complex64::new(-f[3] - k2 * f[1], 0.0) - bc,
        (Region::Interior, Region::Right) => Complex64::new(f[3] + k2 * f[1], 0.0) - bc,
        (Region::Left, Region::Interior) => Complex64::new(f[3] + k2 * f[1], 0.0) + bc,
        (Region::Right, Region::Interior) => Complex64::new(-f[3] - k2 * f[1], 0.0) + bc,
        (Region::Left, Region::Left) => Complex64::new(-f[2] + k2 * f[0], -2.0 * kappa * f[1]),
        (Region::Right, Region::Right) => Complex64::new(-f[2] + k2 * f[0], 2.0 * kappa * f[1]),
        (Region::Left, Region::Right) | (Region::Right, Region::Left) => {
            Complex64::new(f[2] + k2 * f[0], 0.0)
        }
        _ => unreachable!("wall regions do not occur in 1D"),
    }
}

/// Basis functional `conj(L_xi^{r_j}) phi(x, xi)` at `xi = x_j`, the trial
/// function attached to node `j` in the symmetric ansatz.
fn symmetric_trial(kernel: Kernel, kappa: f64, rj: Region, x: f64, xj: f64) -> Complex64 {
    let f = kernel.derivs_1d(x, xj);
    let k2 = kappa * kappa;
    match rj {
        Region::Interior => Complex64::new(-f[2] - k2 * f[0], 0.0),
        Region::Left => Complex64::new(f[1], kappa * f[0]),
        Region::Right => Complex64::new(-f[1], kappa * f[0]),
        Region::Wall => unreachable!("wall regions do not occur in 1D"),
    }
}

/// Assembles the symmetric (Hermitian) collocation system for the interval
/// problem.
pub fn assemble_symmetric_1d(
    problem: &ProblemSpec,
    nodes: &NodeSet,
    kernel: Kernel,
) -> Result<Assembly> {
    let ProblemSpec::OneD { kappa } = *problem else {
        return Err(Error::invalid("problem", "symmetric collocation is implemented in 1D only"));
    };
    check_compatible(problem, nodes)?;
    let n = nodes.len();
    let rows: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    symmetric_block(
                        kernel,
                        kappa,
                        nodes.regions[i],
                        nodes.regions[j],
                        nodes.points[i][0],
                        nodes.points[j][0],
                    )
                })
                .collect()
        })
        .collect();
    let rhs = nodes
        .regions
        .iter()
        .map(|&r| {
            if r == Region::Left {
                Complex64::new(0.0, -2.0 * kappa)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(Assembly { matrix: CMatrix::from_rows(&rows), rhs, warnings: Vec::new() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Form {
    Plain,
    SymmetricOneD,
}

/// An RBF approximant `s(x)`: kernel, centers, and coefficients.
#[derive(Debug, Clone)]
pub struct Approximant {
    kernel: Kernel,
    centers: NodeSet,
    lambda: Vec<Complex64>,
    kappa: f64,
    form: Form,
}

impl Approximant {
    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn centers(&self) -> &NodeSet {
        &self.centers
    }

    pub fn lambda(&self) -> &[Complex64] {
        &self.lambda
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn evaluate(&self, p: &[f64; 2]) -> Complex64 {
        match self.form {
            Form::Plain => self
                .centers
                .points
                .iter()
                .zip(&self.lambda)
                .map(|(&c, l)| l * self.kernel.eval(dist(*p, c)))
                .sum(),
            Form::SymmetricOneD => self
                .centers
                .points
                .iter()
                .zip(self.centers.regions.iter())
                .zip(&self.lambda)
                .map(|((&c, &rj), l)| l * symmetric_trial(self.kernel, self.kappa, rj, p[0], c[0]))
                .sum(),
        }
    }

    pub fn evaluate_many(&self, pts: &[[f64; 2]]) -> Vec<Complex64> {
        pts.par_iter().map(|p| self.evaluate(p)).collect()
    }

    /// `L^1 s` at `p`: the interior Helmholtz operator applied to the
    /// approximant.
    pub fn interior_apply(&self, p: &[f64; 2]) -> Complex64 {
        let k2 = self.kappa * self.kappa;
        match self.form {
            Form::Plain => {
                let dim = self.centers.dim;
                self.centers
                    .points
                    .iter()
                    .zip(&self.lambda)
                    .map(|(&c, l)| {
                        let r = dist(*p, c);
                        l * (-self.kernel.laplacian(r, dim) - k2 * self.kernel.eval(r))
                    })
                    .sum()
            }
            Form::SymmetricOneD => self
                .centers
                .points
                .iter()
                .zip(self.centers.regions.iter())
                .zip(&self.lambda)
                .map(|((&c, &rj), l)| {
                    l * symmetric_block(self.kernel, self.kappa, Region::Interior, rj, p[0], c[0])
                })
                .sum(),
        }
    }
}

/// Interior residual `r(x) = L^1 s(x) - f^1(x)`; the PDE data `f^1` is zero
/// for all three model problems.
pub fn residual(approx: &Approximant, _problem: &ProblemSpec, points: &[[f64; 2]]) -> Vec<Complex64> {
    points.par_iter().map(|p| approx.interior_apply(p)).collect()
}

/// Solver knobs; `None` everywhere means the defaults below.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Absolute tolerance for DtN inner-product quadrature.
    pub quad_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { quad_tol: 1e-12 }
    }
}

/// A solved system: the approximant plus solve diagnostics.
#[derive(Debug, Clone)]
pub struct Solution {
    pub approximant: Approximant,
    /// Two-norm condition estimate of the collocation matrix.
    pub cond: f64,
    pub warnings: Vec<String>,
}

fn solve_assembly(
    assembly: Assembly,
    problem: &ProblemSpec,
    nodes: &NodeSet,
    kernel: Kernel,
    form: Form,
) -> Result<Solution> {
    let lu = LuFactors::factor(&assembly.matrix)?;
    let lambda = lu.solve(&assembly.rhs);
    let cond = cond_estimate(&assembly.matrix, &lu);
    let mut warnings = assembly.warnings;
    if cond > 1e17 {
        warnings.push(format!("collocation matrix is near-singular: cond estimate {cond:.2e}"));
    }
    if lambda.iter().any(|l| !l.re.is_finite() || !l.im.is_finite()) {
        return Err(Error::Unresolved("solve produced non-finite coefficients".into()));
    }
    Ok(Solution {
        approximant: Approximant {
            kernel,
            centers: nodes.clone(),
            lambda,
            kappa: problem.kappa(),
            form,
        },
        cond,
        warnings,
    })
}

/// Assembles and solves the non-symmetric system.
pub fn solve(
    problem: &ProblemSpec,
    nodes: &NodeSet,
    kernel: Kernel,
    opts: Option<SolveOptions>,
) -> Result<Solution> {
    let opts = opts.unwrap_or_default();
    let assembly = assemble_nonsymmetric(problem, nodes, kernel, opts.quad_tol)?;
    solve_assembly(assembly, problem, nodes, kernel, Form::Plain)
}

/// Assembles and solves the symmetric 1D system.
pub fn solve_symmetric_1d(
    problem: &ProblemSpec,
    nodes: &NodeSet,
    kernel: Kernel,
) -> Result<Solution> {
    let assembly = assemble_symmetric_1d(problem, nodes, kernel)?;
    solve_assembly(assembly, problem, nodes, kernel, Form::SymmetricOneD)
}
