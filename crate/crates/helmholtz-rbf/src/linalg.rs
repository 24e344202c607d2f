//! Dense complex linear algebra: LU factorization, condition estimation,
//! singular value decomposition, and a general eigenvalue solver.
//!
//! Everything here is written for the moderate dense systems this crate
//! produces (hundreds to a few thousand unknowns, often severely
//! ill-conditioned). Factorizations are deterministic; there is no pivoting
//! strategy or start vector that depends on ambient randomness.

use num_complex::Complex64;

use crate::{Error, Result};

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self { n_rows, n_cols, data: vec![Complex64::new(0.0, 0.0); n_rows * n_cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n_rows, n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n_cols), "ragged rows");
        Self { n_rows, n_cols, data: rows.concat() }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.n_cols, self.n_rows, |i, j| self[(j, i)].conj())
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n_cols);
        (0..self.n_rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `A^H x` without forming the adjoint.
    pub fn mul_adjoint_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n_rows);
        let mut out = vec![Complex64::new(0.0, 0.0); self.n_cols];
        for i in 0..self.n_rows {
            let xi = x[i];
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * xi;
            }
        }
        out
    }

    pub fn mul_mat(&self, b: &CMatrix) -> CMatrix {
        assert_eq!(self.n_cols, b.n_rows);
        let mut out = CMatrix::zeros(self.n_rows, b.n_cols);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                let aik = self[(i, k)];
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..b.n_cols {
                    out[(i, j)] += aik * b[(k, j)];
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        assert_eq!(self.n_rows, self.n_cols);
        (0..self.n_rows).map(|i| self[(i, i)]).sum()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n_cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n_cols + j]
    }
}

pub fn inf_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `sum conj(a_i) b_i`.
pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Ordering on complex numbers by real part, then imaginary part. Both parts
/// are finite everywhere this is used.
pub fn cmp_complex(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// LU factorization with partial pivoting: `P A = L U`.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: CMatrix,
    perm: Vec<usize>,
    swaps: usize,
}

impl LuFactors {
    pub fn factor(a: &CMatrix) -> Result<LuFactors> {
        assert_eq!(a.n_rows, a.n_cols, "LU needs a square matrix");
        let n = a.n_rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let (pivot_row, pivot_mag) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .expect("non-empty pivot search");
            if pivot_mag == 0.0 || !pivot_mag.is_finite() {
                return Err(Error::SingularMatrix { pivot: k });
            }
            if pivot_row != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(pivot_row, j)];
                    lu[(pivot_row, j)] = t;
                }
                perm.swap(k, pivot_row);
                swaps += 1;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let m = lu[(i, k)] / pivot;
                lu[(i, k)] = m;
                for j in k + 1..n {
                    let hkj = lu[(k, j)];
                    lu[(i, j)] -= m * hkj;
                }
            }
        }
        Ok(LuFactors { lu, perm, swaps })
    }

    pub fn n(&self) -> usize {
        self.lu.n_rows
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        assert_eq!(b.len(), n);
        let mut y: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let mut acc = y[i];
            for j in 0..i {
                acc -= self.lu[(i, j)] * y[j];
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in i + 1..n {
                acc -= self.lu[(i, j)] * y[j];
            }
            y[i] = acc / self.lu[(i, i)];
        }
        y
    }

    /// Solves `A^H x = b` using the same factors (`A^H = U^H L^H P`).
    pub fn solve_adjoint(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        assert_eq!(b.len(), n);
        let mut z = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = b[i];
            for j in 0..i {
                acc -= self.lu[(j, i)].conj() * z[j];
            }
            z[i] = acc / self.lu[(i, i)].conj();
        }
        for i in (0..n).rev() {
            let mut acc = z[i];
            for j in i + 1..n {
                acc -= self.lu[(j, i)].conj() * z[j];
            }
            z[i] = acc;
        }
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = z[i];
        }
        x
    }

    pub fn det(&self) -> Complex64 {
        let sign = if self.swaps % 2 == 0 { 1.0 } else { -1.0 };
        (0..self.n()).map(|i| self.lu[(i, i)]).product::<Complex64>() * sign
    }
}

/// Two-norm condition number estimate by power iteration on `A^H A` (largest
/// singular value) and on `A^{-1} A^{-H}` through the LU factors (smallest).
/// Returns `f64::INFINITY` when the inverse iteration overflows.
pub fn cond_estimate(a: &CMatrix, lu: &LuFactors) -> f64 {
    let n = a.n_rows();
    if n == 0 {
        return 1.0;
    }
    let start: Vec<Complex64> = (0..n)
        .map(|j| Complex64::new((0.7 * j as f64 + 0.3).cos(), (1.3 * j as f64 + 0.7).sin()))
        .collect();
    let normalize = |v: &mut Vec<Complex64>| -> bool {
        let s = l2_norm(v);
        if s == 0.0 || !s.is_finite() {
            return false;
        }
        for z in v.iter_mut() {
            *z /= s;
        }
        true
    };

    let mut v = start.clone();
    normalize(&mut v);
    let mut sigma_max = 0.0;
    for _ in 0..40 {
        let w = a.mul_vec(&v);
        sigma_max = l2_norm(&w);
        v = a.mul_adjoint_vec(&w);
        if !normalize(&mut v) {
            return 1.0;
        }
    }

    let mut v = start;
    normalize(&mut v);
    let mut inv_sigma_min = 0.0;
    for _ in 0..40 {
        let w = lu.solve_adjoint(&v);
        inv_sigma_min = l2_norm(&w);
        if !inv_sigma_min.is_finite() {
            return f64::INFINITY;
        }
        v = lu.solve(&w);
        if !normalize(&mut v) {
            return f64::INFINITY;
        }
    }
    sigma_max * inv_sigma_min
}

/// Singular value decomposition `A = U diag(sigma) V^H` with `sigma` sorted
/// in decreasing order. `U` is `m x n` with orthonormal columns where
/// `sigma > 0`; columns belonging to zero singular values are zero.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    /// Number of singular values strictly above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.sigma.iter().filter(|&&s| s > tol).count()
    }

    /// Orthonormal basis of the numerical nullspace: right singular vectors
    /// whose singular value is at most `tol`.
    pub fn nullspace(&self, tol: f64) -> Vec<Vec<Complex64>> {
        let r = self.rank(tol);
        (r..self.sigma.len())
            .map(|j| (0..self.v.n_rows()).map(|i| self.v[(i, j)]).collect())
            .collect()
    }
}

/// One-sided Jacobi SVD. Works for any shape, including more columns than
/// rows (the extra singular values are zero).
pub fn svd(a: &CMatrix) -> Svd {
    let m = a.n_rows();
    let n = a.n_cols();
    let mut w = a.clone();
    let mut v = CMatrix::identity(n);
    let tol = 1e-14;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = Complex64::new(0.0, 0.0);
                for i in 0..m {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    app += wp.norm_sqr();
                    aqq += wq.norm_sqr();
                    apq += wp.conj() * wq;
                }
                if apq.norm() <= tol * (app * aqq).sqrt() || apq.norm() == 0.0 {
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (2.0 * apq.norm());
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let phase = apq / apq.norm();
                // Columns (p, q) of both W and V get the same unitary
                // rotation, preserving W = A V.
                let rot = |mat: &mut CMatrix, rows: usize| {
                    for i in 0..rows {
                        let xp = mat[(i, p)];
                        let xq = mat[(i, q)];
                        mat[(i, p)] = c * xp - s * phase.conj() * xq;
                        mat[(i, q)] = s * phase * xp + c * xq;
                    }
                };
                rot(&mut w, m);
                rot(&mut v, n);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|j| (0..m).map(|i| w[(i, j)].norm_sqr()).sum::<f64>().sqrt()).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let mut u = CMatrix::zeros(m, n);
    let mut vs = CMatrix::zeros(n, n);
    for (col, &j) in order.iter().enumerate() {
        if sigma[col] > 0.0 {
            for i in 0..m {
                u[(i, col)] = w[(i, j)] / sigma[col];
            }
        }
        for i in 0..n {
            vs[(i, col)] = v[(i, j)];
        }
    }
    Svd { u, sigma, v: vs }
}

/// Givens rotation `[[c, s], [-conj(s), c]]` (c real) sending `(a, b)` to
/// `(r, 0)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    let rho = (an * an + bn * bn).sqrt();
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    (an / rho, (a / an) * b.conj() / rho)
}

/// Diagonal similarity scaling (powers of two) equalizing row and column
/// norms; leaves eigenvalues exactly unchanged.
fn balance(h: &mut CMatrix) {
    let n = h.n_rows();
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    c += h[(j, i)].norm();
                    r += h[(i, j)].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            let mut cc = c;
            while cc < g {
                f *= RADIX;
                cc *= sqrdx;
            }
            g = r * RADIX;
            while cc > g {
                f /= RADIX;
                cc /= sqrdx;
            }
            if (cc + r / f) / f < 0.95 * s && f != 1.0 {
                done = false;
                let inv = 1.0 / f;
                for j in 0..n {
                    h[(i, j)] *= inv;
                }
                for j in 0..n {
                    h[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Unitary reduction to upper Hessenberg form by Householder reflections.
fn hessenberg(h: &mut CMatrix) {
    let n = h.n_rows();
    for k in 0..n.saturating_sub(2) {
        let xnorm = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let alpha = if x0.norm() == 0.0 {
            Complex64::new(xnorm, 0.0)
        } else {
            (x0 / x0.norm()) * xnorm
        };
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] += alpha;
        let vnorm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let tau = 2.0 / vnorm_sqr;
        // Left: rows k+1..n of columns k..n.
        for j in k..n {
            let mut s = Complex64::new(0.0, 0.0);
            for (vi, i) in v.iter().zip(k + 1..n) {
                s += vi.conj() * h[(i, j)];
            }
            s *= tau;
            for (vi, i) in v.iter().zip(k + 1..n) {
                h[(i, j)] -= vi * s;
            }
        }
        // Right: columns k+1..n of every row.
        for i in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for (vj, j) in v.iter().zip(k + 1..n) {
                s += h[(i, j)] * vj;
            }
            s *= tau;
            for (vj, j) in v.iter().zip(k + 1..n) {
                h[(i, j)] -= s * vj.conj();
            }
        }
        h[(k + 1, k)] = -alpha;
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

fn eig_2x2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let mid = 0.5 * (a + d);
    let root = (0.25 * (a - d) * (a - d) + b * c).sqrt();
    (mid + root, mid - root)
}

/// All eigenvalues of a general complex matrix, sorted by real part then
/// imaginary part. Balancing, Hessenberg reduction, then shifted QR.
pub fn eig(a: &CMatrix) -> Result<Vec<Complex64>> {
    assert_eq!(a.n_rows(), a.n_cols(), "eig needs a square matrix");
    let n = a.n_rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h);

    let mut eigs: Vec<Complex64> = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut block_iters = 0usize;
    let mut total_iters = 0usize;
    let budget = 40 * n.max(4);
    loop {
        // Deflate: find the start of the trailing irreducible block.
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let s = if s == 0.0 { 1.0 } else { s };
            if h[(lo, lo - 1)].norm() <= f64::EPSILON * s {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eigs.push(h[(hi, hi)]);
            if hi == 0 {
                break;
            }
            hi -= 1;
            block_iters = 0;
            continue;
        }
        if lo + 1 == hi {
            let (l1, l2) = eig_2x2(h[(lo, lo)], h[(lo, hi)], h[(hi, lo)], h[(hi, hi)]);
            eigs.push(l1);
            eigs.push(l2);
            if lo == 0 {
                break;
            }
            hi = lo - 1;
            block_iters = 0;
            continue;
        }
        if total_iters >= budget {
            return Err(Error::EigNoConvergence { index: hi, sweeps: total_iters });
        }
        total_iters += 1;
        block_iters += 1;

        let a11 = h[(hi - 1, hi - 1)];
        let a12 = h[(hi - 1, hi)];
        let a21 = h[(hi, hi - 1)];
        let a22 = h[(hi, hi)];
        let mu = if block_iters % 10 == 0 {
            a22 + Complex64::new(0.75 * a21.norm(), 0.0)
        } else {
            let (l1, l2) = eig_2x2(a11, a12, a21, a22);
            if (l1 - a22).norm() <= (l2 - a22).norm() {
                l1
            } else {
                l2
            }
        };

        for i in lo..=hi {
            h[(i, i)] -= mu;
        }
        let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(hi - lo);
        for i in lo..hi {
            let (c, s) = givens(h[(i, i)], h[(i + 1, i)]);
            for j in i..n {
                let x = h[(i, j)];
                let y = h[(i + 1, j)];
                h[(i, j)] = c * x + s * y;
                h[(i + 1, j)] = -s.conj() * x + c * y;
            }
            rots.push((c, s));
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let i = lo + idx;
            for r in 0..=(i + 1).min(hi) {
                let x = h[(r, i)];
                let y = h[(r, i + 1)];
                h[(r, i)] = c * x + s.conj() * y;
                h[(r, i + 1)] = -s * x + c * y;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += mu;
        }
    }
    eigs.sort_by(cmp_complex);
    Ok(eigs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::XorShift64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rng: &mut XorShift64, n_rows: usize, n_cols: usize) -> CMatrix {
        CMatrix::from_fn(n_rows, n_cols, |_, _| c(rng.pm(1.0), rng.pm(1.0)))
    }

    /// Deterministic unitary built from a chain of Givens rotations.
    fn random_unitary(rng: &mut XorShift64, n: usize) -> CMatrix {
        let mut q = CMatrix::identity(n);
        for p in 0..n {
            for r in p + 1..n {
                let theta = rng.pm(std::f64::consts::PI);
                let phi = rng.pm(std::f64::consts::PI);
                let (cs, sn) = (theta.cos(), theta.sin());
                let ph = Complex64::new(0.0, phi).exp();
                for i in 0..n {
                    let x = q[(i, p)];
                    let y = q[(i, r)];
                    q[(i, p)] = cs * x - sn * ph.conj() * y;
                    q[(i, r)] = sn * ph * x + cs * y;
                }
            }
        }
        q
    }

    #[test]
    fn matrix_ops_basics() {
        let a = CMatrix::from_rows(&[vec![c(1.0, 2.0), c(0.0, -1.0)], vec![c(3.0, 0.0), c(2.0, 2.0)]]);
        let ad = a.adjoint();
        assert_eq!(ad[(0, 0)], c(1.0, -2.0));
        assert_eq!(ad[(1, 0)], c(0.0, 1.0));
        let x = vec![c(1.0, 0.0), c(0.0, 1.0)];
        let y = a.mul_vec(&x);
        assert_eq!(y[0], c(1.0, 2.0) + c(0.0, -1.0) * c(0.0, 1.0));
        let z = a.mul_adjoint_vec(&x);
        let z_ref = ad.mul_vec(&x);
        assert!((z[0] - z_ref[0]).norm() < 1e-15 && (z[1] - z_ref[1]).norm() < 1e-15);
        let prod = a.mul_mat(&CMatrix::identity(2));
        assert_eq!(prod, a);
        assert!((a.trace() - c(3.0, 4.0)).norm() < 1e-15);
    }

    #[test]
    fn lu_solves_planted_system() {
        let mut rng = XorShift64::new(11);
        let n = 40;
        let a = random_matrix(&mut rng, n, n);
        let x_true: Vec<Complex64> = (0..n).map(|_| c(rng.pm(2.0), rng.pm(2.0))).collect();
        let b = a.mul_vec(&x_true);
        let lu = LuFactors::factor(&a).unwrap();
        let x = lu.solve(&b);
        let err: f64 = x.iter().zip(&x_true).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
        assert!(err <= 1e-9, "solve error {err}");
        let resid = a.mul_vec(&x);
        let rel = inf_norm(&resid.iter().zip(&b).map(|(u, v)| u - v).collect::<Vec<_>>())
            / inf_norm(&b);
        assert!(rel <= 1e-12, "residual {rel}");
    }

    #[test]
    fn lu_detects_singular() {
        let a = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(4.0, 0.0)]]);
        match LuFactors::factor(&a) {
            Err(Error::SingularMatrix { pivot }) => assert_eq!(pivot, 1),
            other => panic!("expected singular matrix, got {other:?}"),
        }
    }

    #[test]
    fn determinants_match_hand_values() {
        let a = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(3.0, 0.0), c(4.0, 0.0)]]);
        let det = LuFactors::factor(&a).unwrap().det();
        assert!((det - c(-2.0, 0.0)).norm() <= 1e-14);

        // det [[i, 1], [1, i]] = i*i - 1 = -2.
        let b = CMatrix::from_rows(&[vec![c(0.0, 1.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 1.0)]]);
        let det = LuFactors::factor(&b).unwrap().det();
        assert!((det - c(-2.0, 0.0)).norm() <= 1e-14);

        // Odd permutation has determinant -1.
        let p = CMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        ]);
        let det = LuFactors::factor(&p).unwrap().det();
        assert!((det - c(-1.0, 0.0)).norm() <= 1e-14);
    }

    #[test]
    fn solve_adjoint_matches_explicit_adjoint() {
        let mut rng = XorShift64::new(7);
        let n = 12;
        let a = random_matrix(&mut rng, n, n);
        let b: Vec<Complex64> = (0..n).map(|_| c(rng.pm(1.0), rng.pm(1.0))).collect();
        let lu = LuFactors::factor(&a).unwrap();
        let x1 = lu.solve_adjoint(&b);
        let x2 = LuFactors::factor(&a.adjoint()).unwrap().solve(&b);
        let err: f64 = x1.iter().zip(&x2).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
        assert!(err <= 1e-10, "adjoint solve mismatch {err}");
    }

    #[test]
    fn cond_estimate_matches_planted_spectrum() {
        let mut rng = XorShift64::new(23);
        let n = 6;
        let sig = [50.0, 17.0, 3.0, 0.9, 0.02, 1e-3];
        let q1 = random_unitary(&mut rng, n);
        let q2 = random_unitary(&mut rng, n);
        let d = CMatrix::from_fn(n, n, |i, j| if i == j { c(sig[i], 0.0) } else { c(0.0, 0.0) });
        let a = q1.mul_mat(&d).mul_mat(&q2.adjoint());
        let lu = LuFactors::factor(&a).unwrap();
        let est = cond_estimate(&a, &lu);
        let exact = 50.0 / 1e-3;
        assert!((est / exact - 1.0).abs() <= 1e-3, "cond {est} vs {exact}");
    }

    #[test]
    fn svd_reconstructs_and_orders() {
        let mut rng = XorShift64::new(31);
        let a = random_matrix(&mut rng, 10, 6);
        let s = svd(&a);
        for w in s.sigma.windows(2) {
            assert!(w[0] >= w[1]);
        }
        // A = U diag(sigma) V^H.
        let mut recon = CMatrix::zeros(10, 6);
        for i in 0..10 {
            for j in 0..6 {
                for k in 0..6 {
                    recon[(i, j)] += s.u[(i, k)] * s.sigma[k] * s.v[(j, k)].conj();
                }
            }
        }
        let mut diff = 0.0f64;
        for i in 0..10 {
            for j in 0..6 {
                diff = diff.max((recon[(i, j)] - a[(i, j)]).norm());
            }
        }
        assert!(diff <= 1e-12 * a.frobenius_norm(), "reconstruction error {diff}");
        // V unitary.
        let vhv = s.v.adjoint().mul_mat(&s.v);
        let mut off = 0.0f64;
        for i in 0..6 {
            for j in 0..6 {
                let expect = if i == j { 1.0 } else { 0.0 };
                off = off.max((vhv[(i, j)] - c(expect, 0.0)).norm());
            }
        }
        assert!(off <= 1e-12, "V^H V deviates from identity by {off}");
    }

    #[test]
    fn svd_recovers_planted_singular_values() {
        let mut rng = XorShift64::new(43);
        let n = 6;
        let sig = [9.0, 4.5, 1.0, 0.3, 0.01, 1e-6];
        let q1 = random_unitary(&mut rng, n);
        let q2 = random_unitary(&mut rng, n);
        let d = CMatrix::from_fn(n, n, |i, j| if i == j { c(sig[i], 0.0) } else { c(0.0, 0.0) });
        let a = q1.mul_mat(&d).mul_mat(&q2.adjoint());
        let s = svd(&a);
        for (got, want) in s.sigma.iter().zip(sig) {
            assert!((got - want).abs() <= 1e-10 * sig[0], "{got} vs {want}");
        }
    }

    #[test]
    fn svd_rank_and_nullspace_of_low_rank_product() {
        let mut rng = XorShift64::new(5);
        let b = random_matrix(&mut rng, 8, 3);
        let cmat = random_matrix(&mut rng, 3, 8);
        let a = b.mul_mat(&cmat);
        let s = svd(&a);
        let tol = 1e-10 * 8.0 * s.sigma[0];
        assert_eq!(s.rank(tol), 3);
        let ns = s.nullspace(tol);
        assert_eq!(ns.len(), 5);
        for v in &ns {
            assert!((l2_norm(v) - 1.0).abs() <= 1e-12);
            let av = a.mul_vec(v);
            assert!(inf_norm(&av) <= 1e-10 * s.sigma[0], "nullspace vector not annihilated");
        }
    }

    #[test]
    fn svd_handles_wide_matrices() {
        let mut rng = XorShift64::new(17);
        let a = random_matrix(&mut rng, 4, 7);
        let s = svd(&a);
        assert_eq!(s.sigma.len(), 7);
        let tol = 1e-10 * 7.0 * s.sigma[0];
        assert!(s.rank(tol) <= 4);
        assert!(s.nullspace(tol).len() >= 3);
    }

    #[test]
    fn eig_diagonal_and_permutation() {
        let d = CMatrix::from_rows(&[
            vec![c(3.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(-2.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.5, -4.0)],
        ]);
        let mut expect = vec![c(3.0, 1.0), c(-2.0, 0.0), c(0.5, -4.0)];
        expect.sort_by(cmp_complex);
        let eigs = eig(&d).unwrap();
        for (g, w) in eigs.iter().zip(&expect) {
            assert!((g - w).norm() <= 1e-12);
        }

        // Cyclic shift on 5 elements: eigenvalues are the 5th roots of unity.
        let n = 5;
        let p = CMatrix::from_fn(n, n, |i, j| {
            if (i + 1) % n == j {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let eigs = eig(&p).unwrap();
        let mut expect: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
            .collect();
        expect.sort_by(cmp_complex);
        for (g, w) in eigs.iter().zip(&expect) {
            assert!((g - w).norm() <= 1e-10, "{g} vs {w}");
        }
    }

    #[test]
    fn eig_companion_of_cubic() {
        // Companion of z^3 = 1.
        let a = CMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        let eigs = eig(&a).unwrap();
        let mut expect: Vec<Complex64> = (0..3)
            .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 3.0))
            .collect();
        expect.sort_by(cmp_complex);
        for (g, w) in eigs.iter().zip(&expect) {
            assert!((g - w).norm() <= 1e-10, "{g} vs {w}");
        }
    }

    #[test]
    fn eig_matches_trace_and_determinant() {
        let mut rng = XorShift64::new(97);
        let n = 12;
        let a = random_matrix(&mut rng, n, n);
        let eigs = eig(&a).unwrap();
        let sum: Complex64 = eigs.iter().sum();
        assert!((sum - a.trace()).norm() <= 1e-9 * a.frobenius_norm(), "trace mismatch");
        let prod: Complex64 = eigs.iter().product();
        let det = LuFactors::factor(&a).unwrap().det();
        assert!((prod - det).norm() <= 1e-8 * det.norm().max(1.0), "det mismatch {prod} vs {det}");
    }

    #[test]
    fn eig_recovers_planted_spectrum() {
        let mut rng = XorShift64::new(3);
        let n = 8;
        let mut expect: Vec<Complex64> =
            (0..n).map(|k| c(k as f64 - 3.0, ((k * k) % 5) as f64 - 2.0)).collect();
        let s = random_matrix(&mut rng, n, n);
        let lu = LuFactors::factor(&s).unwrap();
        // A = S D S^{-1} assembled column by column: A e_j = S D (S^{-1} e_j).
        let mut sinv = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![c(0.0, 0.0); n];
            e[j] = c(1.0, 0.0);
            let col = lu.solve(&e);
            for i in 0..n {
                sinv[(i, j)] = col[i];
            }
        }
        let sd = CMatrix::from_fn(n, n, |i, j| s[(i, j)] * expect[j]);
        let a = sd.mul_mat(&sinv);
        let eigs = eig(&a).unwrap();
        expect.sort_by(cmp_complex);
        for (g, w) in eigs.iter().zip(&expect) {
            assert!((g - w).norm() <= 1e-7, "{g} vs {w}");
        }
    }

    #[test]
    fn eig_of_hermitian_is_real() {
        let mut rng = XorShift64::new(29);
        let n = 10;
        let b = random_matrix(&mut rng, n, n);
        let h = CMatrix::from_fn(n, n, |i, j| b[(i, j)] + b[(j, i)].conj());
        let eigs = eig(&h).unwrap();
        let scale = h.frobenius_norm();
        for l in &eigs {
            assert!(l.im.abs() <= 1e-9 * scale, "Hermitian eig has imaginary part {}", l.im);
        }
        let sum: Complex64 = eigs.iter().sum();
        assert!((sum - h.trace()).norm() <= 1e-9 * scale);
    }

    #[test]
    fn eig_defective_jordan_blocks() {
        let a = CMatrix::from_rows(&[vec![c(2.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(2.0, 0.0)]]);
        for l in eig(&a).unwrap() {
            assert!((l - c(2.0, 0.0)).norm() <= 1e-6);
        }
        let j3 = CMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        ]);
        for l in eig(&j3).unwrap() {
            assert!((l - c(1.0, 0.0)).norm() <= 1e-4, "{l}");
        }
    }

    #[test]
    fn eig_small_sizes() {
        assert!(eig(&CMatrix::zeros(0, 0)).unwrap().is_empty());
        let one = CMatrix::from_rows(&[vec![c(4.0, -1.0)]]);
        assert_eq!(eig(&one).unwrap(), vec![c(4.0, -1.0)]);
    }
}
