//! Domains, node sets, and evaluation grids.
//!
//! Node generation is fully deterministic: all randomness flows from a small
//! explicit-seed xorshift generator, so a `(n1, n2, seed)` triple produces the
//! same node set bit for bit on every platform. Waveguide nodes follow the
//! quasi-uniform construction used throughout the experiments: points on
//! vertical lines with near-equal spacing, curved walls resampled at uniform
//! arc length, and a +-0.25 h jitter (interior nodes in both coordinates,
//! boundary nodes along their boundary only).

use std::sync::Arc;

use crate::{Error, Result};

/// Xorshift* generator with 64-bit state; seeded through SplitMix64 so that
/// every seed (including 0) yields a usable stream.
#[derive(Debug, Clone)]
pub struct XorShift64 {
    state: u64,
}

impl XorShift64 {
    pub fn new(seed: u64) -> XorShift64 {
        // SplitMix64 scramble of the seed.
        let mut z = seed.wrapping_add(0x9E3779B97F4A7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^= z >> 31;
        XorShift64 { state: if z == 0 { 0x853C49E6748FEA9B } else { z } }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545F4914F6CDD1D)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[-scale, scale]`.
    pub fn pm(&mut self, scale: f64) -> f64 {
        (2.0 * self.next_f64() - 1.0) * scale
    }
}

/// A wall curve `x2 -> x1` of a waveguide. Must be smooth and evaluable in a
/// small neighbourhood of `[0, 1]` (derivatives are taken by central
/// differences with step `1e-6`).
#[derive(Clone)]
pub struct Curve {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl Curve {
    pub fn from_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Curve {
        Curve { f: Arc::new(f) }
    }

    pub fn constant(c: f64) -> Curve {
        Curve::from_fn(move |_| c)
    }

    pub fn eval(&self, x2: f64) -> f64 {
        (self.f)(x2)
    }

    pub fn deriv(&self, x2: f64) -> f64 {
        const H: f64 = 1e-6;
        (self.eval(x2 + H) - self.eval(x2 - H)) / (2.0 * H)
    }
}

impl std::fmt::Debug for Curve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Curve(..)")
    }
}

/// Computational domain of a model problem.
#[derive(Debug, Clone)]
pub enum Domain {
    /// The unit interval `(0, 1)`.
    Interval,
    /// `(0, width) x (0, 1)` with sound-hard walls at `x1 = 0, width`.
    Rectangle { width: f64 },
    /// `lower(x2) < x1 < upper(x2)` for `x2` in `(0, 1)`.
    Waveguide { lower: Curve, upper: Curve },
}

impl Domain {
    /// The M-shaped duct used in the experiments: a Gaussian bump in the
    /// lower wall and a double dip in the upper wall.
    pub fn duct_m() -> Domain {
        Domain::Waveguide {
            lower: Curve::from_fn(|x2| 0.3 * (-20.0 * (x2 - 0.5).powi(2)).exp()),
            upper: Curve::from_fn(|x2| {
                0.8 - 0.3 * ((-80.0 * (x2 - 0.3).powi(2)).exp() + (-80.0 * (x2 - 0.7).powi(2)).exp())
            }),
        }
    }

    pub fn waveguide(lower: Curve, upper: Curve) -> Domain {
        Domain::Waveguide { lower, upper }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval => 1,
            _ => 2,
        }
    }

    /// `(lower, upper, width)` of the cross-section at `x2`; errors if the
    /// section is empty. Only valid for waveguides.
    pub fn section(&self, x2: f64) -> Result<(f64, f64, f64)> {
        match self {
            Domain::Waveguide { lower, upper } => {
                let lo = lower.eval(x2);
                let hi = upper.eval(x2);
                let w = hi - lo;
                if !(w.is_finite() && w > 0.0) {
                    return Err(Error::invalid(
                        "domain",
                        format!("waveguide has non-positive width {w} at x2 = {x2}"),
                    ));
                }
                Ok((lo, hi, w))
            }
            Domain::Rectangle { width } => Ok((0.0, *width, *width)),
            Domain::Interval => Err(Error::invalid("domain", "interval has no cross-section")),
        }
    }
}

/// Operator region of a collocation node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// PDE rows.
    Interior,
    /// Radiation boundary at `x2 = 0` (1D: `x = 0`).
    Left,
    /// Radiation boundary at `x2 = 1` (1D: `x = 1`).
    Right,
    /// Sound-hard (Dirichlet) walls.
    Wall,
}

impl Region {
    pub fn tag(self) -> u8 {
        match self {
            Region::Interior => 1,
            Region::Left => 2,
            Region::Right => 3,
            Region::Wall => 4,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Region> {
        match tag {
            1 => Some(Region::Interior),
            2 => Some(Region::Left),
            3 => Some(Region::Right),
            4 => Some(Region::Wall),
            _ => None,
        }
    }
}

/// A collocation node set: points, operator regions, and spacing metadata.
///
/// 1D node sets store points as `[x, 0]`.
#[derive(Debug, Clone)]
pub struct NodeSet {
    pub dim: usize,
    pub points: Vec<[f64; 2]>,
    pub regions: Vec<Region>,
    pub h1: f64,
    pub h2: f64,
    pub n1: usize,
    pub n2: usize,
    pub seed: u64,
}

impl NodeSet {
    /// Assembles a node set from explicit data, validating shape, finiteness,
    /// and pairwise distinctness.
    pub fn from_parts(
        dim: usize,
        points: Vec<[f64; 2]>,
        regions: Vec<Region>,
        h1: f64,
        h2: f64,
    ) -> Result<NodeSet> {
        if dim != 1 && dim != 2 {
            return Err(Error::invalid("dim", format!("dimension must be 1 or 2, got {dim}")));
        }
        if points.len() != regions.len() {
            return Err(Error::invalid(
                "regions",
                format!("{} regions for {} points", regions.len(), points.len()),
            ));
        }
        if points.len() < 3 {
            return Err(Error::invalid("points", "need at least 3 nodes to split operators"));
        }
        if points.iter().any(|p| !(p[0].is_finite() && p[1].is_finite())) {
            return Err(Error::invalid("points", "non-finite coordinate"));
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i] == points[j] {
                    return Err(Error::invalid(
                        "points",
                        format!("nodes {i} and {j} coincide at {:?}", points[i]),
                    ));
                }
            }
        }
        let n = points.len();
        Ok(NodeSet { dim, points, regions, h1, h2, n1: n, n2: 1, seed: 0 })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Representative spacing: `h1` in 1D, `max(h1, h2)` in 2D.
    pub fn h(&self) -> f64 {
        if self.dim == 1 {
            self.h1
        } else {
            self.h1.max(self.h2)
        }
    }

    pub fn region_indices(&self, region: Region) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.regions[i] == region).collect()
    }

    pub fn min_pairwise_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                best = best.min(crate::kernels::dist(self.points[i], self.points[j]));
            }
        }
        best
    }
}

/// Grid on which solutions, residuals, and errors are evaluated.
#[derive(Debug, Clone)]
pub struct EvalGrid {
    pub dim: usize,
    pub points: Vec<[f64; 2]>,
}

/// Equispaced interval nodes including both endpoints.
pub fn nodes_interval(n: usize) -> Result<NodeSet> {
    if n < 3 {
        return Err(Error::invalid("n", format!("need n >= 3 interval nodes, got {n}")));
    }
    let h = 1.0 / (n - 1) as f64;
    let mut points = Vec::with_capacity(n);
    let mut regions = Vec::with_capacity(n);
    for i in 0..n {
        let x = if i == n - 1 { 1.0 } else { i as f64 * h };
        points.push([x, 0.0]);
        regions.push(if i == 0 {
            Region::Left
        } else if i == n - 1 {
            Region::Right
        } else {
            Region::Interior
        });
    }
    Ok(NodeSet { dim: 1, points, regions, h1: h, h2: h, n1: n, n2: 1, seed: 0 })
}

/// Tensor-product nodes on `(0, width) x (0, 1)`. Corners and the vertical
/// edges `x1 = 0, width` are wall (Dirichlet) nodes.
pub fn nodes_rectangle(n1: usize, n2: usize, width: f64) -> Result<NodeSet> {
    if n1 < 3 {
        return Err(Error::invalid("n1", format!("need n1 >= 3, got {n1}")));
    }
    if n2 < 3 {
        return Err(Error::invalid("n2", format!("need n2 >= 3, got {n2}")));
    }
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::invalid("width", format!("width must be positive, got {width}")));
    }
    let h1 = width / (n1 - 1) as f64;
    let h2 = 1.0 / (n2 - 1) as f64;
    let mut points = Vec::with_capacity(n1 * n2);
    let mut regions = Vec::with_capacity(n1 * n2);
    for i in 0..n1 {
        let x1 = if i == n1 - 1 { width } else { i as f64 * h1 };
        for j in 0..n2 {
            let x2 = if j == n2 - 1 { 1.0 } else { j as f64 * h2 };
            points.push([x1, x2]);
            regions.push(if i == 0 || i == n1 - 1 {
                Region::Wall
            } else if j == 0 {
                Region::Left
            } else if j == n2 - 1 {
                Region::Right
            } else {
                Region::Interior
            });
        }
    }
    Ok(NodeSet { dim: 2, points, regions, h1, h2, n1, n2, seed: 0 })
}

/// Cumulative arc length of a wall curve, tabulated with composite Simpson
/// panels and inverted by bisection on the monotone table.
struct ArcTable {
    x2: Vec<f64>,
    cum: Vec<f64>,
}

const ARC_PANELS: usize = 4096;

impl ArcTable {
    fn build(curve: &Curve) -> ArcTable {
        let n = ARC_PANELS;
        let speed = |x: f64| (1.0 + curve.deriv(x).powi(2)).sqrt();
        let mut x2 = Vec::with_capacity(n + 1);
        let mut cum = Vec::with_capacity(n + 1);
        x2.push(0.0);
        cum.push(0.0);
        let dx = 1.0 / n as f64;
        let mut total = 0.0;
        for i in 0..n {
            let a = i as f64 * dx;
            let b = if i == n - 1 { 1.0 } else { (i + 1) as f64 * dx };
            let m = 0.5 * (a + b);
            total += (b - a) / 6.0 * (speed(a) + 4.0 * speed(m) + speed(b));
            x2.push(b);
            cum.push(total);
        }
        ArcTable { x2, cum }
    }

    fn total(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    /// `x2` with arc length `s` from the left endpoint.
    fn invert(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        if s >= self.total() {
            return 1.0;
        }
        let mut lo = 0;
        let mut hi = self.cum.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.cum[mid] <= s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let span = self.cum[hi] - self.cum[lo];
        let frac = if span > 0.0 { (s - self.cum[lo]) / span } else { 0.0 };
        self.x2[lo] + frac * (self.x2[hi] - self.x2[lo])
    }
}

enum Jitter {
    Fixed,
    /// Interior node: both coordinates move.
    Both { d1: f64, d2: f64 },
    /// Node on a vertical boundary line: moves along `x1` only.
    AlongX1 { d1: f64 },
    /// Node on a wall curve: moves in arc length, then remaps to the curve.
    AlongCurve { which: usize, s: f64, ds: f64 },
}

/// Quasi-uniform waveguide nodes.
///
/// `n1` controls the node count across the left boundary (`h1 = 0.8/(n1-1)`)
/// and `n2` the number of vertical node lines (`h2 = 1/(n2-1)`). Interior
/// nodes are jittered by up to `0.25 (h1, h2)`, boundary nodes only along
/// their boundary; wall nodes stay on the wall curves exactly and the four
/// corners stay fixed.
pub fn nodes_waveguide(n1: usize, n2: usize, domain: &Domain, seed: u64) -> Result<NodeSet> {
    let (lower, upper) = match domain {
        Domain::Waveguide { lower, upper } => (lower, upper),
        _ => return Err(Error::invalid("domain", "waveguide nodes require a waveguide domain")),
    };
    if n1 < 3 {
        return Err(Error::invalid("n1", format!("need n1 >= 3, got {n1}")));
    }
    if n2 < 3 {
        return Err(Error::invalid("n2", format!("need n2 >= 3, got {n2}")));
    }
    let h1 = 0.8 / (n1 - 1) as f64;
    let h2 = 1.0 / (n2 - 1) as f64;

    let mut base: Vec<[f64; 2]> = Vec::new();
    let mut regions: Vec<Region> = Vec::new();
    let mut jitter: Vec<Jitter> = Vec::new();

    let line = |x2: f64| -> Result<(f64, usize, f64)> {
        let (lo, _, w) = domain.section(x2)?;
        let count = ((w / h1).round() as usize + 1).max(2);
        Ok((lo, count, w / (count - 1) as f64))
    };

    // Vertical boundary lines at x2 = 0 and x2 = 1 (interior of the line
    // only; the corners are generated with the wall curves below).
    for (x2, region) in [(0.0, Region::Left), (1.0, Region::Right)] {
        let (lo, count, spacing) = line(x2)?;
        for k in 1..count - 1 {
            base.push([lo + k as f64 * spacing, x2]);
            regions.push(region);
            jitter.push(Jitter::AlongX1 { d1: 0.25 * h1 });
        }
    }

    // Interior vertical lines.
    for j in 1..n2 - 1 {
        let x2 = j as f64 * h2;
        let (lo, count, spacing) = line(x2)?;
        for k in 1..count - 1 {
            base.push([lo + k as f64 * spacing, x2]);
            regions.push(Region::Interior);
            jitter.push(Jitter::Both { d1: 0.25 * h1, d2: 0.25 * h2 });
        }
    }

    // Wall curves resampled at uniform arc length, corners included.
    let tables = [ArcTable::build(lower), ArcTable::build(upper)];
    for (which, table) in tables.iter().enumerate() {
        let total = table.total();
        let segments = ((total / h2).round() as usize).max(1);
        let ds = total / segments as f64;
        for k in 0..=segments {
            let s = k as f64 * ds;
            let x2 = table.invert(s);
            let curve = if which == 0 { lower } else { upper };
            base.push([curve.eval(x2), x2]);
            regions.push(Region::Wall);
            if k == 0 || k == segments {
                jitter.push(Jitter::Fixed);
            } else {
                jitter.push(Jitter::AlongCurve { which, s, ds: 0.25 * ds });
            }
        }
    }

    // Draw every jitter amount up front so the stream layout is fixed, then
    // apply with per-node shrinking until the set is valid.
    let mut rng = XorShift64::new(seed);
    let draws: Vec<[f64; 2]> = jitter
        .iter()
        .map(|j| match j {
            Jitter::Fixed => [0.0, 0.0],
            Jitter::Both { d1, d2 } => [rng.pm(*d1), rng.pm(*d2)],
            Jitter::AlongX1 { d1 } => [rng.pm(*d1), 0.0],
            Jitter::AlongCurve { ds, .. } => [rng.pm(*ds), 0.0],
        })
        .collect();

    let margin = 0.05 * h1.min(h2);
    let place = |i: usize, scale: f64| -> [f64; 2] {
        let d = [draws[i][0] * scale, draws[i][1] * scale];
        match &jitter[i] {
            Jitter::Fixed => base[i],
            Jitter::Both { .. } | Jitter::AlongX1 { .. } => {
                [base[i][0] + d[0], base[i][1] + d[1]]
            }
            Jitter::AlongCurve { which, s, .. } => {
                let table = &tables[*which];
                let x2 = table.invert(s + d[0]);
                let curve = if *which == 0 { lower } else { upper };
                [curve.eval(x2), x2]
            }
        }
    };

    let mut scale = vec![1.0f64; base.len()];
    let mut points: Vec<[f64; 2]> = Vec::with_capacity(base.len());
    for i in 0..base.len() {
        let mut p = place(i, scale[i]);
        if matches!(jitter[i], Jitter::Both { .. }) {
            // Interior nodes must stay strictly inside after the jitter.
            let mut tries = 0;
            loop {
                let (lo, hi, _) = domain.section(p[1])?;
                if p[0] - lo >= margin && hi - p[0] >= margin && p[1] > 0.0 && p[1] < 1.0 {
                    break;
                }
                scale[i] *= 0.5;
                tries += 1;
                if tries > 60 {
                    scale[i] = 0.0;
                }
                p = place(i, scale[i]);
            }
        }
        points.push(p);
    }

    // Separate any pair that the jitter pushed too close together. Shrinking
    // converges because the unjittered configuration is itself separated.
    let min_sep = 0.25 * h1.min(h2);
    for _pass in 0..60 {
        let mut ok = true;
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if crate::kernels::dist(points[i], points[j]) < min_sep {
                    ok = false;
                    for k in [i, j] {
                        if matches!(jitter[k], Jitter::Fixed) {
                            continue;
                        }
                        scale[k] *= 0.5;
                        if scale[k] < 1e-6 {
                            scale[k] = 0.0;
                        }
                        points[k] = place(k, scale[k]);
                    }
                }
            }
        }
        if ok {
            break;
        }
    }

    let set = NodeSet { dim: 2, points, regions, h1, h2, n1, n2, seed };
    if set.min_pairwise_distance() < min_sep {
        return Err(Error::invalid("nodes", "could not separate perturbed nodes"));
    }
    Ok(set)
}

/// Evaluation grid covering the closed domain.
///
/// Interval: `m1` points. Rectangle: `m1 x m2` tensor grid. Waveguide: `m2`
/// stations along the duct with `m1` points spanning each cross-section.
pub fn eval_grid(domain: &Domain, m1: usize, m2: usize) -> Result<EvalGrid> {
    match domain {
        Domain::Interval => {
            if m1 < 2 {
                return Err(Error::invalid("m1", format!("need m1 >= 2 grid points, got {m1}")));
            }
            let points = (0..m1)
                .map(|i| [i as f64 / (m1 - 1) as f64, 0.0])
                .collect();
            Ok(EvalGrid { dim: 1, points })
        }
        Domain::Rectangle { width } => {
            if m1 < 2 {
                return Err(Error::invalid("m1", format!("need m1 >= 2, got {m1}")));
            }
            if m2 < 2 {
                return Err(Error::invalid("m2", format!("need m2 >= 2, got {m2}")));
            }
            let mut points = Vec::with_capacity(m1 * m2);
            for j in 0..m2 {
                let x2 = j as f64 / (m2 - 1) as f64;
                for i in 0..m1 {
                    let x1 = width * i as f64 / (m1 - 1) as f64;
                    points.push([x1, x2]);
                }
            }
            Ok(EvalGrid { dim: 2, points })
        }
        Domain::Waveguide { .. } => {
            if m1 < 2 {
                return Err(Error::invalid("m1", format!("need m1 >= 2, got {m1}")));
            }
            if m2 < 2 {
                return Err(Error::invalid("m2", format!("need m2 >= 2, got {m2}")));
            }
            let mut points = Vec::with_capacity(m1 * m2);
            for j in 0..m2 {
                let x2 = j as f64 / (m2 - 1) as f64;
                let (lo, _, w) = domain.section(x2)?;
                for i in 0..m1 {
                    points.push([lo + w * i as f64 / (m1 - 1) as f64, x2]);
                }
            }
            Ok(EvalGrid { dim: 2, points })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rng_is_deterministic_and_in_range() {
        let mut a = XorShift64::new(42);
        let mut b = XorShift64::new(42);
        let mut c = XorShift64::new(43);
        let xs: Vec<f64> = (0..100).map(|_| a.next_f64()).collect();
        let ys: Vec<f64> = (0..100).map(|_| b.next_f64()).collect();
        assert_eq!(xs, ys);
        assert!(xs.iter().all(|&x| (0.0..1.0).contains(&x)));
        assert!((0..100).map(|_| c.next_f64()).zip(&xs).any(|(y, &x)| y != x));
    }

    #[test]
    fn interval_nodes() {
        let set = nodes_interval(5).unwrap();
        assert_eq!(set.len(), 5);
        assert_eq!(set.region_indices(Region::Interior).len(), 3);
        assert_eq!(set.regions[0], Region::Left);
        assert_eq!(set.regions[4], Region::Right);
        assert_eq!(set.points[4][0], 1.0);
        assert!(nodes_interval(2).is_err());
    }

    #[test]
    fn rectangle_nodes() {
        let set = nodes_rectangle(3, 3, 1.0).unwrap();
        assert_eq!(set.len(), 9);
        assert_eq!(set.region_indices(Region::Interior).len(), 1);
        let set = nodes_rectangle(4, 5, 2.0).unwrap();
        assert_eq!(set.len(), 20);
        assert_eq!(set.region_indices(Region::Interior).len(), 6);
        for &i in &set.region_indices(Region::Left) {
            assert_eq!(set.points[i][1], 0.0);
        }
        for &i in &set.region_indices(Region::Right) {
            assert_eq!(set.points[i][1], 1.0);
        }
        assert!(nodes_rectangle(3, 2, 1.0).is_err());
    }

    #[test]
    fn duct_m_curves() {
        let domain = Domain::duct_m();
        if let Domain::Waveguide { lower, upper } = &domain {
            assert!((lower.eval(0.5) - 0.3).abs() < 1e-15);
            let expect = 0.8 - 0.3 * (1.0 + (-80.0f64 * 0.16).exp());
            assert!((upper.eval(0.3) - expect).abs() < 1e-12);
        } else {
            panic!("duct_m must be a waveguide");
        }
    }

    #[test]
    fn waveguide_counts_match_published_sizes() {
        // (n1, n2, N); +-10% band.
        let table = [
            (10, 12, 104),
            (11, 14, 131),
            (12, 15, 152),
            (14, 17, 194),
            (17, 21, 287),
            (20, 25, 396),
            (30, 37, 844),
            (40, 50, 1493),
        ];
        let domain = Domain::duct_m();
        for (n1, n2, expect) in table {
            let set = nodes_waveguide(n1, n2, &domain, 7).unwrap();
            let n = set.len() as f64;
            let e = expect as f64;
            assert!(
                (n - e).abs() <= 0.10 * e,
                "{n1}x{n2}: generated {n} nodes, published {expect}"
            );
        }
    }

    #[test]
    fn waveguide_determinism() {
        let domain = Domain::duct_m();
        let a = nodes_waveguide(12, 15, &domain, 3).unwrap();
        let b = nodes_waveguide(12, 15, &domain, 3).unwrap();
        assert_eq!(a.points, b.points);
        let c = nodes_waveguide(12, 15, &domain, 4).unwrap();
        assert!(a.points.iter().zip(&c.points).any(|(p, q)| p != q));
    }

    #[test]
    fn waveguide_structure() {
        let domain = Domain::duct_m();
        let set = nodes_waveguide(10, 12, &domain, 1).unwrap();
        let (lower, upper) = match &domain {
            Domain::Waveguide { lower, upper } => (lower, upper),
            _ => unreachable!(),
        };
        let mut counts = [0usize; 4];
        for i in 0..set.len() {
            let p = set.points[i];
            match set.regions[i] {
                Region::Left => {
                    counts[1] += 1;
                    assert_eq!(p[1], 0.0);
                }
                Region::Right => {
                    counts[2] += 1;
                    assert_eq!(p[1], 1.0);
                }
                Region::Wall => {
                    counts[3] += 1;
                    let d = (p[0] - lower.eval(p[1])).abs().min((p[0] - upper.eval(p[1])).abs());
                    assert!(d <= 1e-12, "wall node off the wall by {d:e}");
                }
                Region::Interior => {
                    counts[0] += 1;
                    let (lo, hi, _) = domain.section(p[1]).unwrap();
                    assert!(p[0] > lo && p[0] < hi && p[1] > 0.0 && p[1] < 1.0);
                }
            }
        }
        assert_eq!(counts.iter().sum::<usize>(), set.len());
        assert!(counts.iter().all(|&c| c > 0));
        // Left boundary carries n1 nodes in total: n1 - 2 plus two corners.
        assert_eq!(counts[1], set.n1 - 2);
    }

    #[test]
    fn waveguide_min_distance() {
        let domain = Domain::duct_m();
        for seed in [1, 2, 3, 99] {
            let set = nodes_waveguide(12, 15, &domain, seed).unwrap();
            assert!(set.min_pairwise_distance() >= 0.25 * set.h1.min(set.h2));
        }
    }

    #[test]
    fn eval_grids() {
        let g = eval_grid(&Domain::Interval, 60, 1).unwrap();
        assert_eq!(g.points.len(), 60);
        let g = eval_grid(&Domain::Rectangle { width: 1.0 }, 2, 2).unwrap();
        assert_eq!(g.points.len(), 4);
        assert!(g.points.contains(&[0.0, 0.0]) && g.points.contains(&[1.0, 1.0]));
        let domain = Domain::duct_m();
        let g = eval_grid(&domain, 60, 60).unwrap();
        assert_eq!(g.points.len(), 3600);
        for p in &g.points {
            let (lo, hi, _) = domain.section(p[1]).unwrap();
            assert!(p[0] >= lo - 1e-12 && p[0] <= hi + 1e-12);
            assert!((-1e-12..=1.0 + 1e-12).contains(&p[1]));
        }
    }

    #[test]
    fn from_parts_rejects_duplicates() {
        let pts = vec![[0.0, 0.0], [0.5, 0.0], [0.5, 0.0], [1.0, 0.0]];
        let regs = vec![Region::Left, Region::Interior, Region::Interior, Region::Right];
        assert!(NodeSet::from_parts(1, pts, regs, 0.5, 0.5).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn waveguide_invariants(n1 in 5usize..12, n2 in 5usize..12, seed in 0u64..1000) {
            let domain = Domain::duct_m();
            let set = nodes_waveguide(n1, n2, &domain, seed).unwrap();
            prop_assert!(set.min_pairwise_distance() >= 0.25 * set.h1.min(set.h2));
            for i in 0..set.len() {
                let p = set.points[i];
                match set.regions[i] {
                    Region::Left => prop_assert_eq!(p[1], 0.0),
                    Region::Right => prop_assert_eq!(p[1], 1.0),
                    Region::Wall => {
                        let (lower, upper) = match &domain {
                            Domain::Waveguide { lower, upper } => (lower, upper),
                            _ => unreachable!(),
                        };
                        let d = (p[0] - lower.eval(p[1]))
                            .abs()
                            .min((p[0] - upper.eval(p[1])).abs());
                        prop_assert!(d <= 1e-12);
                    }
                    Region::Interior => {
                        let (lo, hi, _) = domain.section(p[1]).unwrap();
                        prop_assert!(p[0] > lo && p[0] < hi);
                    }
                }
            }
        }
    }
}
