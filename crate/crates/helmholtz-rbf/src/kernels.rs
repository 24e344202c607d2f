//! Radial kernels and their derivative stacks.
//!
//! A kernel is a smooth even function `phi` together with a shape parameter
//! `eps`; the basis function centred at `c` is `x -> phi(eps * |x - c|)`.
//! Everything downstream (collocation rows, eigenvalue pencils, flat-limit
//! probes) consumes kernels through the derivative bundles defined here, so
//! each family supplies closed forms that stay finite at `r = 0`.

/// Kernel family. All three are infinitely smooth and positive definite
/// (multiquadric: conditionally positive definite of order one).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `phi(t) = sqrt(1 + t^2)`
    Multiquadric,
    /// `phi(t) = exp(-t^2)`
    Gaussian,
    /// `phi(t) = 1 / (1 + t^2)`
    InverseQuadratic,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Multiquadric => "mq",
            Family::Gaussian => "ga",
            Family::InverseQuadratic => "iq",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        match s.to_ascii_lowercase().as_str() {
            "mq" | "multiquadric" => Some(Family::Multiquadric),
            "ga" | "gaussian" => Some(Family::Gaussian),
            "iq" | "inverse-quadratic" | "inversequadratic" => Some(Family::InverseQuadratic),
            _ => None,
        }
    }
}

/// A kernel family with a fixed shape parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    family: Family,
    eps: f64,
}

impl Kernel {
    /// Errors unless `eps` is finite and strictly positive.
    pub fn new(family: Family, eps: f64) -> crate::Result<Kernel> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(crate::Error::invalid("eps", format!("shape parameter must be finite and > 0, got {eps}")));
        }
        Ok(Kernel { family, eps })
    }

    /// Panics if `eps <= 0` or non-finite.
    pub fn multiquadric(eps: f64) -> Kernel {
        Kernel::new(Family::Multiquadric, eps).expect("multiquadric shape parameter")
    }

    /// Panics if `eps <= 0` or non-finite.
    pub fn gaussian(eps: f64) -> Kernel {
        Kernel::new(Family::Gaussian, eps).expect("gaussian shape parameter")
    }

    /// Panics if `eps <= 0` or non-finite.
    pub fn inverse_quadratic(eps: f64) -> Kernel {
        Kernel::new(Family::InverseQuadratic, eps).expect("inverse quadratic shape parameter")
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `phi(eps * r)`.
    pub fn eval(&self, r: f64) -> f64 {
        let t2 = (self.eps * r) * (self.eps * r);
        match self.family {
            Family::Multiquadric => (1.0 + t2).sqrt(),
            Family::Gaussian => (-t2).exp(),
            Family::InverseQuadratic => 1.0 / (1.0 + t2),
        }
    }

    /// Radial derivative bundle at `t = eps * r`; every field is finite at
    /// `r = 0`.
    pub fn derivatives(&self, r: f64) -> RadialDerivatives {
        let t2 = (self.eps * r) * (self.eps * r);
        match self.family {
            Family::Multiquadric => {
                let u = 1.0 / (1.0 + t2).sqrt();
                let u3 = u * u * u;
                RadialDerivatives { value: 1.0 / u, q1: u, d2: u3, q2: -u3 }
            }
            Family::Gaussian => {
                let e = (-t2).exp();
                RadialDerivatives { value: e, q1: -2.0 * e, d2: (4.0 * t2 - 2.0) * e, q2: 4.0 * e }
            }
            Family::InverseQuadratic => {
                let v = 1.0 / (1.0 + t2);
                let v2 = v * v;
                let v3 = v2 * v;
                RadialDerivatives {
                    value: v,
                    q1: -2.0 * v2,
                    d2: (6.0 * t2 - 2.0) * v3,
                    q2: 8.0 * v3,
                }
            }
        }
    }

    /// Gradient of `x -> phi(eps * |x - c|)` in two dimensions.
    pub fn grad(&self, x: [f64; 2], c: [f64; 2]) -> [f64; 2] {
        let r = dist(x, c);
        let d = self.derivatives(r);
        let e2 = self.eps * self.eps;
        [e2 * (x[0] - c[0]) * d.q1, e2 * (x[1] - c[1]) * d.q1]
    }

    /// Hessian of `x -> phi(eps * |x - c|)` in two dimensions.
    pub fn hessian(&self, x: [f64; 2], c: [f64; 2]) -> [[f64; 2]; 2] {
        let r = dist(x, c);
        let d = self.derivatives(r);
        let e2 = self.eps * self.eps;
        let e4 = e2 * e2;
        let dx = [x[0] - c[0], x[1] - c[1]];
        let mut h = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                h[i][j] = e4 * dx[i] * dx[j] * d.q2;
                if i == j {
                    h[i][j] += e2 * d.q1;
                }
            }
        }
        h
    }

    /// Laplacian of `x -> phi(eps * |x - c|)` in `dim` dimensions
    /// (`dim` is 1 or 2).
    pub fn laplacian(&self, r: f64, dim: usize) -> f64 {
        debug_assert!(dim == 1 || dim == 2);
        let d = self.derivatives(r);
        let e2 = self.eps * self.eps;
        // sum_i d^2/dx_i^2 = eps^2 (dim * q1 + t^2 * q2) and q1 + t^2 q2 = d2.
        e2 * (d.d2 + (dim as f64 - 1.0) * d.q1)
    }

    /// Derivatives `d^n/dx^n phi(eps * (x - c))` for `n = 0..=4` in one
    /// dimension, with the chain-rule powers of `eps` applied.
    pub fn derivs_1d(&self, x: f64, c: f64) -> [f64; 5] {
        let e = self.eps;
        let t = e * (x - c);
        let t2 = t * t;
        let raw = match self.family {
            Family::Multiquadric => {
                let s = (1.0 + t2).sqrt();
                let u = 1.0 / s;
                let u2 = u * u;
                let u3 = u2 * u;
                let u5 = u3 * u2;
                [s, t * u, u3, -3.0 * t * u5, u5 * (15.0 * t2 * u2 - 3.0)]
            }
            Family::Gaussian => {
                let g = (-t2).exp();
                [
                    g,
                    -2.0 * t * g,
                    (4.0 * t2 - 2.0) * g,
                    (12.0 * t - 8.0 * t2 * t) * g,
                    (16.0 * t2 * t2 - 48.0 * t2 + 12.0) * g,
                ]
            }
            Family::InverseQuadratic => {
                let v = 1.0 / (1.0 + t2);
                let v2 = v * v;
                let v3 = v2 * v;
                let v4 = v3 * v;
                let v5 = v4 * v;
                [
                    v,
                    -2.0 * t * v2,
                    (6.0 * t2 - 2.0) * v3,
                    24.0 * t * v3 - 48.0 * t2 * t * v4,
                    24.0 * v3 - 288.0 * t2 * v4 + 384.0 * t2 * t2 * v5,
                ]
            }
        };
        let mut out = [0.0; 5];
        let mut scale = 1.0;
        for n in 0..5 {
            out[n] = raw[n] * scale;
            scale *= e;
        }
        out
    }

    /// Coefficients `a_0 ..= a_order` of the even Taylor expansion
    /// `phi(t) = sum_j a_j t^(2j)`.
    pub fn taylor_coeffs(&self, order: usize) -> Vec<f64> {
        let mut a = Vec::with_capacity(order + 1);
        match self.family {
            Family::Multiquadric => {
                // binomial series for (1 + t^2)^(1/2)
                let mut c = 1.0;
                for j in 0..=order {
                    a.push(c);
                    c *= (0.5 - j as f64) / (j as f64 + 1.0);
                }
            }
            Family::Gaussian => {
                let mut c = 1.0;
                for j in 0..=order {
                    a.push(c);
                    c *= -1.0 / (j as f64 + 1.0);
                }
            }
            Family::InverseQuadratic => {
                for j in 0..=order {
                    a.push(if j % 2 == 0 { 1.0 } else { -1.0 });
                }
            }
        }
        a
    }
}

/// Radial derivative data of `phi` at `t = eps * r`.
///
/// `q1 = phi'(t) / t` and `q2 = (phi''(t) - phi'(t)/t) / t^2` are the
/// quotients that appear in Cartesian gradients and Hessians; both are
/// supplied by their analytic continuation at `t = 0`.
#[derive(Debug, Clone, Copy)]
pub struct RadialDerivatives {
    /// `phi(t)`
    pub value: f64,
    /// `phi'(t) / t`
    pub q1: f64,
    /// `phi''(t)`
    pub d2: f64,
    /// `(phi''(t) - phi'(t)/t) / t^2`
    pub q2: f64,
}

pub(crate) fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}
