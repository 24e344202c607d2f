//! Meshfree solver for the Helmholtz equation in waveguides, built on global
//! radial basis function (RBF) collocation.
//!
//! The library solves time-harmonic acoustic transmission problems on three
//! model geometries with non-reflecting radiation boundary conditions:
//!
//! * an interval with impedance conditions at both ends,
//! * a rectangular duct with modal radiation conditions and sound-hard walls,
//! * a two-dimensional duct with curved walls and full Dirichlet-to-Neumann
//!   (DtN) radiation conditions driven by a point source.
//!
//! Beyond the solver itself, the crate packages the analysis tools needed to
//! use RBF collocation responsibly:
//!
//! * [`singularity`] locates the discrete singular wavenumbers of the 1D
//!   collocation matrix by solving a quadratic eigenvalue problem,
//! * [`flatlimit`] classifies the small-shape-parameter (flat) limit of a
//!   node set / problem pair through polynomial unisolvency ranks,
//! * [`errorest`] computes a posteriori error estimates from modal
//!   decompositions of the interior residual,
//! * [`shapeconv`] runs shape-parameter sweeps, convergence ladders, and
//!   exponential-rate fits.
//!
//! # Quick start
//!
//! Solve the interval problem with multiquadric kernels and compare against
//! the exact solution `exp(i kappa x)`:
//!
//! ```
//! use helmholtz_rbf::collocation::{solve, ProblemSpec};
//! use helmholtz_rbf::geometry::{nodes_interval, Domain, eval_grid};
//! use helmholtz_rbf::kernels::Kernel;
//! use num_complex::Complex64;
//!
//! let problem = ProblemSpec::one_d(2.0 * std::f64::consts::PI);
//! let nodes = nodes_interval(30).unwrap();
//! let sol = solve(&problem, &nodes, Kernel::multiquadric(2.0), None).unwrap();
//! let grid = eval_grid(&Domain::Interval, 60, 1).unwrap();
//! let err = grid
//!     .points
//!     .iter()
//!     .map(|p| {
//!         let exact = (Complex64::i() * problem.kappa() * p[0]).exp();
//!         (sol.approximant.evaluate(p) - exact).norm()
//!     })
//!     .fold(0.0f64, f64::max);
//! assert!(err < 1e-3);
//! ```
//!
//! The `examples/` directory exercises every major capability end to end
//! (`cargo run --release --example epsilon_sweep`, etc.), and the `helmrbf`
//! binary exposes the same workflows as subcommands (`solve`, `sweep`,
//! `converge`, `singular`, `limit-classify`, `estimate`, `reproduce`,
//! `nodes`).

pub mod cli;
pub mod collocation;
pub mod errorest;
pub mod flatlimit;
pub mod geometry;
pub mod kernels;
pub mod linalg;
pub mod quadrature;
pub mod shapeconv;
pub mod singularity;

/// Errors shared across the crate.
///
/// Validation failures name the offending input; numerical failures carry
/// enough context (pivot index, stuck eigenvalue index) to diagnose the run.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input for {field}: {message}")]
    Invalid { field: &'static str, message: String },
    #[error("matrix is numerically singular at pivot {pivot}")]
    SingularMatrix { pivot: usize },
    #[error("eigenvalue iteration failed to converge at index {index} after {sweeps} sweeps")]
    EigNoConvergence { index: usize, sweeps: usize },
    #[error("quadrature did not converge: requested tolerance {tol:e}, reached depth {depth}")]
    QuadratureDepth { tol: f64, depth: usize },
    #[error("unresolved regime: {0}")]
    Unresolved(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, message: impl Into<String>) -> Self {
        Error::Invalid { field, message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
