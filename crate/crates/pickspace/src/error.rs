//! Error type shared across the library.

use thiserror::Error;

/// All failure modes of the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point lies on or outside the unit ball boundary (norm {norm})")]
    PointOutsideDomain { norm: f64 },

    #[error("operation requires a complete Pick kernel; {family} is not flagged CNP")]
    NonCnpKernel { family: String },

    #[error("invalid kernel parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "series truncation insufficient: tail bound {bound:.3e} exceeds tolerance {tol:.3e} at trunc {trunc}"
    )]
    TailBoundNotMet { bound: f64, tol: f64, trunc: usize },

    #[error("kernel value overflows double precision at the requested points")]
    Overflow,

    #[error("quadrature failed to converge to the requested tolerance")]
    QuadratureFailure,

    #[error("duplicate points at indices {i} and {j}")]
    DuplicatePoints { i: usize, j: usize },

    #[error("operation requires at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },

    #[error("matrix is indefinite beyond tolerance: min eigenvalue {min_eig:.3e}")]
    IndefiniteMatrix { min_eig: f64 },

    #[error("matrix is Hermitian only up to defect {defect:.3e}, above tolerance {tol:.3e}")]
    HermitianDefect { defect: f64, tol: f64 },

    #[error("matrix numerically singular (condition estimate {cond:.3e})")]
    SingularMatrix { cond: f64 },

    #[error("eigenvalue within indeterminacy tolerance of zero ({value:.3e}); perturb the points")]
    IndeterminateSign { value: f64 },

    #[error("norm budget rho={rho} is below the minimal multiplier norm for this problem")]
    RhoBelowMinimum { rho: f64 },

    #[error("isometry completion defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    UnitaryDefect { defect: f64, tol: f64 },

    #[error("residual radicand {value:.3e} below -1e-10: inconsistent kernel data")]
    NegativeResidual { value: f64 },

    #[error("cross-validation failed: {method_a}={value_a:.12e} vs {method_b}={value_b:.12e}")]
    OracleDisagreement {
        method_a: &'static str,
        value_a: f64,
        method_b: &'static str,
        value_b: f64,
    },

    #[error("search failed: {0}")]
    SearchFailed(String),

    #[error("enumeration size cap exceeded: n={n} > {cap}")]
    EnumerationCap { n: usize, cap: usize },

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
