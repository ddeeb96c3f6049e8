use thiserror::Error;

/// Errors produced by the spectral toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coupling and diagonal sequences differ in length ({a} vs {b})")]
    LengthMismatch { a: usize, b: usize },

    #[error("period must be at least 2, got {0}")]
    PeriodTooSmall(usize),

    #[error("coupling a[{index}] = {value} is not positive")]
    NonPositiveCoupling { index: usize, value: f64 },

    #[error("entry {name}[{index}] is not finite")]
    NonFinite { name: &'static str, index: usize },

    #[error("scale factor must be positive and finite, got {0}")]
    NonPositiveScale(f64),

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("matrix must have at least one row")]
    EmptyMatrix,

    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("discriminant root search found {found} band edges, expected {expected}")]
    RootCountMismatch { found: usize, expected: usize },

    #[error("band index {index} out of range 1..={p}")]
    BandIndexOutOfRange { index: usize, p: usize },

    #[error("quasi-momentum must lie in [0, pi], got {0}")]
    MomentumOutOfRange(f64),

    #[error("Floquet matrix is only formed at k = 0 or k = pi, got {0}")]
    UnsupportedK(f64),

    #[error("perturbation size c must satisfy 0 < c < 1, got {0}")]
    BadC(f64),

    #[error("index {index} out of range for p = {p}: {reason}")]
    IndexOutOfRange { index: usize, p: usize, reason: &'static str },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid instance JSON: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
