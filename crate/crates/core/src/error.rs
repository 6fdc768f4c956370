use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension {n}: {reason}")]
    UnsupportedDimension { n: usize, reason: &'static str },

    #[error("tensor is not trace-free: max trace {max_trace:e} exceeds {tol:e}")]
    NotTraceFree { max_trace: f64, tol: f64 },

    #[error("curvature data inconsistent: {0}")]
    Inconsistent(String),

    #[error("curvature symmetry violated ({which}): {violation:e} exceeds {tol:e}")]
    SymmetryViolation {
        which: &'static str,
        violation: f64,
        tol: f64,
    },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("volume is not finite for this geometry: {0}")]
    Noncompact(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("reduced gradient vanished at {params:?} but the full Euler-Lagrange residual is {residual:e}")]
    ReductionMismatch { params: Vec<f64>, residual: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
