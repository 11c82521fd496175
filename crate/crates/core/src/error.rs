use thiserror::Error;

/// Errors surfaced by the matrix model and its verification suites.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("eigensolver failed to converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("elements live over different space specs")]
    SpaceMismatch,
    #[error("operation requires a square level, got ({0},{1})")]
    NotSquareLevel(usize, usize),
    #[error("element is not positive")]
    NotPositive,
    #[error("element is not a member of the ideal")]
    NotMember,
    #[error("element is not an order projection")]
    NotProjection,
    #[error("element must have unit norm, got {0}")]
    NotUnitNorm(f64),
    #[error("requested level {0} exceeds the configured maximum {1}")]
    LevelTooLarge(usize, usize),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("hypothesis unmet: {0}")]
    HypothesisUnmet(String),
    #[error("the zero projection is not admitted here")]
    ZeroProjection,
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
