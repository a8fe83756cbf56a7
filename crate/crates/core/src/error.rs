use thiserror::Error;

/// Errors raised at the boundaries of numerical operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty batch")]
    EmptyBatch,

    #[error("batch index {index} out of bounds for dataset of {len} samples")]
    BatchOutOfBounds { index: usize, len: usize },

    #[error("duplicate batch index {0}")]
    DuplicateIndex(usize),

    #[error("flat curvature: finite-difference denominator is zero")]
    FlatCurvature,

    #[error("non-convex direction: directional curvature {0} is not positive")]
    NonConvexDirection(f64),

    #[error("singular normal equations in quadratic fit")]
    SingularFit,

    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("objective does not provide {0}")]
    Unsupported(&'static str),

    #[error("every grid run diverged: {0}")]
    AllDiverged(String),
}

pub type Result<T> = std::result::Result<T, Error>;
