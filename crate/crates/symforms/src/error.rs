use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("degenerate point: cz + d = 0")]
    DegeneratePoint,

    #[error("imaginary part too small: |q| = {q_abs} >= 0.95, tail bound meaningless")]
    ImaginaryPartTooSmall { q_abs: f64 },

    #[error("unsupported Eisenstein weight {0} (expected 2, 4 or 6)")]
    UnsupportedWeight(i64),

    #[error("rank mismatch: expected {expected} components, got {got}")]
    RankMismatch { expected: usize, got: usize },

    #[error("residual dependence on the formal variable Z (input is not in the expected frame)")]
    ResidualZDependence,

    #[error("singular matrix")]
    SingularMatrix,

    #[error("weight mismatch: expected {expected}, got {got}")]
    WeightMismatch { expected: i64, got: i64 },

    #[error("not in the image of the map: {0}")]
    NotInImage(String),

    #[error("weight hypothesis violated: k = {k} must exceed n = {n}")]
    WeightHypothesisViolated { k: i64, n: i64 },

    #[error("weight {lam} too small (must exceed {bound})")]
    WeightTooSmall { lam: i64, bound: i64 },

    #[error("depth {depth} exceeds the bound {bound}")]
    DepthExceeded { depth: usize, bound: usize },

    #[error("coefficient index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("coefficient carries a nonzero power of the formal constant where a plain rational is required")]
    NonRationalCoefficient,

    #[error("unknown name: {0}")]
    UnknownName(String),

    #[error("cache entry corrupt: {0}")]
    CacheCorrupt(String),

    #[error("invalid JSON: {0}")]
    Json(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
