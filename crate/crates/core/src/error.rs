use thiserror::Error;

/// Errors shared across all modules of the crate.
#[derive(Error, Debug, Clone)]
pub enum Error {
    #[error("dimension mismatch: spec has d = {expected}, vector has length {got}")]
    DimensionMismatch { expected: u32, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("weight is not radial: {0}")]
    NonRadial(String),

    #[error("profile is not monotone: {0}")]
    NonMonotoneProfile(String),

    #[error("ratio denominator is zero at k = {0:?}")]
    RatioDenominatorZero(Vec<i64>),

    #[error("count ceiling exceeded while counting {context}")]
    CountCeiling { context: String },

    #[error("ambiguous boundary: point norm within guard band of r = {r} for p = {p}")]
    AmbiguousBoundary { p: f64, r: f64 },

    #[error("tail series diverges or converges too slowly: {0}")]
    DivergentTail(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("function not invertible on the required range: {0}")]
    NotInvertible(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("malformed spec JSON: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
