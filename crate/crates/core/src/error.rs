use thiserror::Error;

/// Error type shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point outside the map domain: {0}")]
    Domain(String),
    #[error("orbit escaped the domain at step {index}")]
    Escape { index: i64 },
    #[error("argument out of range: {0}")]
    Range(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("word is not admissible: {0}")]
    Admissibility(String),
    #[error("decode incomplete, {consumed} symbols consumed, unconsumed suffix {remainder:?}")]
    Incomplete { consumed: usize, remainder: String },
    #[error("malformed word: {0}")]
    Format(String),
    #[error("enumeration level {level} exceeds cap {cap}")]
    Resource { level: usize, cap: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("power iteration did not converge within {steps} steps")]
    Convergence { steps: usize },
    #[error("no crossing found in the supplied grid")]
    NotFound,
    #[error("operation unsupported for this measure kind: {0}")]
    Kind(String),
    #[error("correlations fell below the noise floor before {needed} usable points")]
    InsufficientSignal { needed: usize },
    #[error("empty data")]
    EmptyData,
}

pub type Result<T> = std::result::Result<T, Error>;
