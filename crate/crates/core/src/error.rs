use thiserror::Error;

/// Errors raised by the combinatorial operations of this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThetaError {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("cannot compose: {0}")]
    Composition(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("power series expansion failed: {0}")]
    Expansion(String),

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, ThetaError>;
