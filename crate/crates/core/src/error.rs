use thiserror::Error;

/// Errors surfaced by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("lattice is degenerate (radical dimension {radical_dim})")]
    Degenerate { radical_dim: usize },
    #[error("lattice is not positive definite")]
    NotPositiveDefinite,
    #[error("non-integral pairing between generators {0} and {1}")]
    NonIntegral(usize, usize),
    #[error("odd norm at generator {0}")]
    NotEven(usize),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("entry out of machine range: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
