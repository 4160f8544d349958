use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A point sits on a singular set of the operation (a Kelvin center, a pole, a kink).
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed arguments that violate an operation's preconditions.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A point lies outside the closed domain of a kernel or operator.
    #[error("point outside domain: {0}")]
    OutsideDomain(String),

    /// The kernel/domain combination has no implemented formula.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An iteration blew up.
    #[error("numerical divergence: {0}")]
    Divergence(String),

    /// A bracketing search found no sign change.
    #[error("no sign change: {0}")]
    NoBracket(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
