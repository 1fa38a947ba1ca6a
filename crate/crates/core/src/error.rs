use thiserror::Error;

/// Errors produced by the pricing library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A bracketing solver could not locate a sign change or ran out of iterations.
    #[error("solver failure: {0}")]
    Solver(String),

    /// A structurally invalid value (distribution, lottery, environment).
    #[error("invalid {what}: {reason}")]
    Invalid { what: String, reason: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn invalid(what: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Invalid {
        what: what.into(),
        reason: reason.into(),
    }
}
