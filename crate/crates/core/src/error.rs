use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain where a model or formula is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A value violates a type invariant.
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    /// A data row could not be parsed or validated. `row` is 1-based and
    /// counts data rows only (header and metadata lines excluded).
    #[error("row {row}: {reason}")]
    Row { row: usize, reason: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("no model for {key}; valid keys: {valid}")]
    NotFound { key: String, valid: String },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }
}
