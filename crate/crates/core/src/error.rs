use thiserror::Error;

/// Errors raised by the library. Verification failures are *not* errors:
/// they are reported as data (certificates, reports) so callers can inspect
/// margins.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("certification failure: {0}")]
    Certification(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("task rejected: {0}")]
    TaskRejected(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
