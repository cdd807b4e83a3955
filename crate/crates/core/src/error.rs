use thiserror::Error;

/// Errors raised by every density route in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("symmetry violation: {0}")]
    Symmetry(String),

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("contour error: {0}")]
    Contour(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Short machine-parsable tag used by the CLI error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Symmetry(_) => "symmetry",
            Error::Consistency(_) => "consistency",
            Error::Budget(_) => "budget",
            Error::Contour(_) => "contour",
            Error::Numeric(_) => "numeric",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
