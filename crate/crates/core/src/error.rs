use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed input text. `line`/`column` are 1-based; 0 when unknown.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// Every violated structural constraint, in discovery order.
    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),

    /// An argument outside the operation's domain (unknown state, bad index, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A precondition on a computer set or chain class does not hold.
    #[error("contract violated: {0}")]
    Contract(String),

    /// A configured enumeration or size cap was exceeded.
    #[error("resource limit: {0}")]
    Resource(String),

    #[error("no convergence after {iterations} iterations (last difference {last_difference})")]
    NoConvergence {
        iterations: usize,
        last_difference: String,
    },

    /// Should be unreachable; indicates a bug in classification or solving.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable tag, used by the CLI reason line and the C ABI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Validation(_) => "validation",
            Error::Domain(_) => "domain",
            Error::Contract(_) => "contract",
            Error::Resource(_) => "resource",
            Error::NoConvergence { .. } => "no-convergence",
            Error::Internal(_) => "internal",
            Error::Io(_) => "io",
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
