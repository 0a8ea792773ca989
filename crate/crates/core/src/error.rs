use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("prime {0} is a bad prime for this curve")]
    BadPrime(u64),
    #[error("factorization over Q is not available: {0}")]
    UnknownFactorization(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("unknown local profile entries: {}", .0.join(", "))]
    UnknownProfile(Vec<String>),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
