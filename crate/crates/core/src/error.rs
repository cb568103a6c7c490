use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid cyclic factor {0}: factors must be positive")]
    InvalidFactor(i64),
    #[error("{what}: size {needed} exceeds cap {limit}")]
    CapExceeded {
        what: &'static str,
        limit: u64,
        needed: String,
    },
    #[error("connection set is not closed under negation")]
    NotInverseClosed,
    #[error("element is not an involution")]
    NotInvolution,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid argument: {0}")]
    Domain(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn cap_exceeded(what: &'static str, limit: u64, needed: impl ToString) -> Error {
    Error::CapExceeded {
        what,
        limit,
        needed: needed.to_string(),
    }
}
