use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    /// A nonzero coefficient was generated outside the retained bar/u window.
    #[error("truncation overflow: {0}")]
    Truncation(String),
    #[error("chain is not closed: {0}")]
    NotClosed(String),
    #[error("rank deficiency: {0}")]
    RankDeficient(String),
    #[error("unsupported query: {0}")]
    Unsupported(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn truncation(msg: impl Into<String>) -> Self {
        Error::Truncation(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
