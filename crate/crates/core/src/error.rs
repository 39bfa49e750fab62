use thiserror::Error;

use crate::apparatus::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("no fringes: {0}")]
    NoFringes(String),

    #[error("configuration rejected by validation: {}", .0.summary())]
    Validation(ValidationReport),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
