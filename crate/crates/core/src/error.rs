use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A requested dimension or enumeration exceeds the guard for the operation.
    #[error("size limit exceeded: {what} = {value} (allowed {min}..={max})")]
    Size {
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },

    /// Inputs are individually valid but violate the operation's contract.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A numeric parameter falls outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn size(what: &'static str, value: usize, min: usize, max: usize) -> Self {
        Error::Size {
            what,
            value,
            min,
            max,
        }
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
