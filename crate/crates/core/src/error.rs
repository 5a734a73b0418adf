use thiserror::Error;

/// Errors raised by the changepoint toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An index range or argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A parameter combination is invalid (penalties, K, window sizes, ...).
    #[error("configuration error: {0}")]
    Config(String),
    /// Input data is unusable (empty, non-finite values, ...).
    #[error("data error: {0}")]
    Data(String),
    /// The request exceeds the size the operation is willing to handle.
    #[error("refused: {0}")]
    Refused(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
