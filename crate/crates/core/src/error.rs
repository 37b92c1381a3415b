use thiserror::Error;

#[derive(Debug, Error)]
pub enum FhError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate parameters: {0}")]
    Degenerate(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unknown case `{0}`")]
    UnknownCase(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, FhError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(FhError::Domain(msg.into()))
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(FhError::Invalid(msg.into()))
}
