use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// A recovered quantity fell outside its declared interval, or two
    /// independent routes disagreed beyond tolerance.
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("lower bound is zero; realization not unique")]
    LowerBoundZero,

    #[error("mainlobe spans the entire angle grid")]
    NoSidelobes,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn consistency(msg: impl Into<String>) -> Error {
    Error::Consistency(msg.into())
}
