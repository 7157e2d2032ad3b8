use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A value violates the invariant of the type it is meant to build.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// An iterative method failed to meet its tolerance.
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("grid oracle found no points inside the set")]
    EmptyGrid,
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for failures caused by bad input rather than by a numeric method.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Numeric(_))
    }
}
