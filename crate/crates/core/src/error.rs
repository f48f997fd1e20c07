use num_complex::Complex64;
use thiserror::Error;

/// Errors raised across the crate.
///
/// Variants map onto distinct failure classes so that front-ends can report
/// them with their own exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("stability error: {0}")]
    Stability(String),

    #[error("sampling error: {0}")]
    Sampling(String),

    #[error("equivalence error: {0}")]
    Equivalence(String),

    #[error("numeric error: {0}")]
    Numeric(NumericFailure),

    #[error("trial error: {0}")]
    Trial(String),

    #[error("campaign error: {0}")]
    Campaign(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Schema(e.to_string())
    }
}

/// Diagnostics attached to a computation that did not reach its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericFailure {
    pub message: String,
    /// Best value available when the computation gave up.
    pub partial: Complex64,
    pub estimated_error: f64,
}

impl std::fmt::Display for NumericFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} (partial value {}, estimated error {:.3e})",
            self.message, self.partial, self.estimated_error
        )
    }
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn stability(msg: impl Into<String>) -> Self {
        Error::Stability(msg.into())
    }

    pub(crate) fn numeric(
        msg: impl Into<String>,
        partial: Complex64,
        estimated_error: f64,
    ) -> Self {
        Error::Numeric(NumericFailure {
            message: msg.into(),
            partial,
            estimated_error,
        })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
