use thiserror::Error;

use crate::data::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("dimension mismatch for {what}: expected {expected}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("privacy budget does not match this run: {0}")]
    UncalibratedBudget(String),

    #[error("accountant out of range: no moment order produced a finite bound")]
    AccountantOutOfRange,

    #[error(
        "target epsilon {target} is outside the achievable range [{min_epsilon}, {max_epsilon}] \
         for sigma in [{sigma_lo}, {sigma_hi}]"
    )]
    CalibrationOutOfRange {
        target: f64,
        min_epsilon: f64,
        max_epsilon: f64,
        sigma_lo: f64,
        sigma_hi: f64,
    },
}

impl Error {
    pub(crate) fn dims(what: &'static str, expected: usize, actual: usize) -> Self {
        Error::DimensionMismatch { what, expected, actual }
    }
}
