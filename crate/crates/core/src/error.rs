use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("frequency {omega} lies outside the band [{band_min}, {band_max}]")]
    OutOfBand {
        omega: f64,
        band_min: f64,
        band_max: f64,
    },

    #[error("grid too coarse: {reason}; use at least {suggested} points per axis")]
    Resolution { reason: String, suggested: usize },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("invalid master-equation coefficients: {0}")]
    InvalidCoefficients(String),

    #[error("step size {dt} violates dt*|A| < {limit} (|A| = {norm})")]
    StepSize { dt: f64, norm: f64, limit: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
