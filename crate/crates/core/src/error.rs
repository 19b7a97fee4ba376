use thiserror::Error;

/// Errors produced by the productivity-index library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{what} is undefined at {value}: {reason}")]
    Domain {
        what: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("radius {r} m lies outside the reservoir annulus [{r_w}, {r_e}]")]
    RadiusOutOfRange { r: f64, r_w: f64, r_e: f64 },

    #[error("speed {v} m/s lies outside [0, {v_max}]")]
    SpeedOutOfRange { v: f64, v_max: f64 },

    #[error("interval [{r1}, {r2}] is not an ordered sub-interval of [{r_w}, {r_e}]")]
    IntervalOutOfRange { r1: f64, r2: f64, r_w: f64, r_e: f64 },

    #[error(
        "adaptive quadrature did not converge after {panels} panels \
         (estimate {estimate:e}, error estimate {error_estimate:e})"
    )]
    QuadratureNonConvergence {
        estimate: f64,
        error_estimate: f64,
        panels: usize,
    },

    #[error("ODE step size underflow at r = {r} m")]
    StepSizeUnderflow { r: f64 },

    #[error("at least {required} measurements required, got {got}")]
    InsufficientData { required: usize, got: usize },

    #[error("degenerate measurement set: {0}")]
    DegenerateData(String),

    #[error("measurement row {row}: {reason}")]
    InvalidMeasurement { row: usize, reason: String },

    #[error("CSV error: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Csv(err.to_string())
    }
}
