use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("time {t} outside spline domain [{start}, {end}]")]
    Domain { t: f64, start: f64, end: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("knot span {0} is longer than the vehicle")]
    SpanInvalid(usize),
    #[error("no path found after {expansions} expansions")]
    NoPath { expansions: usize },
    #[error("objective returned a non-finite value at the starting point")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, Error>;
