//! Error type shared across the library.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// LU elimination without pivoting hit a pivot below the breakdown threshold.
    ZeroPivot { index: usize, value: f64 },
    /// Matrix dimensions do not conform for the requested operation.
    ShapeMismatch {
        what: &'static str,
        expected: String,
        found: String,
    },
    /// Grid or matrix is too small for the requested operator or view.
    TooSmall {
        what: &'static str,
        minimum: usize,
        got: usize,
    },
    /// A field developed NaN or infinite entries during time stepping.
    NonFinite { what: &'static str, time: f64 },
    /// Rate estimation requires strictly positive errors.
    NonPositiveError { index: usize, value: f64 },
    /// Too few entries to trim one maximum and one minimum and still average.
    TooFewRates { needed: usize, got: usize },
    /// Numerical output changed with the worker count.
    DeterminismViolated { workers: usize, rel_dev: f64 },
    /// Invalid run configuration.
    InvalidConfig(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ZeroPivot { index, value } => {
                write!(f, "zero pivot at index {index} (value {value:e})")
            }
            Error::ShapeMismatch {
                what,
                expected,
                found,
            } => write!(
                f,
                "shape mismatch in {what}: expected {expected}, found {found}"
            ),
            Error::TooSmall { what, minimum, got } => {
                write!(f, "{what} too small: need at least {minimum}, got {got}")
            }
            Error::NonFinite { what, time } => {
                write!(f, "{what} became non-finite at t = {time}")
            }
            Error::NonPositiveError { index, value } => {
                write!(
                    f,
                    "error value at index {index} is not positive ({value:e})"
                )
            }
            Error::TooFewRates { needed, got } => {
                write!(
                    f,
                    "need at least {needed} values to trim and average, got {got}"
                )
            }
            Error::DeterminismViolated { workers, rel_dev } => write!(
                f,
                "result with {workers} workers deviates from 1-worker run by {rel_dev:e} (relative)"
            ),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
