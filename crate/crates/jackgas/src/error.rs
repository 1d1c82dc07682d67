use std::fmt;

/// Error type shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An input lies outside the mathematical domain of the operation
    /// (cell outside a diagram, partition outside a box, point on a branch cut).
    Domain(String),
    /// Model parameters violate a constraint (e.g. `ab >= 1` in Cases I/IV).
    Parameter(String),
    /// Inconsistent or incomplete run configuration.
    Config(String),
    /// The request is valid but too large to compute (state explosion, degree cap).
    Resource(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Parameter(msg) => write!(f, "parameter error: {msg}"),
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Resource(msg) => write!(f, "resource error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
