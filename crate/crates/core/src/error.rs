use thiserror::Error;

/// Errors surfaced by the public API.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid code distance {0}: must be odd and at least 3")]
    InvalidDistance(u32),

    #[error("unknown qubit id {0}")]
    UnknownQubit(usize),

    #[error("unknown cell id {0}")]
    UnknownCell(usize),

    #[error(
        "extrapolation invalid: target {target} must lie strictly between 0 and a' = {a_prime}"
    )]
    ExtrapolationRange { target: f64, a_prime: f64 },

    #[error("measurement outcome {0} is a failure and has no correction")]
    FailedOutcome(String),

    #[error("matching requires an even number of nodes, got {0}")]
    OddMatching(usize),

    #[error("no crossing in range: {0}")]
    NoCrossing(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
