use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Invalid user-supplied parameter. `field` names the offending setting.
    #[error("invalid configuration for `{field}`: {reason}")]
    Config { field: &'static str, reason: String },

    #[error("array length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("numerical blow-up (non-finite field) at t = {time}")]
    Blowup { time: f64 },

    #[error("initial norms are not initialized")]
    UninitializedNorm,

    #[error("field has zero norm")]
    ZeroNorm,

    /// Centers of the two components are closer than the ordering tolerance.
    #[error("ambiguous target readout: center separation {separation} within +/-{tolerance}")]
    AmbiguousReadout { separation: f64, tolerance: f64 },

    #[error("invalid bracket [{lo}, {hi}]: {reason}")]
    InvalidBracket { lo: f64, hi: f64, reason: String },

    #[error("empty parameter list: {0}")]
    EmptyScan(&'static str),
}

impl Error {
    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Config {
            field,
            reason: reason.into(),
        }
    }
}
