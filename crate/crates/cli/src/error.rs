use thiserror::Error;

use soliton_toffoli::Error as CoreError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration for `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("could not parse config: {0}")]
    Parse(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn config(field: &str, reason: impl Into<String>) -> Self {
        CliError::Config {
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    /// 3 for numerical failure, 1 for an unresolved gate, 2 for everything
    /// else (configuration and i/o).
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(CoreError::Blowup { .. }) => 3,
            CliError::Core(CoreError::AmbiguousReadout { .. }) => 1,
            _ => 2,
        }
    }
}
