use std::path::PathBuf;

use sddo_core::design::ValidationErrors;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("invalid configuration:\n{0}")]
    Invalid(#[from] ValidationErrors),

    #[error(transparent)]
    Engine(#[from] sddo_core::Error),

    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("reproducibility check failed:\n{0}")]
    Mismatch(String),

    #[error("interim trigger failed in most replicates: {0}")]
    TriggerFailed(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Invalid(_) => 2,
            CliError::Engine(sddo_core::Error::Validation(_)) => 2,
            CliError::Engine(_) | CliError::Io { .. } => 3,
            CliError::Mismatch(_) => 4,
            CliError::TriggerFailed(_) => 5,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
