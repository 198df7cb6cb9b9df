//! Command-line driver for the depletion toolkit.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use depletion::ModelError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error("invariant check failed: {0}")]
    Invariant(String),
    #[error("numerical failure: {0}")]
    Numeric(ModelError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<ModelError> for CliError {
    fn from(err: ModelError) -> Self {
        match err {
            ModelError::StepSizeUnderflow { .. } | ModelError::EigenConvergence { .. } | ModelError::SingularFamily { .. } => {
                CliError::Numeric(err)
            }
            other => CliError::Config(config::ConfigError::new("<scenario>", other.to_string())),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}
