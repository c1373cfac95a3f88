use chaplygin_core::Error as CoreError;
use thiserror::Error;

/// Failures of a command, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("inadmissible input: {0}")]
    Inadmissible(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("tolerance exceeded: {0}")]
    Tolerance(String),

    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Inadmissible(_) => 3,
            CliError::Internal(_) | CliError::Io(_) => 4,
            CliError::Tolerance(_) => 5,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let regime = match &e {
            CoreError::Regime(_) => true,
            CoreError::AtTime { source, .. } => matches!(**source, CoreError::Regime(_)),
            _ => false,
        };
        if regime {
            // a scheme that cannot handle the configured data
            CliError::Config(e.to_string())
        } else if e.is_inadmissible_input() {
            CliError::Inadmissible(e.to_string())
        } else {
            CliError::Internal(e.to_string())
        }
    }
}
