//! CLI error type carrying the process exit code.

use thiserror::Error;

/// Exit code 2 for usage problems, 1 for runtime failures.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn runtime(msg: impl Into<String>) -> Self {
        CliError::Runtime(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<heavycvar::Error> for CliError {
    fn from(e: heavycvar::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}
