use thiserror::Error;

/// Failure classes, each with its own process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Diverged(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => 2,
            Self::Diverged(_) => 3,
            Self::Io(_) => 4,
        }
    }
}

impl From<acciht::Error> for CliError {
    fn from(e: acciht::Error) -> Self {
        match e {
            acciht::Error::Io(msg) => Self::Io(msg),
            other => Self::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Validation(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn invalid<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Validation(msg.into()))
}
