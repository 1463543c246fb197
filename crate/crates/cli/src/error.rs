use thiserror::Error;

/// Operational failures; mathematical verdicts never end up here.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("usage: {0}")]
    Usage(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("unresolved reference: {0}")]
    Unresolved(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Malformed(_) => 3,
            CliError::Unresolved(_) => 4,
        }
    }
}

impl From<asymlab::Error> for CliError {
    fn from(e: asymlab::Error) -> Self {
        CliError::Malformed(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Malformed(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
