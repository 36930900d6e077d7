use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Model(#[from] ratfit::Error),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// Process exit code: 2 usage, 3 input/output, 4 numerical or model failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } | CliError::Format { .. } => 3,
            CliError::Model(ratfit::Error::UnknownFunction(_) | ratfit::Error::InvalidDomain(_)) => 2,
            CliError::Model(_) => 4,
        }
    }

    pub(crate) fn io(path: &str, err: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.to_string(),
            message: err.to_string(),
        }
    }

    pub(crate) fn format(path: &str, message: impl Into<String>) -> Self {
        CliError::Format {
            path: path.to_string(),
            message: message.into(),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
