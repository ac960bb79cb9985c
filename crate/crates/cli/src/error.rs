use std::path::PathBuf;

/// Errors of the scenario runner.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// The config file is not valid TOML or does not match the schema.
    #[error("config: {0}")]
    Parse(String),
    /// A config field has an invalid or missing value.
    #[error("config field `{field}`: {message}")]
    Field {
        /// Dotted field path.
        field: String,
        /// What is wrong.
        message: String,
    },
    /// Reading or writing a file failed.
    #[error("{path}: {source}")]
    Io {
        /// File involved.
        path: PathBuf,
        /// Underlying error.
        source: std::io::Error,
    },
    /// Error raised by the kernel.
    #[error(transparent)]
    Core(#[from] rch_core::Error),
}

impl CliError {
    /// Error for `field`.
    pub fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Field { field: field.into(), message: message.into() }
    }

    /// Process exit code: 2 for config problems, 3 for IO, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Field { .. } => 2,
            CliError::Io { .. } => 3,
            CliError::Core(_) => 1,
        }
    }
}
