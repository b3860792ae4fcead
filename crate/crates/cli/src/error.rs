use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration or parameters; `path` names the offending field.
    #[error("invalid configuration at `{path}`: {message}")]
    Usage { path: String, message: String },

    #[error("refused: {0}")]
    Cap(String),

    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("experiment failed: {0}")]
    Failed(String),
}

impl CliError {
    pub fn usage(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Usage { path: path.into(), message: message.into() }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage { .. } => 2,
            CliError::Cap(_) => 3,
            CliError::Io { .. } | CliError::Failed(_) => 1,
        }
    }
}

impl From<quintic_lab::Error> for CliError {
    fn from(e: quintic_lab::Error) -> Self {
        match e {
            quintic_lab::Error::Invalid(m) => CliError::usage("params", m),
            e if e.is_cap() => CliError::Cap(e.to_string()),
            e => CliError::Failed(e.to_string()),
        }
    }
}
