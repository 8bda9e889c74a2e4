use std::path::PathBuf;

/// Process exit statuses.
pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_NUMERIC: u8 = 2;
pub const EXIT_GOLDEN: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("error[usage]: {field}: {reason}")]
    Usage { field: String, reason: String },
    /// A pipeline failure tagged with the module it came from.
    #[error("error[{module}]: {message}")]
    Pipeline { module: &'static str, message: String },
    #[error("error[golden]: {0}")]
    Golden(String),
    #[error("error[io]: {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn usage(field: impl Into<String>, reason: impl ToString) -> Self {
        CliError::Usage { field: field.into(), reason: reason.to_string() }
    }

    pub fn pipeline(module: &'static str, e: impl ToString) -> Self {
        CliError::Pipeline { module, message: e.to_string() }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage { .. } => EXIT_USAGE,
            CliError::Pipeline { .. } | CliError::Io { .. } => EXIT_NUMERIC,
            CliError::Golden(_) => EXIT_GOLDEN,
        }
    }
}
