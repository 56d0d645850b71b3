use std::path::{Path, PathBuf};

use thiserror::Error;

/// CLI failures, each tied to an exit code: 2 for I/O and bad flag values,
/// 3 for malformed or mismatched inputs, 4 for evaluation-domain errors.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid option: {0}")]
    Config(#[from] lesioncam::ConfigError),
    #[error("{}: {msg}", path.display())]
    Format { path: PathBuf, msg: String },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("evaluation: {0}")]
    Eval(#[from] lesioncam::EvalError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Config(_) => 2,
            CliError::Format { .. } | CliError::Shape(_) => 3,
            CliError::Eval(_) => 4,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn format(path: &Path, msg: impl ToString) -> Self {
        CliError::Format {
            path: path.to_path_buf(),
            msg: msg.to_string(),
        }
    }
}
