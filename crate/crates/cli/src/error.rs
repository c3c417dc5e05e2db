use std::path::PathBuf;

use thiserror::Error;

/// Failures of a CLI run, each mapped to an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Numeric(#[from] modecay_core::Error),

    #[error("validity condition violated: R·t_c = {ratio:.3e} ({tier})")]
    Validity { ratio: f64, tier: &'static str },
}

impl CliError {
    /// 1 usage, 2 configuration, 3 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Config(_) | CliError::Read { .. } | CliError::Parse { .. } | CliError::Write { .. } => 2,
            CliError::Numeric(modecay_core::Error::InvalidInput(_)) => 2,
            CliError::Numeric(_) | CliError::Validity { .. } => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
