use std::path::PathBuf;

use thiserror::Error;

/// Everything that can stop a subcommand before it produces a verdict.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] sympfact_core::Error),
}

impl CliError {
    pub fn parse(path: &std::path::Path, message: impl ToString) -> Self {
        Self::Parse {
            path: path.to_path_buf(),
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Domain(_) => exit::DOMAIN,
            Self::Io { .. } | Self::Parse { .. } | Self::Usage(_) => exit::IO,
        }
    }
}

pub mod exit {
    pub const OK: u8 = 0;
    /// A precondition or verification failed.
    pub const DOMAIN: u8 = 1;
    /// Unreadable, unwritable or malformed files and bad arguments.
    pub const IO: u8 = 2;
    pub const NOT_CONVERGED: u8 = 3;
}

pub type Result<T> = std::result::Result<T, CliError>;
