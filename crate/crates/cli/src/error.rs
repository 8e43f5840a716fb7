//! CLI error type with a stable exit-code contract.
//!
//! | code | meaning                                   |
//! |-----:|-------------------------------------------|
//! |    0 | success                                   |
//! |    2 | usage error (also clap's own exit code)   |
//! |    3 | I/O failure                               |
//! |    4 | invalid configuration or parameter domain |
//! |    5 | verification tolerance failed             |

use std::fmt;
use std::path::Path;

use crate::config::ConfigError;

#[derive(Debug)]
pub enum CliError {
    /// Command misuse that clap's parser cannot see (exit 2).
    Usage(String),
    /// Filesystem or stream failure (exit 3).
    Io(String),
    /// Settings or parameters outside the model's domain (exit 4).
    Invalid(String),
    /// A verify gate failed (exit 5).
    Tolerance(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Invalid(_) => 4,
            CliError::Tolerance(_) => 5,
        }
    }

    /// Wrap a raw I/O error with the path it concerns.
    pub fn io_at(path: &Path, err: std::io::Error) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, msg) = match self {
            CliError::Usage(m) => ("usage", m),
            CliError::Io(m) => ("i/o", m),
            CliError::Invalid(m) => ("invalid", m),
            CliError::Tolerance(m) => ("tolerance", m),
        };
        write!(f, "{kind}: {msg}")
    }
}

impl std::error::Error for CliError {}

impl From<tpi_core::Error> for CliError {
    fn from(e: tpi_core::Error) -> Self {
        match e {
            tpi_core::Error::Io { .. } => CliError::Io(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Invalid(e.0)
    }
}

pub type CliResult<T> = Result<T, CliError>;
