//! Error-to-exit-code policy of the command line tool.
//!
//! Exit 0: success. Exit 1: runtime failure (integration blew up, no
//! crossing found, I/O). Exit 2: usage or schema problems (bad flags,
//! malformed config files, invalid parameter values).

use phasekit::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// The invocation or its configuration is wrong; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// The computation itself failed; exit code 1.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            // Parameter and input-shape problems are the caller's to fix.
            CoreError::InvalidParameter(_)
            | CoreError::DimensionMismatch { .. }
            | CoreError::EdgeListParse { .. } => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
