use std::process::ExitCode;

/// Every failure the CLI reports, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Invalid flags, configuration or input files (exit 2).
    #[error("{0}")]
    Config(String),
    /// A numerical routine failed to converge or produced an unusable result (exit 3).
    #[error("{0}")]
    Numerical(String),
    /// Output could not be written (exit 2).
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        CliError::Numerical(msg.into())
    }
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { context: context.into(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<CliError> for ExitCode {
    fn from(e: CliError) -> Self {
        ExitCode::from(e.exit_code())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

use tdqo_core::fieldconv::FieldError;
use tdqo_core::packet::PacketError;
use tdqo_core::states::StateError;
use tdqo_core::transforms::{OracleError, TransformError};

impl From<TransformError> for CliError {
    fn from(e: TransformError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::NonConvergence { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<PacketError> for CliError {
    fn from(e: PacketError) -> Self {
        match e {
            PacketError::Oracle(o) => o.into(),
            PacketError::Transform(t) => t.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<StateError> for CliError {
    fn from(e: StateError) -> Self {
        match e {
            StateError::Packet(p) => p.into(),
            StateError::Transform(t) => t.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::Oracle(o) => o.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}
