use thiserror::Error;

use crate::config::ConfigError;
use crate::control::ProtocolError;
use crate::experiment::FitError;
use crate::qubit::PhysicsError;
use crate::readout::ReadoutError;
use crate::rsfq::NetlistError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Crate-level error; wraps the per-module error types.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Physics(#[from] PhysicsError),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Readout(#[from] ReadoutError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Coarse diagnostic category, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Protocol,
    Numerical,
    Io,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Config => 2,
            ErrorCategory::Protocol => 3,
            ErrorCategory::Numerical => 4,
            ErrorCategory::Io => 5,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ErrorCategory::Config => "config",
            ErrorCategory::Protocol => "protocol",
            ErrorCategory::Numerical => "numerical",
            ErrorCategory::Io => "io",
        }
    }
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Physics(PhysicsError::InvalidParams(_))
            | Error::Physics(PhysicsError::InvalidGrid(_))
            | Error::Readout(ReadoutError::InvalidParams(_))
            | Error::Config(_) => ErrorCategory::Config,
            Error::Physics(_) | Error::Fit(_) => ErrorCategory::Numerical,
            Error::Netlist(_) | Error::Protocol(_) | Error::Readout(_) => ErrorCategory::Protocol,
            Error::Io(_) => ErrorCategory::Io,
        }
    }
}
