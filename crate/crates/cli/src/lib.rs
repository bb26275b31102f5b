//! Command implementations and the explorer service behind the `mtpga`
//! binary.

pub mod commands;
pub mod manifest;
pub mod service;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or arguments; exit code 2.
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] mtpga_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(mtpga_core::Error::AlphaOutOfRange(_))
            | CliError::Core(mtpga_core::Error::TooManyCoordinates { .. })
            | CliError::Core(mtpga_core::Error::DimensionOutOfRange { .. })
            | CliError::Core(mtpga_core::Error::InvalidParameter(_)) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
