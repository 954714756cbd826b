//! Sweep harness behind the `gsk` binary: configuration, subcommands and CSV/JSON output.

pub mod commands;
pub mod config;
pub mod output;

use gsk::GskError;
use thiserror::Error;

pub use config::{Format, KernelKind, RunConfig, Target};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("check failed: {0}")]
    Check(String),
    #[error("numerical failure: {0}")]
    Numeric(GskError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<GskError> for CliError {
    fn from(e: GskError) -> CliError {
        match e {
            GskError::InvalidSpec(_) | GskError::Syntax { .. } | GskError::UnknownIdentifier { .. } => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numeric(e),
        }
    }
}

impl CliError {
    /// 1 check failure, 2 configuration, 3 numerical failure or i/o.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Check(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 3,
        }
    }
}
