//! Command-line plumbing for pdtomo: tensor files, analysis reports and the
//! `pdtomo` subcommands.

pub mod analysis;
mod commands;
pub mod io;

use thiserror::Error;

pub use commands::{run, Cli};

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or flag values.
    #[error("{0}")]
    Usage(String),
    #[error("conditioning failure: {0}")]
    Conditioning(String),
    /// Some schemes could not be evaluated; the report was still written.
    #[error("{failed} of {total} schemes failed")]
    SchemeFailures { failed: usize, total: usize },
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Conditioning(_) | CliError::SchemeFailures { .. } => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
