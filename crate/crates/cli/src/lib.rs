//! Experiment harness around the frequency-guided diffusion library:
//! dataset generation, training, paired sampling, closed-loop rollouts,
//! smoothness evaluation, frequency analysis and design-axis sweeps.

pub mod commands;
pub mod config;
pub mod svg;

use std::fmt;

/// Command errors carry the exit-code contract: usage/config problems exit
/// with 1, runtime/numeric failures with 2.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Runtime(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<fgo_core::FgoError> for CliError {
    fn from(err: fgo_core::FgoError) -> Self {
        CliError::Runtime(err.to_string())
    }
}
