//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FgoError {
    #[error("invalid shape: {0}")]
    Shape(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("cut-off frequency {cutoff} out of range [0, {max}]")]
    CutoffOutOfRange { cutoff: usize, max: usize },

    #[error("diffusion step {step} out of range [{min}, {max}]")]
    StepOutOfRange { step: usize, min: usize, max: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed container: {0}")]
    Container(String),
}

pub type Result<T> = std::result::Result<T, FgoError>;
