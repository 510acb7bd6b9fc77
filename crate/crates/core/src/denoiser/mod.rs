//! Noise predictors conditioned on diffusion step, context and cut-off
//! frequency: a trainable MLP and a closed-form Gaussian oracle used to
//! verify the samplers without training.

mod linalg;
mod mlp;
mod oracle;

pub use mlp::{MlpConfig, MlpDenoiser};
pub use oracle::GaussianOracle;

use crate::chunk::ActionChunk;
use crate::error::{FgoError, Result};

/// Conditioning tuple for one prediction: the noisy chunk, the diffusion
/// step, the observation context vector and the cut-off frequency.
#[derive(Debug, Clone, Copy)]
pub struct DenoiserInput<'a> {
    pub noisy: &'a ActionChunk,
    pub step: usize,
    pub context: &'a [f64],
    pub cutoff: usize,
}

/// A frequency-conditioned noise predictor.
pub trait Denoiser {
    /// Predicted injected noise, same shape as the input chunk.
    fn predict(&self, input: &DenoiserInput) -> Result<ActionChunk>;

    fn chunk_len(&self) -> usize;
    fn dims(&self) -> usize;
    fn context_dim(&self) -> usize;
}

/// Sinusoidal embedding of a scalar at geometrically spaced frequencies:
/// `[sin(v), cos(v), sin(v/tau^(2/dim)), cos(v/tau^(2/dim)), ...]`.
pub fn embed_scalar(value: f64, dim: usize) -> Result<Vec<f64>> {
    if dim == 0 || !dim.is_multiple_of(2) {
        return Err(FgoError::Config(format!("embedding dim must be even and positive, got {dim}")));
    }
    let tau: f64 = 10_000.0;
    let mut out = Vec::with_capacity(dim);
    for j in 0..dim / 2 {
        let freq = tau.powf(-2.0 * j as f64 / dim as f64);
        let angle = value * freq;
        out.push(angle.sin());
        out.push(angle.cos());
    }
    Ok(out)
}
