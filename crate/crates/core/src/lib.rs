//! Frequency-guided diffusion over action chunks.
//!
//! The library trains a frequency-conditioned noise predictor on low-pass
//! truncated action chunks and samples with a progressive guidance loop that
//! routes the reverse process through sub-frequency manifolds of expanding
//! bandwidth, suppressing high-frequency artifacts while keeping the global
//! motion. An analytic Gaussian oracle stands in for the trained model in
//! verification paths, and a synthetic noisy-demonstration generator plus an
//! integrator environment provide desk-scale benchmarks with ATV/JerkRMS
//! smoothness metrics.

pub mod chunk;
pub mod container;
pub mod datagen;
pub mod denoiser;
pub mod error;
pub mod metrics;
pub mod rng;
pub mod sampler;
pub mod schedule;
pub mod spectral;
pub mod training;

pub use chunk::ActionChunk;
pub use error::{FgoError, Result};
pub use schedule::{FgoConfig, NoiseSchedule};
