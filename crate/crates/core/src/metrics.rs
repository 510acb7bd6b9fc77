//! Smoothness and consistency metrics over executed trajectories, plus the
//! per-denoising-step frequency evolution analysis.

use crate::chunk::ActionChunk;
use crate::error::{FgoError, Result};
use crate::sampler::SampleTrace;
use crate::spectral::haar_decompose;

/// Aggregated per-episode metrics.
#[derive(Debug, Clone)]
pub struct MetricsReport {
    pub atv: f64,
    pub jerk_rms: f64,
    /// Per-mode orthonormal DCT energies of the trajectory window.
    pub band_profile: Vec<f64>,
    pub n_steps_used: usize,
}

/// Action total variation: mean absolute step-to-step change,
/// `1/(D(T-1)) sum_t sum_d |a_{t+1}^d - a_t^d|`.
pub fn atv(trajectory: &ActionChunk) -> Result<f64> {
    let t_len = trajectory.n_steps();
    if t_len < 2 {
        return Err(FgoError::Shape(format!("atv needs at least 2 steps, got {t_len}")));
    }
    let dims = trajectory.dims();
    let mut total = 0.0;
    for t in 0..t_len - 1 {
        for d in 0..dims {
            total += (trajectory.get(t + 1, d) - trajectory.get(t, d)).abs();
        }
    }
    Ok(total / (dims as f64 * (t_len - 1) as f64))
}

/// Root mean square of the per-step jerk vector norm. Jerk at step `t` is
/// the backward third difference `(a_t - 3a_{t-1} + 3a_{t-2} - a_{t-3}) / dt^3`,
/// defined for `t = 3..T-1`, and the mean runs over those `T - 3` samples.
pub fn jerk_rms(trajectory: &ActionChunk, dt: f64) -> Result<f64> {
    let t_len = trajectory.n_steps();
    if t_len < 4 {
        return Err(FgoError::Shape(format!("jerk needs at least 4 steps, got {t_len}")));
    }
    if dt <= 0.0 {
        return Err(FgoError::Config(format!("dt must be positive, got {dt}")));
    }
    let dims = trajectory.dims();
    let dt3 = dt * dt * dt;
    let mut sum_sq = 0.0;
    for t in 3..t_len {
        let mut norm_sq = 0.0;
        for d in 0..dims {
            let jerk = (trajectory.get(t, d) - 3.0 * trajectory.get(t - 1, d)
                + 3.0 * trajectory.get(t - 2, d)
                - trajectory.get(t - 3, d))
                / dt3;
            norm_sq += jerk * jerk;
        }
        sum_sq += norm_sq;
    }
    Ok((sum_sq / (t_len - 3) as f64).sqrt())
}

/// First `min(window, T)` steps of the trajectory, the segment smoothness is
/// scored over.
pub fn approach_window(trajectory: &ActionChunk, window: usize) -> ActionChunk {
    let take = window.max(1).min(trajectory.n_steps());
    let dims = trajectory.dims();
    let data = trajectory.as_slice()[..take * dims].to_vec();
    ActionChunk::new(data, take, dims).expect("prefix of a valid chunk")
}

pub const DEFAULT_APPROACH_WINDOW: usize = 32;

/// Per-step `(low, high)` Haar energies over the post-update states of a
/// guided run: one pair per denoising step, ending at the returned chunk.
pub fn frequency_evolution(trace: &SampleTrace) -> Result<Vec<(f64, f64)>> {
    trace
        .post_update_states()
        .into_iter()
        .map(|state| {
            let pair = haar_decompose(state)?;
            Ok((pair.approx.norm_sq(), pair.detail.norm_sq()))
        })
        .collect()
}

/// Full per-episode report over the approach window.
pub fn episode_report(trajectory: &ActionChunk, window: usize, dt: f64) -> Result<MetricsReport> {
    let prefix = approach_window(trajectory, window);
    let coeffs = crate::spectral::orthonormal_coeffs(&prefix);
    let mut band_profile = vec![0.0; prefix.n_steps()];
    for (i, slot) in band_profile.iter_mut().enumerate() {
        for d in 0..prefix.dims() {
            *slot += coeffs.get(i, d).powi(2);
        }
    }
    Ok(MetricsReport {
        atv: atv(&prefix)?,
        jerk_rms: jerk_rms(&prefix, dt)?,
        band_profile,
        n_steps_used: prefix.n_steps(),
    })
}
