//! Reverse-process samplers: the plain ancestral baseline, the
//! frequency-guided progressive sampler, the exact truncated-state identity
//! (test oracle; needs the clean chunk), and the simple post-hoc smoothing
//! baselines.

use rand::Rng;

use crate::chunk::ActionChunk;
use crate::denoiser::{Denoiser, DenoiserInput};
use crate::error::{FgoError, Result};
use crate::rng::gaussian_chunk;
use crate::schedule::{f_k_schedule, omega_k_schedule, FgoConfig, NoiseSchedule};
use crate::spectral::{band_energy, high_pass, low_pass};

/// One reverse step of the guided run: the pre-update state and everything
/// the guidance computed at that step.
#[derive(Debug, Clone)]
pub struct TraceStep {
    pub k: usize,
    pub cutoff: usize,
    pub omega: f64,
    /// State entering the step (before the update at this k).
    pub state: ActionChunk,
    pub eps_base: ActionChunk,
    pub eps_fine: ActionChunk,
    pub eps_guided: ActionChunk,
}

/// Full record of a guided reverse run: exactly K step records plus the
/// returned chunk.
#[derive(Debug, Clone)]
pub struct SampleTrace {
    pub steps: Vec<TraceStep>,
    pub final_chunk: ActionChunk,
}

impl SampleTrace {
    /// The K states after each update, `A^{K-1} .. A^0`; the frequency
    /// analysis runs over these.
    pub fn post_update_states(&self) -> Vec<&ActionChunk> {
        let mut states: Vec<&ActionChunk> =
            self.steps.iter().skip(1).map(|s| &s.state).collect();
        states.push(&self.final_chunk);
        states
    }

    /// CSV rows `k,f_k,omega_k,low_energy,high_energy` with the band split
    /// at `f_base`, one row per step, header included.
    pub fn to_csv(&self, f_base: usize) -> Result<String> {
        let mut out = String::from("k,f_k,omega_k,low_energy,high_energy\n");
        for step in &self.steps {
            let (low, high) = band_energy(&step.state, f_base)?;
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                step.k, step.cutoff, step.omega, low, high
            ));
        }
        Ok(out)
    }
}

fn check_context(model: &impl Denoiser, context: &[f64]) -> Result<()> {
    if context.len() != model.context_dim() {
        return Err(FgoError::Shape(format!(
            "context length {} does not match model {}",
            context.len(),
            model.context_dim()
        )));
    }
    Ok(())
}

fn reverse_update(
    state: &ActionChunk,
    eps: &ActionChunk,
    k: usize,
    sched: &NoiseSchedule,
    rng: &mut impl Rng,
) -> ActionChunk {
    let mean = state.axpy(-sched.gamma(k), eps).scale(sched.zeta(k));
    let sigma = sched.sigma(k);
    if sigma > 0.0 {
        let noise = gaussian_chunk(rng, state.n_steps(), state.dims());
        mean.axpy(sigma, &noise)
    } else {
        mean
    }
}

/// Standard ancestral reverse loop, conditioning on the full band `f = N` at
/// every step.
pub fn sample_unguided(
    model: &impl Denoiser,
    context: &[f64],
    sched: &NoiseSchedule,
    rng: &mut impl Rng,
) -> Result<ActionChunk> {
    check_context(model, context)?;
    let (n, d) = (model.chunk_len(), model.dims());
    let mut state = gaussian_chunk(rng, n, d);
    for k in (1..=sched.n_steps()).rev() {
        let input = DenoiserInput { noisy: &state, step: k, context, cutoff: n };
        let eps = model.predict(&input)?;
        state = reverse_update(&state, &eps, k, sched, rng);
        if !state.is_finite() {
            return Err(FgoError::NonFinite(format!("sampler state at step {k}")));
        }
    }
    Ok(state)
}

/// Frequency-guided reverse process. At each step the state is projected
/// onto the base band and the expanding `f_k` band, the two conditional
/// noise estimates are blended with `omega_k`, and the DDPM update advances
/// the matching blend of the two filtered states:
///
/// `A^{k-1} = zeta_k ((1-w) L_fb(A^k) + w L_fk(A^k) - gamma_k eps~) + sigma_k z`
///
/// which is the `omega`-interpolation of the per-manifold updates. Applying
/// the update to the raw `A^k` instead leaves the above-cut-off modes with no
/// matching noise estimate; `zeta_k > 1` then amplifies them without bound,
/// which destroys the progressive band structure the guidance exists to
/// enforce.
pub fn sample_fgo(
    model: &impl Denoiser,
    context: &[f64],
    sched: &NoiseSchedule,
    fgo: &FgoConfig,
    rng: &mut impl Rng,
) -> Result<(ActionChunk, SampleTrace)> {
    check_context(model, context)?;
    fgo.validate()?;
    let (n, d) = (model.chunk_len(), model.dims());
    if fgo.chunk_len != n {
        return Err(FgoError::Config(format!(
            "guidance chunk_len {} does not match model {}",
            fgo.chunk_len, n
        )));
    }
    let k_total = sched.n_steps();
    let mut state = gaussian_chunk(rng, n, d);
    let mut steps = Vec::with_capacity(k_total);

    for k in (1..=k_total).rev() {
        let cutoff = f_k_schedule(k, k_total, fgo.f_base, n, fgo.f_schedule);
        let omega = omega_k_schedule(k, k_total, fgo.omega_schedule);

        let state_base = low_pass(&state, fgo.f_base)?;
        let state_fine = low_pass(&state, cutoff)?;
        let eps_base = model.predict(&DenoiserInput {
            noisy: &state_base,
            step: k,
            context,
            cutoff: fgo.f_base,
        })?;
        let eps_fine =
            model.predict(&DenoiserInput { noisy: &state_fine, step: k, context, cutoff })?;
        let eps_guided = eps_base.scale(1.0 - omega).axpy(omega, &eps_fine);
        let blended = state_base.scale(1.0 - omega).axpy(omega, &state_fine);

        steps.push(TraceStep {
            k,
            cutoff,
            omega,
            state: state.clone(),
            eps_base,
            eps_fine,
            eps_guided: eps_guided.clone(),
        });

        state = reverse_update(&blended, &eps_guided, k, sched, rng);
        if !state.is_finite() {
            return Err(FgoError::NonFinite(format!("guided sampler state at step {k}")));
        }
    }
    Ok((state.clone(), SampleTrace { steps, final_chunk: state }))
}

/// Exact truncated noisy state `A^{k,f} = A^k - sqrt(ab_k) H_f(A^0)`.
///
/// Needs the clean chunk, so it only serves as a reference path for testing
/// the filtered-state approximation used at inference.
pub fn truncated_noisy_state_exact(
    noisy: &ActionChunk,
    clean: &ActionChunk,
    k: usize,
    cutoff: usize,
    sched: &NoiseSchedule,
) -> Result<ActionChunk> {
    if !noisy.same_shape(clean) {
        return Err(FgoError::Shape("noisy and clean chunks differ in shape".into()));
    }
    let high = high_pass(clean, cutoff)?;
    Ok(noisy.axpy(-sched.alpha_bar(k).sqrt(), &high))
}

/// Post-hoc low-pass smoothing of a sampler output.
pub fn smooth_lowpass_baseline(chunk: &ActionChunk, cutoff: usize) -> Result<ActionChunk> {
    low_pass(chunk, cutoff)
}

/// Exponentially weighted average of the actions that overlapping chunk
/// predictions assign to time `now`; weight of a chunk issued at `t0` is
/// `exp(-decay * (now - t0))`.
pub fn temporal_ensemble(
    history: &[(usize, ActionChunk)],
    now: usize,
    decay: f64,
) -> Result<Vec<f64>> {
    if decay <= 0.0 {
        return Err(FgoError::Config(format!("ensemble decay {decay} must be positive")));
    }
    let mut weight_sum = 0.0;
    let mut action: Option<Vec<f64>> = None;
    for (issued, chunk) in history {
        if now < *issued || now >= issued + chunk.n_steps() {
            continue;
        }
        let age = (now - issued) as f64;
        let w = (-decay * age).exp();
        let row = chunk.row(now - issued);
        match &mut action {
            None => action = Some(row.iter().map(|v| v * w).collect()),
            Some(acc) => {
                for (a, v) in acc.iter_mut().zip(row) {
                    *a += v * w;
                }
            }
        }
        weight_sum += w;
    }
    let acc = action.ok_or_else(|| FgoError::Empty("no chunk in history covers now".into()))?;
    Ok(acc.into_iter().map(|v| v / weight_sum).collect())
}
