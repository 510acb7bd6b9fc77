//! End-to-end multi-band training: cut-off sampling, low-pass filtering of
//! targets, forward diffusion, MSE optimization with adaptive moments, and
//! checkpointing. The whole parameter trajectory is a pure function of
//! (seed, config, dataset).

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::chunk::ActionChunk;
use crate::container::{Container, Tensor};
use crate::denoiser::{DenoiserInput, MlpDenoiser};
use crate::error::{FgoError, Result};
use crate::rng::{derive_stream, gaussian_chunk};
use crate::schedule::{forward_diffuse, sample_cutoff, FgoConfig, NoiseSchedule};
use crate::spectral::low_pass;

const STREAM_SHUFFLE: u64 = 0x5348; // per-epoch shuffle stream tag
const STREAM_DRAWS: u64 = 0x4452; // per-epoch draw stream tag

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub beta1: f64,
    pub beta2: f64,
    /// Stabilizer added outside the square root in the moment update.
    pub eps_stable: f64,
    /// Checkpoint cadence in epochs; 0 disables periodic checkpoints.
    pub checkpoint_every: usize,
    pub checkpoint_dir: Option<PathBuf>,
    /// First epoch to run; nonzero when resuming from a checkpoint.
    pub start_epoch: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 30,
            batch_size: 32,
            learning_rate: 1e-3,
            seed: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps_stable: 1e-8,
            checkpoint_every: 0,
            checkpoint_dir: None,
            start_epoch: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.learning_rate <= 0.0 {
            return Err(FgoError::Config("learning_rate must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(FgoError::Config("moment decays must be in [0,1)".into()));
        }
        if self.batch_size == 0 {
            return Err(FgoError::Config("batch_size must be >= 1".into()));
        }
        Ok(())
    }
}

/// First/second moment estimates with the step counter for bias correction.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(param_count: usize) -> Self {
        Self { m: vec![0.0; param_count], v: vec![0.0; param_count], t: 0 }
    }
}

/// One adaptive-moment update with bias correction.
pub fn optimizer_update(
    params: &mut [f64],
    grads: &[f64],
    state: &mut AdamState,
    cfg: &TrainConfig,
) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.m.len() {
        return Err(FgoError::Shape(format!(
            "optimizer shapes: params {}, grads {}, state {}",
            params.len(),
            grads.len(),
            state.m.len()
        )));
    }
    cfg.validate()?;
    state.t += 1;
    let bias1 = 1.0 - cfg.beta1.powi(state.t as i32);
    let bias2 = 1.0 - cfg.beta2.powi(state.t as i32);
    for i in 0..params.len() {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
        let m_hat = state.m[i] / bias1;
        let v_hat = state.v[i] / bias2;
        params[i] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.eps_stable);
    }
    Ok(())
}

/// Per-step telemetry row; `cutoff` and `step_k` are the draws of the first
/// sample in the batch.
#[derive(Debug, Clone, Copy)]
pub struct StepTelemetry {
    pub step: usize,
    pub epoch: usize,
    pub loss: f64,
    pub cutoff: usize,
    pub step_k: usize,
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    pub epoch_losses: Vec<f64>,
    pub final_loss: f64,
    pub wall_clock_secs: f64,
    pub seed: u64,
    pub steps: Vec<StepTelemetry>,
    /// Histogram over every cut-off drawn during training (index = f).
    pub cutoff_histogram: Vec<u64>,
}

impl TrainReport {
    pub fn validate(&self) -> Result<()> {
        if self.epoch_losses.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(FgoError::NonFinite("loss trace".into()));
        }
        Ok(())
    }
}

/// Owns optimizer state and the guidance/schedule references for a run.
pub struct Trainer<'a> {
    fgo: &'a FgoConfig,
    sched: &'a NoiseSchedule,
    pub cfg: TrainConfig,
    opt: AdamState,
    cutoff_histogram: Vec<u64>,
}

impl<'a> Trainer<'a> {
    pub fn new(
        fgo: &'a FgoConfig,
        sched: &'a NoiseSchedule,
        cfg: TrainConfig,
        model: &MlpDenoiser,
    ) -> Result<Self> {
        cfg.validate()?;
        fgo.validate()?;
        if fgo.chunk_len != model.config().chunk_len {
            return Err(FgoError::Config(format!(
                "guidance chunk_len {} does not match model {}",
                fgo.chunk_len,
                model.config().chunk_len
            )));
        }
        Ok(Self {
            fgo,
            sched,
            cfg,
            opt: AdamState::new(model.param_count()),
            cutoff_histogram: vec![0; fgo.chunk_len + 1],
        })
    }

    /// Resumes with a previously saved optimizer state.
    pub fn with_state(
        fgo: &'a FgoConfig,
        sched: &'a NoiseSchedule,
        cfg: TrainConfig,
        model: &MlpDenoiser,
        opt: AdamState,
    ) -> Result<Self> {
        if opt.m.len() != model.param_count() {
            return Err(FgoError::Shape("optimizer state does not match model".into()));
        }
        let mut trainer = Self::new(fgo, sched, cfg, model)?;
        trainer.opt = opt;
        Ok(trainer)
    }

    pub fn optimizer_state(&self) -> &AdamState {
        &self.opt
    }

    /// One optimization step over a batch. Per sample, in order: draw the
    /// diffusion step, draw the cut-off, low-pass the clean chunk, draw the
    /// noise, form the noisy state; then a single optimizer update on the
    /// batch MSE. Returns the loss and the first sample's (cutoff, step).
    pub fn train_step(
        &mut self,
        model: &mut MlpDenoiser,
        batch: &[(&[f64], &ActionChunk)],
        rng: &mut impl Rng,
    ) -> Result<(f64, usize, usize)> {
        if batch.is_empty() {
            return Err(FgoError::Empty("training batch".into()));
        }
        let k_total = self.sched.n_steps();
        let mut staged: Vec<(ActionChunk, usize, usize, ActionChunk)> =
            Vec::with_capacity(batch.len());
        for (_, clean) in batch {
            let k = rng.random_range(1..=k_total);
            let f = sample_cutoff(rng, k, self.fgo, k_total)?;
            self.cutoff_histogram[f] += 1;
            let truncated = low_pass(clean, f)?;
            let eps = gaussian_chunk(rng, clean.n_steps(), clean.dims());
            let noisy = forward_diffuse(&truncated, k, &eps, self.sched)?;
            staged.push((noisy, k, f, eps));
        }
        let refs: Vec<(DenoiserInput, &ActionChunk)> = staged
            .iter()
            .zip(batch)
            .map(|((noisy, k, f, eps), (context, _))| {
                (DenoiserInput { noisy, step: *k, context, cutoff: *f }, eps)
            })
            .collect();
        let (loss, grads) = model.loss_and_grad(&refs)?;
        if !loss.is_finite() {
            return Err(FgoError::NonFinite(format!(
                "training loss diverged at optimizer step {}",
                self.opt.t + 1
            )));
        }
        optimizer_update(model.params_mut(), &grads, &mut self.opt, &self.cfg)?;
        Ok((loss, staged[0].2, staged[0].1))
    }

    /// Shuffled mini-batch epochs with per-epoch derived rng streams, so a
    /// resumed run reproduces an uninterrupted one exactly.
    pub fn train(
        &mut self,
        model: &mut MlpDenoiser,
        contexts: &[Vec<f64>],
        chunks: &[ActionChunk],
    ) -> Result<TrainReport> {
        if contexts.is_empty() || contexts.len() != chunks.len() {
            return Err(FgoError::Empty("training dataset".into()));
        }
        let start = Instant::now();
        let n = contexts.len();
        let batches_per_epoch = n.div_ceil(self.cfg.batch_size);
        let mut epoch_losses = Vec::new();
        let mut steps = Vec::new();
        let mut final_loss = f64::NAN;

        for epoch in self.cfg.start_epoch..self.cfg.epochs {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut derive_stream(self.cfg.seed, STREAM_SHUFFLE, epoch as u64));
            let mut draw_rng = derive_stream(self.cfg.seed, STREAM_DRAWS, epoch as u64);

            let mut epoch_loss = 0.0;
            for (batch_idx, indices) in order.chunks(self.cfg.batch_size).enumerate() {
                let batch: Vec<(&[f64], &ActionChunk)> =
                    indices.iter().map(|&i| (contexts[i].as_slice(), &chunks[i])).collect();
                let (loss, cutoff, step_k) = self.train_step(model, &batch, &mut draw_rng)?;
                epoch_loss += loss;
                final_loss = loss;
                steps.push(StepTelemetry {
                    step: epoch * batches_per_epoch + batch_idx,
                    epoch,
                    loss,
                    cutoff,
                    step_k,
                });
            }
            epoch_losses.push(epoch_loss / batches_per_epoch as f64);

            if self.cfg.checkpoint_every > 0
                && (epoch + 1) % self.cfg.checkpoint_every == 0
                && (epoch + 1) < self.cfg.epochs
            {
                if let Some(dir) = self.cfg.checkpoint_dir.clone() {
                    let path = dir.join(format!("checkpoint_epoch{:04}.fgtc", epoch + 1));
                    save_checkpoint(model, &self.opt, epoch + 1, &path)?;
                }
            }
        }
        if let Some(dir) = self.cfg.checkpoint_dir.clone() {
            save_checkpoint(model, &self.opt, self.cfg.epochs, &dir.join("checkpoint_final.fgtc"))?;
        }

        let report = TrainReport {
            epoch_losses,
            final_loss,
            wall_clock_secs: start.elapsed().as_secs_f64(),
            seed: self.cfg.seed,
            steps,
            cutoff_histogram: self.cutoff_histogram.clone(),
        };
        report.validate()?;
        Ok(report)
    }
}

/// Writes model parameters, optimizer state and the next epoch index.
pub fn save_checkpoint(
    model: &MlpDenoiser,
    opt: &AdamState,
    next_epoch: usize,
    path: &Path,
) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut c = model.to_container();
    c.insert("optim.m", Tensor::new(vec![opt.m.len()], opt.m.clone())?);
    c.insert("optim.v", Tensor::new(vec![opt.v.len()], opt.v.clone())?);
    c.insert("optim.t", Tensor::scalar(opt.t as f64));
    c.insert("train.next_epoch", Tensor::scalar(next_epoch as f64));
    c.save(path)
}

/// Loads a checkpoint written by [`save_checkpoint`].
pub fn load_checkpoint(path: &Path) -> Result<(MlpDenoiser, AdamState, usize)> {
    let c = Container::load(path)?;
    let model = MlpDenoiser::from_container(&c)?;
    let opt = AdamState {
        m: c.get("optim.m")?.data.clone(),
        v: c.get("optim.v")?.data.clone(),
        t: c.get("optim.t")?.data[0] as u64,
    };
    if opt.m.len() != model.param_count() || opt.v.len() != model.param_count() {
        return Err(FgoError::Container("optimizer state does not match model".into()));
    }
    let next_epoch = c.get("train.next_epoch")?.data[0] as usize;
    Ok((model, opt, next_epoch))
}
