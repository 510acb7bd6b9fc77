//! Subcommand implementations. Every command is deterministic under
//! (config, seed) and writes byte-stable CSV/SVG outputs.

mod ablate;
mod analyze;
mod eval;
mod gen_data;
mod rollout;
mod sample;
mod train;

pub use ablate::cmd_ablate;
pub use analyze::cmd_analyze_frequency;
pub use eval::cmd_eval;
pub use gen_data::cmd_gen_data;
pub use rollout::cmd_rollout;
pub use sample::cmd_sample;
pub use train::cmd_train;

use std::path::Path;

use fgo_core::chunk::ActionChunk;
use fgo_core::datagen::TrajectoryDataset;
use fgo_core::denoiser::{Denoiser, DenoiserInput, GaussianOracle, MlpDenoiser};
use fgo_core::error::Result as CoreResult;
use fgo_core::rng::derive_stream;
use fgo_core::schedule::{make_schedule, FgoConfig, NoiseSchedule, OmegaScheduleKind};
use fgo_core::training::{TrainReport, Trainer};

use crate::config::RunConfig;
use crate::CliError;

/// rng stream tags (see `fgo_core::rng::derive_stream`).
pub(crate) const STREAM_MODEL_INIT: u64 = 0x4d49;
pub(crate) const STREAM_SAMPLE: u64 = 0x5341;
pub(crate) const STREAM_ROLLOUT: u64 = 0x524f;

/// A loaded noise predictor: trained network or analytic oracle.
pub(crate) enum PolicyModel {
    Mlp(MlpDenoiser),
    Oracle(GaussianOracle),
}

impl Denoiser for PolicyModel {
    fn predict(&self, input: &DenoiserInput) -> CoreResult<ActionChunk> {
        match self {
            PolicyModel::Mlp(m) => m.predict(input),
            PolicyModel::Oracle(o) => o.predict(input),
        }
    }

    fn chunk_len(&self) -> usize {
        match self {
            PolicyModel::Mlp(m) => m.chunk_len(),
            PolicyModel::Oracle(o) => o.chunk_len(),
        }
    }

    fn dims(&self) -> usize {
        match self {
            PolicyModel::Mlp(m) => m.dims(),
            PolicyModel::Oracle(o) => o.dims(),
        }
    }

    fn context_dim(&self) -> usize {
        match self {
            PolicyModel::Mlp(m) => m.context_dim(),
            PolicyModel::Oracle(o) => o.context_dim(),
        }
    }
}

/// Oracle stand-in when no checkpoint is given: constant mean `oracle_mean`
/// and `oracle_std` on the first `oracle_band` DCT modes (0 selects the
/// full band).
pub(crate) fn build_oracle(cfg: &RunConfig, sched: NoiseSchedule) -> Result<GaussianOracle, CliError> {
    let mean = ActionChunk::new(
        vec![cfg.oracle_mean; cfg.chunk_len * cfg.dims],
        cfg.chunk_len,
        cfg.dims,
    )?;
    let band = if cfg.oracle_band == 0 { cfg.chunk_len } else { cfg.oracle_band };
    let mut stds = ActionChunk::zeros(cfg.chunk_len, cfg.dims);
    for i in 0..band.min(cfg.chunk_len) {
        for d in 0..cfg.dims {
            stds.set(i, d, cfg.oracle_std);
        }
    }
    Ok(GaussianOracle::from_dct_diagonal(&mean, &stds, cfg.context_dim, sched)?)
}

pub(crate) fn load_model(
    cfg: &RunConfig,
    checkpoint: Option<&Path>,
    sched: &NoiseSchedule,
) -> Result<PolicyModel, CliError> {
    match checkpoint {
        Some(path) => {
            let container = fgo_core::container::Container::load(path)?;
            Ok(PolicyModel::Mlp(MlpDenoiser::from_container(&container)?))
        }
        None => Ok(PolicyModel::Oracle(build_oracle(cfg, sched.clone())?)),
    }
}

pub(crate) fn infer_schedule(cfg: &RunConfig) -> Result<NoiseSchedule, CliError> {
    Ok(make_schedule(cfg.k_infer, cfg.schedule_kind)?)
}

/// Schedule used at sampling time. A trained checkpoint must run under the
/// schedule it was trained on: the step index conditions the model, so the
/// (k, alpha_bar) pairing cannot change between training and inference.
/// The oracle recomputes its posterior from whatever schedule it holds, so
/// oracle mode honors `K_infer`.
pub(crate) fn sampling_schedule(
    cfg: &RunConfig,
    has_checkpoint: bool,
) -> Result<NoiseSchedule, CliError> {
    if has_checkpoint {
        Ok(make_schedule(cfg.k_train, cfg.schedule_kind)?)
    } else {
        infer_schedule(cfg)
    }
}

/// Guidance configuration that makes the guided sampler coincide with the
/// plain ancestral one bit for bit (full band, weight 1).
pub(crate) fn degenerate_fgo(chunk_len: usize) -> FgoConfig {
    FgoConfig {
        omega_schedule: OmegaScheduleKind::Constant(1.0),
        kfc_enabled: false,
        ..FgoConfig::new(chunk_len, 1.0, 0.0, chunk_len).expect("degenerate config")
    }
}

/// Trains a fresh model on the dataset under the run's guidance and
/// schedule settings; the model init stream is derived from the run seed.
pub(crate) fn fit_model(
    run: &RunConfig,
    dataset: &TrajectoryDataset,
    checkpoint_dir: Option<&Path>,
) -> Result<(MlpDenoiser, TrainReport), CliError> {
    let sched = make_schedule(run.k_train, run.schedule_kind)?;
    let fgo = run.fgo_config()?;
    let mut model =
        MlpDenoiser::init(run.mlp_config(), &mut derive_stream(run.seed, STREAM_MODEL_INIT, 0))?;
    let mut train_cfg = run.train_config();
    train_cfg.checkpoint_dir = checkpoint_dir.map(|p| p.to_path_buf());
    let mut trainer = Trainer::new(&fgo, &sched, train_cfg, &model)?;
    let report = trainer.train(&mut model, &dataset.contexts, &dataset.chunks)?;
    Ok((model, report))
}

pub(crate) fn ensure_out_dir(out: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::Usage(format!("cannot create output dir {}: {e}", out.display())))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    (mean, var.sqrt())
}
