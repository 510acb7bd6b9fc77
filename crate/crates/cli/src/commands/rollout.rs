use std::path::Path;

use fgo_core::container::{Container, Tensor};
use fgo_core::datagen::{rollout, RolloutConfig, Smoother, TrajectoryDataset};
use fgo_core::denoiser::Denoiser;
use fgo_core::rng::derive_stream;
use fgo_core::sampler::sample_fgo;
use fgo_core::schedule::{FgoConfig, NoiseSchedule};

use super::{degenerate_fgo, ensure_out_dir, load_model, sampling_schedule, PolicyModel, STREAM_ROLLOUT};
use crate::config::RunConfig;
use crate::CliError;

fn smoother_from(cfg: &RunConfig) -> Smoother {
    match cfg.smoother.as_str() {
        "lowpass" => Smoother::Lowpass(cfg.smoother_f),
        "ensemble" => Smoother::Ensemble(cfg.ensemble_decay),
        _ => Smoother::None,
    }
}

/// One closed-loop episode: start and goal come from a dataset demo, the
/// policy samples guided chunks, and the paired baseline replays the same
/// noise stream unguided.
#[allow(clippy::too_many_arguments)]
pub(crate) fn paired_episode(
    model: &PolicyModel,
    sched: &NoiseSchedule,
    fgo: &FgoConfig,
    start: &[f64],
    goal: &[f64],
    roll_cfg: &RolloutConfig,
    seed: u64,
    episode: u64,
) -> Result<(fgo_core::ActionChunk, fgo_core::ActionChunk), CliError> {
    let plain = degenerate_fgo(fgo.chunk_len);
    let mut cfg_goal = roll_cfg.clone();
    cfg_goal.goal = goal.to_vec();

    let mut rng_guided = derive_stream(seed, STREAM_ROLLOUT, episode);
    let mut rng_plain = rng_guided.clone();

    let guided = rollout(
        |ctx| sample_fgo(model, ctx, sched, fgo, &mut rng_guided).map(|(chunk, _)| chunk),
        start,
        &cfg_goal,
    )?;
    let unguided = rollout(
        |ctx| sample_fgo(model, ctx, sched, &plain, &mut rng_plain).map(|(chunk, _)| chunk),
        start,
        &cfg_goal,
    )?;
    Ok((guided, unguided))
}

/// Runs paired guided/unguided receding-horizon rollouts and writes the
/// executed trajectories.
pub fn cmd_rollout(
    cfg: &RunConfig,
    checkpoint: Option<&Path>,
    data_path: &Path,
    out: &Path,
) -> Result<(), CliError> {
    ensure_out_dir(out)?;
    let dataset = TrajectoryDataset::from_container(&Container::load(data_path)?)?;
    let sched = sampling_schedule(cfg, checkpoint.is_some())?;
    let model = load_model(cfg, checkpoint, &sched)?;
    let mut fgo = cfg.fgo_config()?;
    fgo.chunk_len = model.chunk_len();
    fgo.f_base = fgo.f_base.min(fgo.chunk_len);

    let dims = model.dims();
    let roll_cfg = RolloutConfig {
        horizon: cfg.horizon,
        execute_m: cfg.execute_m.min(model.chunk_len()),
        smoother: smoother_from(cfg),
        goal: vec![0.0; dims],
        context_dim: model.context_dim(),
    };

    let mut guided_flat = Vec::new();
    let mut plain_flat = Vec::new();
    for ep in 0..cfg.episodes {
        let demo = &dataset.clean_chunks[ep % dataset.len()];
        let start = demo.row(0).to_vec();
        let goal = demo.row(demo.n_steps() - 1).to_vec();
        let (guided, unguided) =
            paired_episode(&model, &sched, &fgo, &start, &goal, &roll_cfg, cfg.seed, ep as u64)?;
        guided_flat.extend_from_slice(guided.as_slice());
        plain_flat.extend_from_slice(unguided.as_slice());
    }

    let mut container = Container::new();
    container.insert("fgo", Tensor::new(vec![cfg.episodes, cfg.horizon, dims], guided_flat)?);
    container.insert("unguided", Tensor::new(vec![cfg.episodes, cfg.horizon, dims], plain_flat)?);
    let path = out.join("rollouts.fgtc");
    container.save(&path)?;
    println!("wrote {} paired rollouts to {}", cfg.episodes, path.display());
    Ok(())
}
