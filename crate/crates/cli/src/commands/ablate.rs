use std::path::Path;

use fgo_core::container::Container;
use fgo_core::datagen::{RolloutConfig, Smoother, TrajectoryDataset};
use fgo_core::schedule::{FreqScheduleKind, OmegaScheduleKind};

use super::eval::score_episodes;
use super::rollout::paired_episode;
use super::{ensure_out_dir, fit_model, mean_std, sampling_schedule, write_text, PolicyModel};
use crate::config::RunConfig;
use crate::CliError;

pub const OMEGA_GRID: [f64; 6] = [0.25, 0.5, 0.75, 1.0, 1.25, 1.5];
pub const ABLATION_SEEDS: [u64; 3] = [0, 1, 2];

/// One sweep cell: a config delta applied at training time, inference time,
/// or both.
struct Cell {
    name: String,
    train_delta: fn(&mut RunConfig, &str),
    infer_delta: fn(&mut RunConfig, &str),
    arg: String,
}

fn no_delta(_: &mut RunConfig, _: &str) {}

fn cells_for(axis: &str) -> Result<(Vec<Cell>, bool), CliError> {
    match axis {
        "omega_const" => Ok((
            OMEGA_GRID
                .iter()
                .map(|w| Cell {
                    name: format!("omega_{w}"),
                    train_delta: no_delta,
                    infer_delta: |cfg, arg| {
                        cfg.omega_const = arg.parse().expect("grid value");
                        cfg.omega_schedule = OmegaScheduleKind::Constant(cfg.omega_const);
                    },
                    arg: format!("{w}"),
                })
                .collect(),
            false,
        )),
        "p_base" => Ok((
            [0.0, 0.2]
                .iter()
                .map(|p| Cell {
                    name: format!("p_base_{p}"),
                    train_delta: |cfg, arg| cfg.p_base = arg.parse().expect("grid value"),
                    infer_delta: no_delta,
                    arg: format!("{p}"),
                })
                .collect(),
            true,
        )),
        "kfc" => Ok((
            ["off", "on"]
                .iter()
                .map(|mode| Cell {
                    name: format!("kfc_{mode}"),
                    train_delta: |cfg, arg| cfg.kfc = arg == "on",
                    infer_delta: no_delta,
                    arg: mode.to_string(),
                })
                .collect(),
            true,
        )),
        "schedules" => {
            let combos = [
                ("f_linear_omega_linear", FreqScheduleKind::Linear, OmegaScheduleKind::Linear),
                ("f_linear_omega_cosine", FreqScheduleKind::Linear, OmegaScheduleKind::Cosine),
                ("f_cosine_omega_linear", FreqScheduleKind::Cosine, OmegaScheduleKind::Linear),
                ("f_cosine_omega_cosine", FreqScheduleKind::Cosine, OmegaScheduleKind::Cosine),
            ];
            Ok((
                combos
                    .iter()
                    .map(|(name, _, _)| Cell {
                        name: name.to_string(),
                        train_delta: no_delta,
                        infer_delta: |cfg, arg| {
                            let (f_kind, w_kind) = match arg {
                                "f_linear_omega_linear" => {
                                    (FreqScheduleKind::Linear, OmegaScheduleKind::Linear)
                                }
                                "f_linear_omega_cosine" => {
                                    (FreqScheduleKind::Linear, OmegaScheduleKind::Cosine)
                                }
                                "f_cosine_omega_linear" => {
                                    (FreqScheduleKind::Cosine, OmegaScheduleKind::Linear)
                                }
                                _ => (FreqScheduleKind::Cosine, OmegaScheduleKind::Cosine),
                            };
                            cfg.f_schedule = f_kind;
                            cfg.omega_schedule = w_kind;
                        },
                        arg: name.to_string(),
                    })
                    .collect(),
                false,
            ))
        }
        other => Err(CliError::Usage(format!(
            "unknown ablation axis: {other} (expected omega_const, p_base, kfc or schedules)"
        ))),
    }
}

struct CellResult {
    cell: String,
    seed: u64,
    fgo_atv: f64,
    fgo_jerk: f64,
    unguided_atv: f64,
    unguided_jerk: f64,
}

fn eval_cell(
    model: &PolicyModel,
    run: &RunConfig,
    dataset: &TrajectoryDataset,
) -> Result<(f64, f64, f64, f64), CliError> {
    use fgo_core::denoiser::Denoiser;
    let sched = sampling_schedule(run, true)?;
    let mut fgo = run.fgo_config()?;
    fgo.chunk_len = model.chunk_len();
    fgo.f_base = fgo.f_base.min(fgo.chunk_len);
    let roll_cfg = RolloutConfig {
        horizon: run.horizon,
        execute_m: run.execute_m.min(model.chunk_len()),
        smoother: Smoother::None,
        goal: vec![0.0; model.dims()],
        context_dim: model.context_dim(),
    };
    let mut guided = Vec::with_capacity(run.episodes);
    let mut plain = Vec::with_capacity(run.episodes);
    for ep in 0..run.episodes {
        let demo = &dataset.clean_chunks[ep % dataset.len()];
        let start = demo.row(0).to_vec();
        let goal = demo.row(demo.n_steps() - 1).to_vec();
        let (g, p) =
            paired_episode(model, &sched, &fgo, &start, &goal, &roll_cfg, run.seed, ep as u64)?;
        guided.push(g);
        plain.push(p);
    }
    let g = score_episodes(&guided, run.approach_window, run.dt)?;
    let p = score_episodes(&plain, run.approach_window, run.dt)?;
    let (g_atv, _) = mean_std(&g.atv);
    let (g_jerk, _) = mean_std(&g.jerk);
    let (p_atv, _) = mean_std(&p.atv);
    let (p_jerk, _) = mean_std(&p.jerk);
    Ok((g_atv, g_jerk, p_atv, p_jerk))
}

/// Sweeps one design axis over 3 seeds, writing per-run rows and per-cell
/// aggregates. Axes that only change inference reuse one trained model per
/// seed; training-time axes retrain per cell.
pub fn cmd_ablate(
    cfg: &RunConfig,
    data_path: &Path,
    axis: &str,
    out: &Path,
) -> Result<(), CliError> {
    ensure_out_dir(out)?;
    let dataset = TrajectoryDataset::from_container(&Container::load(data_path)?)?;
    let mut base = cfg.clone();
    base.chunk_len = dataset.spec.chunk_len;
    base.dims = dataset.spec.dims;
    base.context_dim = dataset.spec.context_dim;

    let (cells, retrain_per_cell) = cells_for(axis)?;
    let mut results: Vec<CellResult> = Vec::new();

    for &seed in &ABLATION_SEEDS {
        let mut seed_cfg = base.clone();
        seed_cfg.seed = seed;

        // One shared model per seed when the axis is inference-only.
        let shared_model = if retrain_per_cell {
            None
        } else {
            let (model, _) = fit_model(&seed_cfg, &dataset, None)?;
            Some(PolicyModel::Mlp(model))
        };

        for cell in &cells {
            let mut run = seed_cfg.clone();
            (cell.train_delta)(&mut run, &cell.arg);
            (cell.infer_delta)(&mut run, &cell.arg);
            run.validate()?;

            let owned_model;
            let model = match &shared_model {
                Some(m) => m,
                None => {
                    let (trained, _) = fit_model(&run, &dataset, None)?;
                    owned_model = PolicyModel::Mlp(trained);
                    &owned_model
                }
            };
            let (fgo_atv, fgo_jerk, unguided_atv, unguided_jerk) =
                eval_cell(model, &run, &dataset)?;
            results.push(CellResult {
                cell: cell.name.clone(),
                seed,
                fgo_atv,
                fgo_jerk,
                unguided_atv,
                unguided_jerk,
            });
            println!("{axis}/{} seed {seed}: ATV {fgo_atv} JerkRMS {fgo_jerk}", cell.name);
        }
    }

    let mut rows = String::from("axis,cell,seed,fgo_atv,fgo_jerk_rms,unguided_atv,unguided_jerk_rms\n");
    for r in &results {
        rows.push_str(&format!(
            "{axis},{},{},{},{},{},{}\n",
            r.cell, r.seed, r.fgo_atv, r.fgo_jerk, r.unguided_atv, r.unguided_jerk
        ));
    }
    write_text(&out.join("sweep.csv"), &rows)?;

    let mut summary = String::from(
        "axis,cell,fgo_atv_mean,fgo_atv_std,fgo_jerk_rms_mean,fgo_jerk_rms_std,unguided_jerk_rms_mean\n",
    );
    let mut cell_means: Vec<(String, f64)> = Vec::new();
    for cell in &cells {
        let atvs: Vec<f64> =
            results.iter().filter(|r| r.cell == cell.name).map(|r| r.fgo_atv).collect();
        let jerks: Vec<f64> =
            results.iter().filter(|r| r.cell == cell.name).map(|r| r.fgo_jerk).collect();
        let base_jerks: Vec<f64> =
            results.iter().filter(|r| r.cell == cell.name).map(|r| r.unguided_jerk).collect();
        let (atv_m, atv_s) = mean_std(&atvs);
        let (jerk_m, jerk_s) = mean_std(&jerks);
        let (base_m, _) = mean_std(&base_jerks);
        summary.push_str(&format!(
            "{axis},{},{atv_m},{atv_s},{jerk_m},{jerk_s},{base_m}\n",
            cell.name
        ));
        cell_means.push((cell.name.clone(), jerk_m));
    }
    write_text(&out.join("sweep_summary.csv"), &summary)?;

    if axis == "omega_const" {
        // Expected (not gating): interpolation beats extrapolation.
        let best = |pred: &dyn Fn(f64) -> bool| {
            OMEGA_GRID
                .iter()
                .filter(|w| pred(**w))
                .filter_map(|w| {
                    cell_means
                        .iter()
                        .find(|(name, _)| name == &format!("omega_{w}"))
                        .map(|(_, jerk)| (*w, *jerk))
                })
                .min_by(|a, b| a.1.total_cmp(&b.1))
        };
        let interp = best(&|w| w < 1.0);
        let extrap = best(&|w| w > 1.0);
        if let (Some((wi, ji)), Some((we, je))) = (interp, extrap) {
            let winner = if ji <= je { "interpolation" } else { "extrapolation" };
            let mut verdict = String::from("regime,best_omega,jerk_rms_mean\n");
            verdict.push_str(&format!("interpolation,{wi},{ji}\n"));
            verdict.push_str(&format!("extrapolation,{we},{je}\n"));
            verdict.push_str(&format!("winner,{winner},\n"));
            write_text(&out.join("omega_regime.csv"), &verdict)?;
            println!("omega regime winner: {winner} (interp {ji} vs extrap {je})");
        }
    }
    Ok(())
}
