use std::path::Path;

use fgo_core::chunk::ActionChunk;
use fgo_core::container::Container;
use fgo_core::metrics::{approach_window, atv, jerk_rms};

use super::{ensure_out_dir, mean_std, write_text};
use crate::config::RunConfig;
use crate::svg;
use crate::CliError;

pub(crate) struct MethodMetrics {
    pub atv: Vec<f64>,
    pub jerk: Vec<f64>,
}

pub(crate) fn score_episodes(
    episodes: &[ActionChunk],
    window: usize,
    dt: f64,
) -> Result<MethodMetrics, CliError> {
    let mut out = MethodMetrics { atv: Vec::new(), jerk: Vec::new() };
    for traj in episodes {
        let prefix = approach_window(traj, window);
        out.atv.push(atv(&prefix)?);
        out.jerk.push(jerk_rms(&prefix, dt)?);
    }
    Ok(out)
}

fn episodes_from(container: &Container, name: &str) -> Result<Vec<ActionChunk>, CliError> {
    let tensor = container.get(name)?;
    if tensor.shape.len() != 3 {
        return Err(CliError::Runtime(format!("tensor {name} must be [episodes, T, D]")));
    }
    let (m, t, d) = (tensor.shape[0], tensor.shape[1], tensor.shape[2]);
    Ok(tensor
        .data
        .chunks(t * d)
        .take(m)
        .map(|raw| ActionChunk::new(raw.to_vec(), t, d))
        .collect::<fgo_core::Result<Vec<_>>>()?)
}

/// Scores paired trajectories (rollouts or raw samples) with ATV/JerkRMS
/// over the approach window and writes per-episode rows, the aggregate
/// summary with the relative JerkRMS reduction, and bar plots.
pub fn cmd_eval(
    cfg: &RunConfig,
    input_path: &Path,
    out: &Path,
    stamp: Option<&str>,
) -> Result<(), CliError> {
    ensure_out_dir(out)?;
    let container = Container::load(input_path)?;
    let guided = episodes_from(&container, "fgo")?;
    let plain = episodes_from(&container, "unguided")?;
    if guided.is_empty() || guided.len() != plain.len() {
        return Err(CliError::Runtime("fgo/unguided episode counts differ or are empty".into()));
    }
    let t_len = guided[0].n_steps();
    if cfg.approach_window > t_len {
        eprintln!(
            "warning: approach window {} exceeds trajectory length {t_len}; using the full trajectory",
            cfg.approach_window
        );
    }

    let g = score_episodes(&guided, cfg.approach_window, cfg.dt)?;
    let p = score_episodes(&plain, cfg.approach_window, cfg.dt)?;

    let mut rows = String::from("episode,method,atv,jerk_rms\n");
    for (i, (a, j)) in g.atv.iter().zip(&g.jerk).enumerate() {
        rows.push_str(&format!("{i},fgo,{a},{j}\n"));
    }
    for (i, (a, j)) in p.atv.iter().zip(&p.jerk).enumerate() {
        rows.push_str(&format!("{i},unguided,{a},{j}\n"));
    }
    write_text(&out.join("metrics.csv"), &rows)?;

    let (g_atv, g_atv_sd) = mean_std(&g.atv);
    let (g_jerk, g_jerk_sd) = mean_std(&g.jerk);
    let (p_atv, p_atv_sd) = mean_std(&p.atv);
    let (p_jerk, p_jerk_sd) = mean_std(&p.jerk);
    let reduction = if p_jerk > 0.0 { (1.0 - g_jerk / p_jerk) * 100.0 } else { 0.0 };

    let mut summary =
        String::from("method,atv_mean,atv_std,jerk_rms_mean,jerk_rms_std,jerk_rms_reduction_pct\n");
    summary.push_str(&format!("fgo,{g_atv},{g_atv_sd},{g_jerk},{g_jerk_sd},{reduction}\n"));
    summary.push_str(&format!("unguided,{p_atv},{p_atv_sd},{p_jerk},{p_jerk_sd},0\n"));
    write_text(&out.join("summary.csv"), &summary)?;

    // Mean per-mode energy of the approach-window trajectories.
    for (name, episodes) in [("fgo", &guided), ("unguided", &plain)] {
        let mut profile: Vec<f64> = Vec::new();
        for traj in episodes.iter() {
            let report =
                fgo_core::metrics::episode_report(traj, cfg.approach_window, cfg.dt)?;
            if profile.is_empty() {
                profile = vec![0.0; report.band_profile.len()];
            }
            for (slot, e) in profile.iter_mut().zip(&report.band_profile) {
                *slot += e / episodes.len() as f64;
            }
        }
        let mut csv = String::from("mode,energy\n");
        for (mode, energy) in profile.iter().enumerate() {
            csv.push_str(&format!("{mode},{energy}\n"));
        }
        write_text(&out.join(format!("band_profile_{name}.csv")), &csv)?;
    }

    let atv_bars = vec![
        ("fgo".to_string(), g_atv, g_atv_sd),
        ("unguided".to_string(), p_atv, p_atv_sd),
    ];
    write_text(
        &out.join("metrics_atv.svg"),
        &svg::bar_chart("mean ATV over approach window", "ATV", &atv_bars, stamp),
    )?;
    let jerk_bars = vec![
        ("fgo".to_string(), g_jerk, g_jerk_sd),
        ("unguided".to_string(), p_jerk, p_jerk_sd),
    ];
    write_text(
        &out.join("metrics_jerk.svg"),
        &svg::bar_chart("mean JerkRMS over approach window", "JerkRMS", &jerk_bars, stamp),
    )?;

    println!("fgo:      ATV {g_atv} JerkRMS {g_jerk}");
    println!("unguided: ATV {p_atv} JerkRMS {p_jerk}");
    println!("JerkRMS reduction: {reduction}%");
    Ok(())
}
