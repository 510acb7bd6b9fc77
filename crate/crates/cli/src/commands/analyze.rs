use std::path::Path;

use fgo_core::chunk::ActionChunk;
use fgo_core::container::Container;
use fgo_core::spectral::haar_decompose;

use super::{ensure_out_dir, write_text};
use crate::svg;
use crate::CliError;

/// Per-step Haar low/high energies of one dumped run: `[K, N, D]` states.
fn run_energies(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let container = Container::load(path)?;
    let tensor = container.get("states")?;
    if tensor.shape.len() != 3 {
        return Err(CliError::Runtime(format!("{}: states must be [K, N, D]", path.display())));
    }
    let (k, n, d) = (tensor.shape[0], tensor.shape[1], tensor.shape[2]);
    tensor
        .data
        .chunks(n * d)
        .take(k)
        .map(|raw| {
            let state = ActionChunk::new(raw.to_vec(), n, d)?;
            let pair = haar_decompose(&state)?;
            Ok((pair.approx.norm_sq(), pair.detail.norm_sq()))
        })
        .collect()
}

fn collect_method(dir: &Path, method: &str) -> Result<Vec<Vec<(f64, f64)>>, CliError> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with(&format!("states_{method}_")) && n.ends_with(".fgtc"))
        })
        .collect();
    paths.sort();
    paths.iter().map(|p| run_energies(p)).collect()
}

fn average(runs: &[Vec<(f64, f64)>]) -> Result<Vec<(f64, f64)>, CliError> {
    let k = runs[0].len();
    if runs.iter().any(|r| r.len() != k) {
        return Err(CliError::Runtime("trace dumps have inconsistent step counts".into()));
    }
    let mut out = vec![(0.0, 0.0); k];
    for run in runs {
        for (slot, (low, high)) in out.iter_mut().zip(run) {
            slot.0 += low;
            slot.1 += high;
        }
    }
    let m = runs.len() as f64;
    Ok(out.into_iter().map(|(l, h)| (l / m, h / m)).collect())
}

/// Averages the per-step Haar decomposition over the dumped guided and
/// unguided runs and writes the evolution CSV plus the two-panel SVG pair.
pub fn cmd_analyze_frequency(
    traces_dir: &Path,
    out: &Path,
    stamp: Option<&str>,
) -> Result<(), CliError> {
    ensure_out_dir(out)?;
    let guided_runs = collect_method(traces_dir, "fgo")?;
    let plain_runs = collect_method(traces_dir, "unguided")?;
    if guided_runs.is_empty() || plain_runs.is_empty() {
        return Err(CliError::Usage(format!(
            "no states_fgo_*/states_unguided_* dumps found in {}",
            traces_dir.display()
        )));
    }
    let guided = average(&guided_runs)?;
    let plain = average(&plain_runs)?;
    if guided.len() != plain.len() {
        return Err(CliError::Runtime("guided and unguided step counts differ".into()));
    }
    let k_total = guided.len();

    // Post-update states run from k = K-1 down to k = 0.
    let mut csv = String::from("k,method,low_energy,high_energy\n");
    for (idx, (low, high)) in guided.iter().enumerate() {
        csv.push_str(&format!("{},fgo,{low},{high}\n", k_total - 1 - idx));
    }
    for (idx, (low, high)) in plain.iter().enumerate() {
        csv.push_str(&format!("{},unguided,{low},{high}\n", k_total - 1 - idx));
    }
    write_text(&out.join("evolution.csv"), &csv)?;

    let as_series = |data: &[(f64, f64)], pick_high: bool| -> Vec<(f64, f64)> {
        data.iter()
            .enumerate()
            .map(|(idx, (low, high))| {
                ((k_total - 1 - idx) as f64, if pick_high { *high } else { *low })
            })
            .collect()
    };
    let low_series = vec![
        ("fgo".to_string(), as_series(&guided, false)),
        ("unguided".to_string(), as_series(&plain, false)),
    ];
    write_text(
        &out.join("evolution_low.svg"),
        &svg::line_chart(
            "low-frequency component energy by denoising step",
            "k",
            "energy",
            &low_series,
            stamp,
        ),
    )?;
    let high_series = vec![
        ("fgo".to_string(), as_series(&guided, true)),
        ("unguided".to_string(), as_series(&plain, true)),
    ];
    write_text(
        &out.join("evolution_high.svg"),
        &svg::line_chart(
            "high-frequency component energy by denoising step",
            "k",
            "energy",
            &high_series,
            stamp,
        ),
    )?;

    println!(
        "averaged {} guided / {} unguided runs over {k_total} steps",
        guided_runs.len(),
        plain_runs.len()
    );
    Ok(())
}
