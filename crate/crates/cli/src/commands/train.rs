use std::path::Path;

use fgo_core::container::Container;
use fgo_core::datagen::TrajectoryDataset;

use super::{ensure_out_dir, fit_model, write_text};
use crate::config::RunConfig;
use crate::CliError;

/// Trains the frequency-conditioned denoiser on a generated dataset and
/// writes the checkpoint, the loss trace and the cut-off telemetry.
pub fn cmd_train(cfg: &RunConfig, data_path: &Path, out: &Path) -> Result<(), CliError> {
    ensure_out_dir(out)?;
    let dataset = TrajectoryDataset::from_container(&Container::load(data_path)?)?;

    // The dataset is authoritative for the shapes the model must accept.
    let mut run = cfg.clone();
    run.chunk_len = dataset.spec.chunk_len;
    run.dims = dataset.spec.dims;
    run.context_dim = dataset.spec.context_dim;
    run.validate()?;

    let (_, report) = fit_model(&run, &dataset, Some(out))?;

    let mut loss_csv = String::from("step,epoch,loss,f,k\n");
    for s in &report.steps {
        loss_csv.push_str(&format!("{},{},{},{},{}\n", s.step, s.epoch, s.loss, s.cutoff, s.step_k));
    }
    write_text(&out.join("loss.csv"), &loss_csv)?;

    let mut hist_csv = String::from("f,count\n");
    for (f, count) in report.cutoff_histogram.iter().enumerate() {
        hist_csv.push_str(&format!("{f},{count}\n"));
    }
    write_text(&out.join("cutoff_histogram.csv"), &hist_csv)?;

    println!(
        "trained {} epochs in {:.2}s, final loss {}",
        report.epoch_losses.len(),
        report.wall_clock_secs,
        report.final_loss
    );
    println!("checkpoint: {}", out.join("checkpoint_final.fgtc").display());
    Ok(())
}
