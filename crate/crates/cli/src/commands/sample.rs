use std::path::Path;

use fgo_core::container::{Container, Tensor};
use fgo_core::denoiser::Denoiser;
use fgo_core::rng::derive_stream;
use fgo_core::sampler::{sample_fgo, SampleTrace};

use super::{degenerate_fgo, ensure_out_dir, load_model, sampling_schedule, write_text, STREAM_SAMPLE};
use crate::config::RunConfig;
use crate::CliError;

/// Emits `count` guided/unguided sample pairs under shared noise streams,
/// plus per-sample trace CSVs and the per-step state dumps the frequency
/// analysis consumes. Without a checkpoint the analytic oracle stands in
/// for the trained model.
pub fn cmd_sample(
    cfg: &RunConfig,
    checkpoint: Option<&Path>,
    count: usize,
    out: &Path,
) -> Result<(), CliError> {
    ensure_out_dir(out)?;
    let sched = sampling_schedule(cfg, checkpoint.is_some())?;
    let model = load_model(cfg, checkpoint, &sched)?;
    let mut fgo = cfg.fgo_config()?;
    fgo.chunk_len = model.chunk_len();
    fgo.f_base = fgo.f_base.min(fgo.chunk_len);
    let plain = degenerate_fgo(fgo.chunk_len);
    let context = vec![0.0; model.context_dim()];
    let (n, d) = (model.chunk_len(), model.dims());
    let mut guided_flat = Vec::with_capacity(count * n * d);
    let mut plain_flat = Vec::with_capacity(count * n * d);

    for i in 0..count {
        // Shared noise stream: both runs consume identical draws.
        let mut rng_guided = derive_stream(cfg.seed, STREAM_SAMPLE, i as u64);
        let mut rng_plain = rng_guided.clone();
        let (chunk_g, trace_g) = sample_fgo(&model, &context, &sched, &fgo, &mut rng_guided)?;
        let (chunk_p, trace_p) = sample_fgo(&model, &context, &sched, &plain, &mut rng_plain)?;

        guided_flat.extend_from_slice(chunk_g.as_slice());
        plain_flat.extend_from_slice(chunk_p.as_slice());

        write_text(&out.join(format!("trace_fgo_{i:03}.csv")), &trace_g.to_csv(fgo.f_base)?)?;
        write_text(&out.join(format!("trace_unguided_{i:03}.csv")), &trace_p.to_csv(fgo.f_base)?)?;
        dump_states(&trace_g, n, d, &out.join(format!("states_fgo_{i:03}.fgtc")))?;
        dump_states(&trace_p, n, d, &out.join(format!("states_unguided_{i:03}.fgtc")))?;
    }

    let mut container = Container::new();
    container.insert("fgo", Tensor::new(vec![count, n, d], guided_flat)?);
    container.insert("unguided", Tensor::new(vec![count, n, d], plain_flat)?);
    let path = out.join("samples.fgtc");
    container.save(&path)?;
    println!("wrote {count} paired samples to {}", path.display());
    Ok(())
}

/// Post-update states of a run stacked into one `[K, N, D]` tensor.
fn dump_states(trace: &SampleTrace, n: usize, d: usize, path: &Path) -> Result<(), CliError> {
    let states = trace.post_update_states();
    let mut flat = Vec::with_capacity(states.len() * n * d);
    for state in &states {
        flat.extend_from_slice(state.as_slice());
    }
    let mut c = Container::new();
    c.insert("states", Tensor::new(vec![states.len(), n, d], flat)?);
    c.save(path)?;
    Ok(())
}
