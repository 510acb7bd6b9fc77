//! Synthetic noisy-demonstration generator and a minimal integrator
//! environment for receding-horizon rollouts. Clean motions live on the
//! first `f_clean` DCT modes; contamination adds the artifacts human
//! demonstrations carry: jitter, holds, impulses.

use rand::Rng;

use crate::chunk::ActionChunk;
use crate::container::{Container, Tensor};
use crate::error::{FgoError, Result};
use crate::rng::{seeded_rng, standard_normal};
use crate::sampler::temporal_ensemble;
use crate::spectral::orthonormal_basis_vector;

#[derive(Debug, Clone, PartialEq)]
pub struct DemoSpec {
    pub n_demos: usize,
    pub chunk_len: usize,
    pub dims: usize,
    /// Modes carrying the true motion; clean chunks have no energy above it.
    pub f_clean: usize,
    pub jitter_std: f64,
    pub pause_prob: f64,
    pub jerk_prob: f64,
    pub context_dim: usize,
    pub seed: u64,
}

impl Default for DemoSpec {
    fn default() -> Self {
        Self {
            n_demos: 128,
            chunk_len: 16,
            dims: 2,
            f_clean: 3,
            jitter_std: 0.1,
            pause_prob: 0.2,
            jerk_prob: 0.2,
            context_dim: 4,
            seed: 0,
        }
    }
}

impl DemoSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_demos == 0 || self.chunk_len == 0 || self.dims == 0 || self.context_dim == 0 {
            return Err(FgoError::Config("demo sizes must be positive".into()));
        }
        if self.f_clean > self.chunk_len {
            return Err(FgoError::Config(format!(
                "f_clean {} exceeds chunk length {}",
                self.f_clean, self.chunk_len
            )));
        }
        for (name, p) in [("pause_prob", self.pause_prob), ("jerk_prob", self.jerk_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(FgoError::Config(format!("{name} {p} not in [0,1]")));
            }
        }
        if self.jitter_std < 0.0 {
            return Err(FgoError::Config("jitter_std must be >= 0".into()));
        }
        Ok(())
    }
}

/// (context, contaminated chunk) pairs with the pre-contamination ground
/// truth retained for evaluation.
#[derive(Debug, Clone)]
pub struct TrajectoryDataset {
    pub contexts: Vec<Vec<f64>>,
    pub chunks: Vec<ActionChunk>,
    pub clean_chunks: Vec<ActionChunk>,
    pub spec: DemoSpec,
}

/// Context layout: `[first clean action || last clean action]`, padded with
/// zeros or truncated to `context_dim`.
pub fn make_context(first: &[f64], last: &[f64], context_dim: usize) -> Vec<f64> {
    let mut ctx: Vec<f64> = first.iter().chain(last.iter()).copied().collect();
    ctx.resize(context_dim, 0.0);
    ctx
}

const IMPULSE_SCALE: f64 = 3.0;

/// Deterministic synthesis of `n_demos` contaminated demonstrations.
/// Per demo, in rng order: clean mode coefficients, jitter, pause decision
/// and placement, impulse decision and placement.
pub fn generate(spec: &DemoSpec) -> Result<TrajectoryDataset> {
    spec.validate()?;
    let mut rng = seeded_rng(spec.seed);
    let n = spec.chunk_len;
    let d = spec.dims;
    let mut contexts = Vec::with_capacity(spec.n_demos);
    let mut chunks = Vec::with_capacity(spec.n_demos);
    let mut clean_chunks = Vec::with_capacity(spec.n_demos);

    let basis: Vec<Vec<f64>> =
        (0..spec.f_clean).map(|i| orthonormal_basis_vector(n, i)).collect();

    for _ in 0..spec.n_demos {
        // Clean motion from random coefficients on the first f_clean modes.
        let mut clean = ActionChunk::zeros(n, d);
        for w in basis.iter() {
            for dim in 0..d {
                let coeff = standard_normal(&mut rng);
                for (t, wv) in w.iter().enumerate() {
                    clean.set(t, dim, clean.get(t, dim) + coeff * wv);
                }
            }
        }

        let mut noisy = clean.clone();
        if spec.jitter_std > 0.0 {
            for v in noisy.as_mut_slice() {
                *v += standard_normal(&mut rng) * spec.jitter_std;
            }
        }
        if spec.pause_prob > 0.0 && rng.random::<f64>() < spec.pause_prob && n >= 2 {
            let len = rng.random_range(2..=4usize).min(n);
            let start = rng.random_range(0..=n - len);
            let held: Vec<f64> = noisy.row(start).to_vec();
            for t in start..start + len {
                for (dim, value) in held.iter().enumerate() {
                    noisy.set(t, dim, *value);
                }
            }
        }
        if spec.jerk_prob > 0.0 && rng.random::<f64>() < spec.jerk_prob {
            let t = rng.random_range(0..n);
            for dim in 0..d {
                let sign = if rng.random::<f64>() < 0.5 { -1.0 } else { 1.0 };
                noisy.set(t, dim, noisy.get(t, dim) + sign * IMPULSE_SCALE * spec.jitter_std);
            }
        }

        contexts.push(make_context(clean.row(0), clean.row(n - 1), spec.context_dim));
        chunks.push(noisy);
        clean_chunks.push(clean);
    }
    Ok(TrajectoryDataset { contexts, chunks, clean_chunks, spec: spec.clone() })
}

impl TrajectoryDataset {
    pub fn len(&self) -> usize {
        self.chunks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chunks.is_empty()
    }

    /// Serializes the dataset plus a header echo of the generating spec.
    pub fn to_container(&self) -> Result<Container> {
        let mut c = Container::new();
        let m = self.len();
        let ctx_dim = self.spec.context_dim;
        let mut ctx_flat = Vec::with_capacity(m * ctx_dim);
        for ctx in &self.contexts {
            ctx_flat.extend_from_slice(ctx);
        }
        c.insert("contexts", Tensor::new(vec![m, ctx_dim], ctx_flat)?);
        let flat = |list: &[ActionChunk]| -> Vec<f64> {
            list.iter().flat_map(|ch| ch.as_slice().to_vec()).collect()
        };
        let shape = vec![m, self.spec.chunk_len, self.spec.dims];
        c.insert("chunks", Tensor::new(shape.clone(), flat(&self.chunks))?);
        c.insert("clean_chunks", Tensor::new(shape, flat(&self.clean_chunks))?);
        c.insert(
            "spec",
            Tensor::new(
                vec![9],
                vec![
                    self.spec.n_demos as f64,
                    self.spec.chunk_len as f64,
                    self.spec.dims as f64,
                    self.spec.f_clean as f64,
                    self.spec.jitter_std,
                    self.spec.pause_prob,
                    self.spec.jerk_prob,
                    self.spec.context_dim as f64,
                    self.spec.seed as f64,
                ],
            )?,
        );
        Ok(c)
    }

    pub fn from_container(c: &Container) -> Result<Self> {
        let spec_t = c.get("spec")?;
        if spec_t.data.len() != 9 {
            return Err(FgoError::Container("spec tensor must have 9 entries".into()));
        }
        let spec = DemoSpec {
            n_demos: spec_t.data[0] as usize,
            chunk_len: spec_t.data[1] as usize,
            dims: spec_t.data[2] as usize,
            f_clean: spec_t.data[3] as usize,
            jitter_std: spec_t.data[4],
            pause_prob: spec_t.data[5],
            jerk_prob: spec_t.data[6],
            context_dim: spec_t.data[7] as usize,
            seed: spec_t.data[8] as u64,
        };
        let ctx_t = c.get("contexts")?;
        if ctx_t.shape.len() != 2 || ctx_t.shape[1] != spec.context_dim {
            return Err(FgoError::Container("contexts shape mismatch".into()));
        }
        if ctx_t.data.iter().any(|v| !v.is_finite()) {
            return Err(FgoError::NonFinite("dataset contexts".into()));
        }
        let m = ctx_t.shape[0];
        let contexts: Vec<Vec<f64>> =
            ctx_t.data.chunks(spec.context_dim).map(|c| c.to_vec()).collect();
        let read_chunks = |name: &str| -> Result<Vec<ActionChunk>> {
            let t = c.get(name)?;
            if t.shape != vec![m, spec.chunk_len, spec.dims] {
                return Err(FgoError::Container(format!("{name} shape mismatch")));
            }
            t.data
                .chunks(spec.chunk_len * spec.dims)
                .map(|raw| ActionChunk::new(raw.to_vec(), spec.chunk_len, spec.dims))
                .collect()
        };
        Ok(Self {
            contexts,
            chunks: read_chunks("chunks")?,
            clean_chunks: read_chunks("clean_chunks")?,
            spec,
        })
    }
}

/// Smoothing applied to each predicted chunk before execution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Smoother {
    None,
    Lowpass(usize),
    Ensemble(f64),
}

#[derive(Debug, Clone)]
pub struct RolloutConfig {
    pub horizon: usize,
    /// Steps executed per replan.
    pub execute_m: usize,
    pub smoother: Smoother,
    /// Fixed goal the context is built toward.
    pub goal: Vec<f64>,
    pub context_dim: usize,
}

/// Receding-horizon execution in a single-integrator environment: the state
/// is the last executed action vector, the context is
/// `[state || goal]` padded to `context_dim`, and each replan samples one
/// chunk and executes its first `execute_m` steps.
pub fn rollout(
    mut policy: impl FnMut(&[f64]) -> Result<ActionChunk>,
    start: &[f64],
    cfg: &RolloutConfig,
) -> Result<ActionChunk> {
    if cfg.execute_m == 0 {
        return Err(FgoError::Config("execute_m must be >= 1".into()));
    }
    if cfg.horizon < cfg.execute_m {
        return Err(FgoError::Config(format!(
            "horizon {} below execute_m {}",
            cfg.horizon, cfg.execute_m
        )));
    }
    let dims = start.len();
    let mut state: Vec<f64> = start.to_vec();
    let mut executed: Vec<f64> = Vec::with_capacity(cfg.horizon * dims);
    let mut history: Vec<(usize, ActionChunk)> = Vec::new();
    let mut t = 0usize;

    while t < cfg.horizon {
        let context = make_context(&state, &cfg.goal, cfg.context_dim);
        let chunk = policy(&context)
            .map_err(|e| FgoError::Config(format!("policy failed at step {t}: {e}")))?;
        if chunk.n_steps() < cfg.execute_m || chunk.dims() != dims {
            return Err(FgoError::Shape(format!(
                "policy chunk {}x{} unusable at step {t} (need >= {} steps of dim {dims})",
                chunk.n_steps(),
                chunk.dims(),
                cfg.execute_m
            )));
        }
        let chunk = match cfg.smoother {
            Smoother::None | Smoother::Ensemble(_) => chunk,
            Smoother::Lowpass(f) => crate::spectral::low_pass(&chunk, f)?,
        };
        history.push((t, chunk));

        let steps_left = cfg.horizon - t;
        for local in 0..cfg.execute_m.min(steps_left) {
            let action: Vec<f64> = match cfg.smoother {
                Smoother::Ensemble(decay) => temporal_ensemble(&history, t + local, decay)?,
                _ => history.last().unwrap().1.row(local).to_vec(),
            };
            executed.extend_from_slice(&action);
            state = action;
        }
        t += cfg.execute_m.min(steps_left);
    }
    ActionChunk::new(executed, cfg.horizon, dims)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::band_energy;

    fn quiet_spec() -> DemoSpec {
        DemoSpec { jitter_std: 0.0, pause_prob: 0.0, jerk_prob: 0.0, ..DemoSpec::default() }
    }

    #[test]
    fn spec_validation() {
        assert!(DemoSpec { f_clean: 17, ..DemoSpec::default() }.validate().is_err());
        assert!(DemoSpec { pause_prob: 1.5, ..DemoSpec::default() }.validate().is_err());
        assert!(DemoSpec { jitter_std: -0.1, ..DemoSpec::default() }.validate().is_err());
        assert!(DemoSpec { n_demos: 0, ..DemoSpec::default() }.validate().is_err());
    }

    #[test]
    fn clean_generation_without_contamination() {
        let data = generate(&quiet_spec()).unwrap();
        assert_eq!(data.len(), 128);
        for (noisy, clean) in data.chunks.iter().zip(&data.clean_chunks) {
            assert_eq!(noisy, clean);
            let (_, high) = band_energy(clean, data.spec.f_clean).unwrap();
            assert!(high < 1e-18, "energy above f_clean: {high}");
        }
    }

    #[test]
    fn generation_is_bit_reproducible() {
        let spec = DemoSpec::default();
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        for (x, y) in a.chunks.iter().zip(&b.chunks) {
            assert_eq!(x, y);
        }
        let different = generate(&DemoSpec { seed: 1, ..spec }).unwrap();
        assert_ne!(a.chunks[0], different.chunks[0]);
        assert_eq!(a.chunks[0].n_steps(), different.chunks[0].n_steps());
    }

    #[test]
    fn jitter_variance_matches_spec() {
        let spec = DemoSpec {
            n_demos: 400,
            jitter_std: 0.1,
            pause_prob: 0.0,
            jerk_prob: 0.0,
            ..DemoSpec::default()
        };
        let data = generate(&spec).unwrap();
        let mut total = 0.0;
        let mut count = 0usize;
        for (noisy, clean) in data.chunks.iter().zip(&data.clean_chunks) {
            total += noisy.sub(clean).norm_sq();
            count += noisy.as_slice().len();
        }
        let mean_sq = total / count as f64;
        // Var of the squared-deviation estimate: 2 sigma^4 / n.
        let se = (2.0 * 0.01f64 * 0.01 / count as f64).sqrt();
        assert!(
            (mean_sq - 0.01).abs() < 3.0 * se,
            "mean squared deviation {mean_sq} vs 0.01 (se {se})"
        );
    }

    #[test]
    fn contamination_raises_high_band_energy() {
        let contaminated = generate(&DemoSpec::default()).unwrap();
        let mut high_total = 0.0;
        for chunk in &contaminated.chunks {
            high_total += band_energy(chunk, contaminated.spec.f_clean).unwrap().1;
        }
        assert!(high_total > 0.0);
    }

    #[test]
    fn context_carries_start_and_goal() {
        let data = generate(&quiet_spec()).unwrap();
        for (ctx, clean) in data.contexts.iter().zip(&data.clean_chunks) {
            assert_eq!(ctx.len(), 4);
            assert_eq!(ctx[0], clean.get(0, 0));
            assert_eq!(ctx[1], clean.get(0, 1));
            assert_eq!(ctx[2], clean.get(15, 0));
            assert_eq!(ctx[3], clean.get(15, 1));
        }
        // Truncation and padding.
        assert_eq!(make_context(&[1.0, 2.0], &[3.0, 4.0], 3), vec![1.0, 2.0, 3.0]);
        assert_eq!(make_context(&[1.0], &[2.0], 4), vec![1.0, 2.0, 0.0, 0.0]);
    }

    #[test]
    fn dataset_container_round_trip() {
        let data = generate(&DemoSpec { n_demos: 10, ..DemoSpec::default() }).unwrap();
        let c = data.to_container().unwrap();
        let mut buf = Vec::new();
        c.write_to(&mut buf).unwrap();
        let back =
            TrajectoryDataset::from_container(&Container::read_from(buf.as_slice()).unwrap())
                .unwrap();
        assert_eq!(back.spec, data.spec);
        for (a, b) in data.chunks.iter().zip(&back.chunks) {
            assert_eq!(a, b);
        }
        for (a, b) in data.contexts.iter().zip(&back.contexts) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn zero_policy_rolls_out_zeros() {
        let cfg = RolloutConfig {
            horizon: 12,
            execute_m: 4,
            smoother: Smoother::None,
            goal: vec![0.0, 0.0],
            context_dim: 4,
        };
        let out = rollout(|_| Ok(ActionChunk::zeros(8, 2)), &[0.0, 0.0], &cfg).unwrap();
        assert_eq!(out.n_steps(), 12);
        assert_eq!(out.norm_sq(), 0.0);
    }

    #[test]
    fn replan_cadence_counts_policy_calls() {
        let mut calls = 0;
        let cfg = RolloutConfig {
            horizon: 24,
            execute_m: 8,
            smoother: Smoother::None,
            goal: vec![0.0],
            context_dim: 2,
        };
        let out = rollout(
            |_| {
                calls += 1;
                Ok(ActionChunk::zeros(8, 1))
            },
            &[0.0],
            &cfg,
        )
        .unwrap();
        assert_eq!(calls, 3, "ceil(24/8) policy calls");
        assert_eq!(out.n_steps(), 24);

        // Horizon not a multiple of the cadence still gives exactly T steps.
        let cfg2 = RolloutConfig { horizon: 10, execute_m: 8, ..cfg };
        let mut calls2 = 0;
        let out2 = rollout(
            |_| {
                calls2 += 1;
                Ok(ActionChunk::zeros(8, 1))
            },
            &[0.0],
            &cfg2,
        )
        .unwrap();
        assert_eq!(calls2, 2);
        assert_eq!(out2.n_steps(), 10);
    }

    #[test]
    fn rollout_propagates_policy_failure_with_step() {
        let cfg = RolloutConfig {
            horizon: 8,
            execute_m: 4,
            smoother: Smoother::None,
            goal: vec![0.0],
            context_dim: 2,
        };
        let mut calls = 0;
        let err = rollout(
            |_| {
                calls += 1;
                if calls > 1 {
                    Err(FgoError::Empty("boom".into()))
                } else {
                    Ok(ActionChunk::zeros(4, 1))
                }
            },
            &[0.0],
            &cfg,
        )
        .unwrap_err();
        assert!(err.to_string().contains("step 4"), "{err}");
    }

    #[test]
    fn ensemble_smoother_averages_overlapping_plans() {
        // Policy alternates between two constant chunks; with execute_m = 1
        // and ensembling, executed actions blend predictions from
        // overlapping plans rather than jumping between them.
        let cfg = RolloutConfig {
            horizon: 6,
            execute_m: 1,
            smoother: Smoother::Ensemble(0.5),
            goal: vec![0.0],
            context_dim: 2,
        };
        let mut flip = false;
        let raw_cfg = RolloutConfig { smoother: Smoother::None, ..cfg.clone() };
        let make_policy = |flip: &mut bool| {
            *flip = !*flip;
            let v = if *flip { 1.0 } else { -1.0 };
            ActionChunk::new(vec![v; 4], 4, 1)
        };
        let smoothed = rollout(|_| make_policy(&mut flip), &[0.0], &cfg).unwrap();
        let mut flip2 = false;
        let raw = rollout(|_| make_policy(&mut flip2), &[0.0], &raw_cfg).unwrap();
        let atv_s = crate::metrics::atv(&smoothed).unwrap();
        let atv_r = crate::metrics::atv(&raw).unwrap();
        assert!(atv_s < atv_r, "ensembling must damp the flip-flop: {atv_s} vs {atv_r}");
    }

    #[test]
    fn lowpass_smoother_damps_jittery_plans() {
        use crate::metrics::atv;
        use crate::rng::{gaussian_chunk, seeded_rng};

        let mut rng = seeded_rng(31);
        let mut jitter_policy = move |_: &[f64]| {
            let smooth = crate::spectral::low_pass(&gaussian_chunk(&mut rng, 8, 1), 2).unwrap();
            Ok(smooth.axpy(0.3, &gaussian_chunk(&mut rng, 8, 1)))
        };
        let base = RolloutConfig {
            horizon: 32,
            execute_m: 8,
            smoother: Smoother::None,
            goal: vec![0.0],
            context_dim: 2,
        };
        let raw = rollout(&mut jitter_policy, &[0.0], &base).unwrap();

        let mut rng2 = seeded_rng(31);
        let mut jitter_policy2 = move |_: &[f64]| {
            let smooth = crate::spectral::low_pass(&gaussian_chunk(&mut rng2, 8, 1), 2).unwrap();
            Ok(smooth.axpy(0.3, &gaussian_chunk(&mut rng2, 8, 1)))
        };
        let cfg = RolloutConfig { smoother: Smoother::Lowpass(2), ..base };
        let smoothed = rollout(&mut jitter_policy2, &[0.0], &cfg).unwrap();
        assert!(
            atv(&smoothed).unwrap() < atv(&raw).unwrap(),
            "low-pass smoothing must damp jitter"
        );
    }

    #[test]
    fn oracle_policy_rollout_matches_clean_trajectory_smoothness() {
        // Point-mass oracle at a clean demo chunk: the executed trajectory
        // concentrates on that chunk, so its ATV matches the generating
        // trajectory's within 10%.
        use crate::denoiser::GaussianOracle;
        use crate::metrics::atv;
        use crate::rng::seeded_rng;
        use crate::sampler::sample_unguided;
        use crate::schedule::{make_schedule, ScheduleKind};

        let spec = DemoSpec {
            n_demos: 4,
            jitter_std: 0.0,
            pause_prob: 0.0,
            jerk_prob: 0.0,
            ..DemoSpec::default()
        };
        let data = generate(&spec).unwrap();
        let clean = &data.clean_chunks[0];
        let sched = make_schedule(50, ScheduleKind::SquaredCosine).unwrap();
        let stds = ActionChunk::zeros(spec.chunk_len, spec.dims);
        let oracle =
            GaussianOracle::from_dct_diagonal(clean, &stds, spec.context_dim, sched.clone())
                .unwrap();

        let mut rng = seeded_rng(7);
        let cfg = RolloutConfig {
            horizon: spec.chunk_len,
            execute_m: spec.chunk_len,
            smoother: Smoother::None,
            goal: clean.row(spec.chunk_len - 1).to_vec(),
            context_dim: spec.context_dim,
        };
        let executed = rollout(
            |ctx| sample_unguided(&oracle, ctx, &sched, &mut rng),
            clean.row(0),
            &cfg,
        )
        .unwrap();
        let atv_exec = atv(&executed).unwrap();
        let atv_clean = atv(clean).unwrap();
        assert!(
            (atv_exec - atv_clean).abs() < 0.1 * atv_clean,
            "rollout ATV {atv_exec} vs clean {atv_clean}"
        );
    }

    #[test]
    fn rollout_config_validation() {
        let cfg = RolloutConfig {
            horizon: 4,
            execute_m: 0,
            smoother: Smoother::None,
            goal: vec![0.0],
            context_dim: 2,
        };
        assert!(rollout(|_| Ok(ActionChunk::zeros(4, 1)), &[0.0], &cfg).is_err());
        let cfg2 = RolloutConfig { execute_m: 8, ..cfg };
        assert!(rollout(|_| Ok(ActionChunk::zeros(4, 1)), &[0.0], &cfg2).is_err());
    }
}
