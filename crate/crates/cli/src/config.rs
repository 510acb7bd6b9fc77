//! Flat key-value run configuration: one `key = value` per line, `#`
//! comments, no nesting. Unknown keys are rejected so typos fail loudly.

use std::collections::BTreeMap;
use std::path::Path;

use fgo_core::datagen::DemoSpec;
use fgo_core::denoiser::MlpConfig;
use fgo_core::schedule::{FgoConfig, FreqScheduleKind, OmegaScheduleKind, ScheduleKind};
use fgo_core::training::TrainConfig;

use crate::CliError;

/// Everything a run needs, with the shipped synthetic-benchmark defaults.
#[derive(Debug, Clone)]
pub struct RunConfig {
    // Demonstration generator.
    pub n_demos: usize,
    pub chunk_len: usize,
    pub dims: usize,
    pub f_clean: usize,
    pub jitter_std: f64,
    pub pause_prob: f64,
    pub jerk_prob: f64,
    pub context_dim: usize,

    // Guidance.
    pub f_base: usize,
    pub p_base: f64,
    pub beta: f64,
    pub kfc: bool,
    pub f_schedule: FreqScheduleKind,
    pub omega_schedule: OmegaScheduleKind,
    pub omega_const: f64,

    // Diffusion.
    pub k_train: usize,
    pub k_infer: usize,
    pub schedule_kind: ScheduleKind,

    // Model.
    pub hidden: usize,
    pub depth: usize,
    pub embed_dim: usize,

    // Training.
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub checkpoint_every: usize,

    // Sampling / rollouts / evaluation.
    pub count: usize,
    pub oracle_mean: f64,
    pub oracle_std: f64,
    pub oracle_band: usize,
    pub horizon: usize,
    pub execute_m: usize,
    pub smoother: String,
    pub smoother_f: usize,
    pub ensemble_decay: f64,
    pub episodes: usize,
    pub approach_window: usize,
    pub dt: f64,

    pub seed: u64,
}

impl Default for RunConfig {
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
            f_base: 3,
            p_base: 0.2,
            beta: 0.5,
            kfc: true,
            f_schedule: FreqScheduleKind::Linear,
            omega_schedule: OmegaScheduleKind::Linear,
            omega_const: 1.0,
            k_train: 100,
            k_infer: 50,
            schedule_kind: ScheduleKind::SquaredCosine,
            hidden: 64,
            depth: 3,
            embed_dim: 16,
            epochs: 60,
            batch_size: 32,
            learning_rate: 1e-3,
            checkpoint_every: 0,
            count: 16,
            oracle_mean: 0.0,
            oracle_std: 1.0,
            oracle_band: 0,
            horizon: 64,
            execute_m: 8,
            smoother: "none".into(),
            smoother_f: 8,
            ensemble_decay: 0.01,
            episodes: 50,
            approach_window: fgo_core::metrics::DEFAULT_APPROACH_WINDOW,
            dt: 1.0,
            seed: 0,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_str_table(&text)
    }

    pub fn from_str_table(text: &str) -> Result<Self, CliError> {
        let mut table = BTreeMap::new();
        for (line_no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("line {}: expected key = value", line_no + 1)))?;
            table.insert(key.trim().to_string(), value.trim().to_string());
        }
        Self::from_table(table)
    }

    fn from_table(table: BTreeMap<String, String>) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        for (key, value) in &table {
            cfg.apply(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        fn p<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
            value.parse().map_err(|_| usage(format!("bad value for {key}: {value}")))
        }
        match key {
            "n_demos" => self.n_demos = p(key, value)?,
            "chunk_len" => self.chunk_len = p(key, value)?,
            "dims" => self.dims = p(key, value)?,
            "f_clean" => self.f_clean = p(key, value)?,
            "jitter_std" => self.jitter_std = p(key, value)?,
            "pause_prob" => self.pause_prob = p(key, value)?,
            "jerk_prob" => self.jerk_prob = p(key, value)?,
            "context_dim" => self.context_dim = p(key, value)?,
            "f_base" => self.f_base = p(key, value)?,
            "p_base" => self.p_base = p(key, value)?,
            "beta" => self.beta = p(key, value)?,
            "kfc" => self.kfc = p(key, value)?,
            "f_schedule" => {
                self.f_schedule = match value {
                    "linear" => FreqScheduleKind::Linear,
                    "cosine" => FreqScheduleKind::Cosine,
                    other => return Err(usage(format!("unknown f_schedule: {other}"))),
                }
            }
            "omega_schedule" => {
                self.omega_schedule = match value {
                    "linear" => OmegaScheduleKind::Linear,
                    "cosine" => OmegaScheduleKind::Cosine,
                    "constant" => OmegaScheduleKind::Constant(self.omega_const),
                    other => return Err(usage(format!("unknown omega_schedule: {other}"))),
                }
            }
            "omega_const" => {
                self.omega_const = p(key, value)?;
                if matches!(self.omega_schedule, OmegaScheduleKind::Constant(_)) {
                    self.omega_schedule = OmegaScheduleKind::Constant(self.omega_const);
                }
            }
            "K_train" => self.k_train = p(key, value)?,
            "K_infer" => self.k_infer = p(key, value)?,
            "schedule_kind" => {
                self.schedule_kind =
                    value.parse().map_err(|_| usage(format!("unknown schedule_kind: {value}")))?
            }
            "hidden" => self.hidden = p(key, value)?,
            "depth" => self.depth = p(key, value)?,
            "embed_dim" => self.embed_dim = p(key, value)?,
            "epochs" => self.epochs = p(key, value)?,
            "batch_size" => self.batch_size = p(key, value)?,
            "learning_rate" => self.learning_rate = p(key, value)?,
            "checkpoint_every" => self.checkpoint_every = p(key, value)?,
            "count" => self.count = p(key, value)?,
            "oracle_mean" => self.oracle_mean = p(key, value)?,
            "oracle_std" => self.oracle_std = p(key, value)?,
            "oracle_band" => self.oracle_band = p(key, value)?,
            "horizon" => self.horizon = p(key, value)?,
            "execute_m" => self.execute_m = p(key, value)?,
            "smoother" => self.smoother = value.to_string(),
            "smoother_f" => self.smoother_f = p(key, value)?,
            "ensemble_decay" => self.ensemble_decay = p(key, value)?,
            "episodes" => self.episodes = p(key, value)?,
            "approach_window" => self.approach_window = p(key, value)?,
            "dt" => self.dt = p(key, value)?,
            "seed" => self.seed = p(key, value)?,
            other => return Err(usage(format!("unknown config key: {other}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.demo_spec().validate().map_err(|e| usage(e.to_string()))?;
        self.fgo_config().map_err(|e| usage(e.to_string()))?.validate().map_err(|e| usage(e.to_string()))?;
        self.train_config().validate().map_err(|e| usage(e.to_string()))?;
        if self.k_train == 0 || self.k_infer == 0 {
            return Err(usage("diffusion step counts must be positive"));
        }
        if !matches!(self.smoother.as_str(), "none" | "lowpass" | "ensemble") {
            return Err(usage(format!("unknown smoother: {}", self.smoother)));
        }
        Ok(())
    }

    pub fn demo_spec(&self) -> DemoSpec {
        DemoSpec {
            n_demos: self.n_demos,
            chunk_len: self.chunk_len,
            dims: self.dims,
            f_clean: self.f_clean,
            jitter_std: self.jitter_std,
            pause_prob: self.pause_prob,
            jerk_prob: self.jerk_prob,
            context_dim: self.context_dim,
            seed: self.seed,
        }
    }

    pub fn fgo_config(&self) -> fgo_core::Result<FgoConfig> {
        let mut cfg = FgoConfig::new(self.f_base, self.p_base, self.beta, self.chunk_len)?;
        cfg.kfc_enabled = self.kfc && self.beta > 0.0;
        cfg.f_schedule = self.f_schedule;
        cfg.omega_schedule = self.omega_schedule;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            batch_size: self.batch_size,
            learning_rate: self.learning_rate,
            seed: self.seed,
            checkpoint_every: self.checkpoint_every,
            ..TrainConfig::default()
        }
    }

    pub fn mlp_config(&self) -> MlpConfig {
        MlpConfig {
            chunk_len: self.chunk_len,
            dims: self.dims,
            context_dim: self.context_dim,
            hidden_width: self.hidden,
            hidden_layers: self.depth,
            embed_dim: self.embed_dim,
        }
    }
}
