//! Diffusion noise schedules, reverse-step coefficients, the inference-time
//! cut-off/guidance-weight schedules, and the training-time cut-off sampler
//! with its noise-level-coupled upper bound.

use rand::Rng;

use crate::chunk::ActionChunk;
use crate::error::{FgoError, Result};

/// Per-step diffusion coefficients. Steps are 1-indexed: `alpha(k)` for
/// `k in 1..=n_steps`, with the convention `alpha_bar(0) = 1`.
#[derive(Debug, Clone)]
pub struct NoiseSchedule {
    n_steps: usize,
    alphas: Vec<f64>,
    alpha_bars: Vec<f64>,
    zetas: Vec<f64>,
    gammas: Vec<f64>,
    sigmas: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[derive(Default)]
pub enum ScheduleKind {
    /// Betas linearly spaced on [1e-4, 2e-2].
    LinearBeta,
    /// Alpha-bar follows a (non-squared) cosine curve with the 0.008 offset.
    Cosine,
    /// Alpha-bar follows the squared-cosine curve with the 0.008 offset.
    #[default]
    SquaredCosine,
}


impl std::str::FromStr for ScheduleKind {
    type Err = FgoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear-beta" => Ok(ScheduleKind::LinearBeta),
            "cosine" => Ok(ScheduleKind::Cosine),
            "squared-cosine" => Ok(ScheduleKind::SquaredCosine),
            other => Err(FgoError::Config(format!("unknown schedule kind: {other}"))),
        }
    }
}

const MAX_BETA: f64 = 0.999;
const MIN_BETA: f64 = 1e-8;

/// Builds a schedule with the DDPM posterior variance and a deterministic
/// final step (`sigma_1 = 0`, which the posterior formula yields on its own
/// since `alpha_bar(0) = 1`).
pub fn make_schedule(n_steps: usize, kind: ScheduleKind) -> Result<NoiseSchedule> {
    if n_steps < 1 {
        return Err(FgoError::Config("schedule needs at least one step".into()));
    }
    let betas: Vec<f64> = match kind {
        ScheduleKind::LinearBeta => {
            let (start, end) = (1e-4, 2e-2);
            if n_steps == 1 {
                vec![start]
            } else {
                (0..n_steps)
                    .map(|i| start + (end - start) * i as f64 / (n_steps - 1) as f64)
                    .collect()
            }
        }
        ScheduleKind::Cosine => betas_from_alpha_bar(n_steps, |t| offset_cos(t, n_steps)),
        ScheduleKind::SquaredCosine => {
            betas_from_alpha_bar(n_steps, |t| offset_cos(t, n_steps).powi(2))
        }
    };

    let mut alphas = Vec::with_capacity(n_steps);
    let mut alpha_bars = Vec::with_capacity(n_steps);
    let mut prod = 1.0;
    for beta in &betas {
        let alpha = 1.0 - beta;
        prod *= alpha;
        alphas.push(alpha);
        alpha_bars.push(prod);
    }

    let mut zetas = Vec::with_capacity(n_steps);
    let mut gammas = Vec::with_capacity(n_steps);
    let mut sigmas = Vec::with_capacity(n_steps);
    for k in 1..=n_steps {
        let alpha = alphas[k - 1];
        let bar = alpha_bars[k - 1];
        let bar_prev = if k >= 2 { alpha_bars[k - 2] } else { 1.0 };
        zetas.push(1.0 / alpha.sqrt());
        gammas.push((1.0 - alpha) / (1.0 - bar).sqrt());
        // DDPM posterior variance; zero at k = 1 because alpha_bar(0) = 1.
        sigmas.push(((1.0 - bar_prev) / (1.0 - bar) * (1.0 - alpha)).sqrt());
    }

    Ok(NoiseSchedule { n_steps, alphas, alpha_bars, zetas, gammas, sigmas })
}

/// Offset cosine used by the improved-DDPM family: `cos(((t/K + s)/(1+s)) * pi/2)`.
fn offset_cos(t: usize, n_steps: usize) -> f64 {
    let s = 0.008;
    ((t as f64 / n_steps as f64 + s) / (1.0 + s) * std::f64::consts::FRAC_PI_2).cos()
}

/// Converts an alpha-bar curve into per-step betas, clipping each beta into
/// `[MIN_BETA, MAX_BETA]` so every alpha stays in (0, 1).
fn betas_from_alpha_bar(n_steps: usize, curve: impl Fn(usize) -> f64) -> Vec<f64> {
    let g0 = curve(0);
    let mut prev = 1.0;
    (1..=n_steps)
        .map(|k| {
            let cur = curve(k) / g0;
            let beta = (1.0 - cur / prev).clamp(MIN_BETA, MAX_BETA);
            prev = cur;
            beta
        })
        .collect()
}

impl NoiseSchedule {
    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    fn check_step(&self, k: usize) -> Result<()> {
        if k < 1 || k > self.n_steps {
            return Err(FgoError::StepOutOfRange { step: k, min: 1, max: self.n_steps });
        }
        Ok(())
    }

    pub fn alpha(&self, k: usize) -> f64 {
        self.check_step(k).expect("step out of range");
        self.alphas[k - 1]
    }

    /// `alpha_bar(k)` with `alpha_bar(0) = 1` (the no-noise convention).
    pub fn alpha_bar(&self, k: usize) -> f64 {
        if k == 0 {
            return 1.0;
        }
        self.check_step(k).expect("step out of range");
        self.alpha_bars[k - 1]
    }

    pub fn zeta(&self, k: usize) -> f64 {
        self.check_step(k).expect("step out of range");
        self.zetas[k - 1]
    }

    pub fn gamma(&self, k: usize) -> f64 {
        self.check_step(k).expect("step out of range");
        self.gammas[k - 1]
    }

    pub fn sigma(&self, k: usize) -> f64 {
        self.check_step(k).expect("step out of range");
        self.sigmas[k - 1]
    }
}

/// Guidance hyperparameters for multi-band training and progressive sampling.
#[derive(Debug, Clone)]
pub struct FgoConfig {
    pub f_base: usize,
    pub p_base: f64,
    pub beta: f64,
    pub chunk_len: usize,
    pub f_schedule: FreqScheduleKind,
    pub omega_schedule: OmegaScheduleKind,
    pub kfc_enabled: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreqScheduleKind {
    Linear,
    Cosine,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OmegaScheduleKind {
    Linear,
    Cosine,
    Constant(f64),
}

impl FgoConfig {
    pub fn new(f_base: usize, p_base: f64, beta: f64, chunk_len: usize) -> Result<Self> {
        let cfg = Self {
            f_base,
            p_base,
            beta,
            chunk_len,
            f_schedule: FreqScheduleKind::Linear,
            omega_schedule: OmegaScheduleKind::Linear,
            kfc_enabled: beta > 0.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.f_base > self.chunk_len {
            return Err(FgoError::Config(format!(
                "f_base {} exceeds chunk length {}",
                self.f_base, self.chunk_len
            )));
        }
        if !(0.0..=1.0).contains(&self.p_base) {
            return Err(FgoError::Config(format!("p_base {} not in [0,1]", self.p_base)));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(FgoError::Config(format!("beta {} not in [0,1]", self.beta)));
        }
        if let OmegaScheduleKind::Constant(w) = self.omega_schedule {
            if w < 0.0 {
                return Err(FgoError::Config(format!("constant omega {w} must be >= 0")));
            }
        }
        Ok(())
    }
}

/// Forward diffusion: `sqrt(alpha_bar_k) * chunk + sqrt(1 - alpha_bar_k) * eps`.
/// `k = 0` is the no-noise convention and returns the chunk unchanged.
pub fn forward_diffuse(
    chunk: &ActionChunk,
    k: usize,
    eps: &ActionChunk,
    sched: &NoiseSchedule,
) -> Result<ActionChunk> {
    if !chunk.same_shape(eps) {
        return Err(FgoError::Shape(format!(
            "noise shape {}x{} does not match chunk {}x{}",
            eps.n_steps(),
            eps.dims(),
            chunk.n_steps(),
            chunk.dims()
        )));
    }
    if k == 0 {
        return Ok(chunk.clone());
    }
    sched.check_step(k)?;
    let bar = sched.alpha_bar(k);
    Ok(chunk.scale(bar.sqrt()).axpy((1.0 - bar).sqrt(), eps))
}

/// Progress ratio in [0, 1]: 0 at `k = K` (pure noise), 1 at `k = 0`.
fn progress(k: usize, n_steps: usize) -> f64 {
    1.0 - k as f64 / n_steps as f64
}

fn scheduled_progress(k: usize, n_steps: usize, kind: FreqScheduleKind) -> f64 {
    let p = progress(k, n_steps);
    match kind {
        FreqScheduleKind::Linear => p,
        FreqScheduleKind::Cosine => (1.0 - (std::f64::consts::PI * p).cos()) / 2.0,
    }
}

/// Inference-time cut-off schedule: `f_base` at `k = K` expanding to `N` at
/// `k = 0`, rounded half-to-even.
pub fn f_k_schedule(
    k: usize,
    n_steps: usize,
    f_base: usize,
    chunk_len: usize,
    kind: FreqScheduleKind,
) -> usize {
    let p = scheduled_progress(k, n_steps, kind);
    let value = f_base as f64 + (chunk_len - f_base) as f64 * p;
    value.round_ties_even() as usize
}

/// Inference-time guidance weight: 0 at `k = K`, 1 at `k = 0` for the
/// time-varying kinds.
pub fn omega_k_schedule(k: usize, n_steps: usize, kind: OmegaScheduleKind) -> f64 {
    match kind {
        OmegaScheduleKind::Linear => progress(k, n_steps),
        OmegaScheduleKind::Cosine => {
            (1.0 - (std::f64::consts::PI * progress(k, n_steps)).cos()) / 2.0
        }
        OmegaScheduleKind::Constant(w) => w,
    }
}

/// Training-time upper bound for the cut-off draw, shrinking with the noise
/// level: `round(f_base + (N - f_base) * (1 - k/K)^beta)`.
///
/// `beta = 0` keeps the bound at `N` for every step (`0^0` taken as 1), which
/// disables the coupling.
pub fn kfc_f_max(
    k: usize,
    n_steps: usize,
    f_base: usize,
    chunk_len: usize,
    beta: f64,
) -> Result<usize> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(FgoError::Config(format!("beta {beta} not in [0,1]")));
    }
    let p = progress(k, n_steps);
    // f64::powf(0, 0) is 1, which is exactly the convention needed here.
    let value = f_base as f64 + (chunk_len - f_base) as f64 * p.powf(beta);
    Ok(value.round_ties_even() as usize)
}

/// Draws the training cut-off: `f_base` with probability `p_base`, otherwise
/// uniform on `{f_base, ..., f_max}` (inclusive), where `f_max` shrinks with
/// `k` when the k-f coupling is enabled.
///
/// Degenerate draws are skipped rather than consumed: `p_base >= 1` uses no
/// randomness at all, `p_base <= 0` skips the Bernoulli, and a single-point
/// support skips the uniform. This keeps the rng stream of the degenerate
/// configurations identical to a loop that never sampled cut-offs.
pub fn sample_cutoff(
    rng: &mut impl Rng,
    k: usize,
    cfg: &FgoConfig,
    n_steps: usize,
) -> Result<usize> {
    cfg.validate()?;
    if cfg.p_base >= 1.0 {
        return Ok(cfg.f_base);
    }
    if cfg.p_base > 0.0 && rng.random::<f64>() < cfg.p_base {
        return Ok(cfg.f_base);
    }
    let f_max = if cfg.kfc_enabled {
        kfc_f_max(k, n_steps, cfg.f_base, cfg.chunk_len, cfg.beta)?
    } else {
        cfg.chunk_len
    };
    assert!(f_max >= cfg.f_base, "cut-off upper bound below f_base");
    if f_max == cfg.f_base {
        return Ok(cfg.f_base);
    }
    Ok(rng.random_range(cfg.f_base..=f_max))
}
