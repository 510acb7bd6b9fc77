//! Closed-form optimal noise predictor for Gaussian chunk laws.
//!
//! When the clean data is `A ~ N(mu, Sigma)` and the noisy state is
//! `x = sqrt(ab) * L_f(A) + sqrt(1-ab) * eps`, the minimum-MSE estimate of
//! `eps` given `x` is available in closed form, which makes the oracle an
//! exact reference point for the samplers: no training, no approximation
//! error beyond the regularized solve.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::Rng;

use super::linalg::{cholesky, cholesky_solve, matmul, matvec};
use super::{Denoiser, DenoiserInput};
use crate::chunk::ActionChunk;
use crate::error::{FgoError, Result};
use crate::schedule::NoiseSchedule;
use crate::spectral::orthonormal_basis_vector;

const SOLVE_REG: f64 = 1e-10;

/// Exact posterior-mean noise predictor for a Gaussian chunk distribution.
///
/// `predict` computes `(x - sqrt(ab_k) m_f(x)) / sqrt(1 - ab_k)` with
/// `m_f(x) = P_f mu + sqrt(ab_k) S_f (ab_k S_f + (1-ab_k) I)^(-1) (x - sqrt(ab_k) P_f mu)`
/// and `S_f = P_f Sigma P_f^T`, the posterior mean of the f-truncated data.
pub struct GaussianOracle {
    mean: Vec<f64>,
    cov: Vec<f64>,
    chunk_len: usize,
    dims: usize,
    context_dim: usize,
    sched: NoiseSchedule,
    /// Per-mode standard deviations when the covariance was constructed
    /// diagonal in DCT space; enables drawing clean chunks.
    dct_stds: Option<Vec<f64>>,
    cache: Mutex<HashMap<(usize, usize), Arc<SolveOp>>>,
}

struct SolveOp {
    proj_mean: Vec<f64>,
    sigma_f: Vec<f64>,
    chol: Vec<f64>,
}

impl GaussianOracle {
    /// General constructor from an explicit flattened mean and covariance.
    /// The covariance must be symmetric; `n = chunk_len * dims`.
    pub fn new(
        mean: &ActionChunk,
        cov: Vec<f64>,
        context_dim: usize,
        sched: NoiseSchedule,
    ) -> Result<Self> {
        let n = mean.n_steps() * mean.dims();
        if cov.len() != n * n {
            return Err(FgoError::Shape(format!(
                "covariance length {} does not match {n}x{n}",
                cov.len()
            )));
        }
        if cov.iter().any(|v| !v.is_finite()) {
            return Err(FgoError::NonFinite("covariance".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if (cov[i * n + j] - cov[j * n + i]).abs() > 1e-12 {
                    return Err(FgoError::Config(format!(
                        "covariance not symmetric at ({i},{j})"
                    )));
                }
            }
            if cov[i * n + i] < 0.0 {
                return Err(FgoError::Config(format!("negative variance at {i}")));
            }
        }
        Ok(Self {
            mean: mean.as_slice().to_vec(),
            cov,
            chunk_len: mean.n_steps(),
            dims: mean.dims(),
            context_dim,
            sched,
            dct_stds: None,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// Covariance diagonal in DCT coefficient space: `mode_stds` is an
    /// `N x D` matrix (row i = frequency, column d = dimension) of standard
    /// deviations for the orthonormal DCT coefficients.
    pub fn from_dct_diagonal(
        mean: &ActionChunk,
        mode_stds: &ActionChunk,
        context_dim: usize,
        sched: NoiseSchedule,
    ) -> Result<Self> {
        if !mean.same_shape(mode_stds) {
            return Err(FgoError::Shape("mode_stds shape must match mean".into()));
        }
        let n_steps = mean.n_steps();
        let dims = mean.dims();
        let n = n_steps * dims;
        let mut cov = vec![0.0; n * n];
        for i in 0..n_steps {
            let w = orthonormal_basis_vector(n_steps, i);
            for d in 0..dims {
                let var = mode_stds.get(i, d).powi(2);
                if var == 0.0 {
                    continue;
                }
                for n1 in 0..n_steps {
                    for n2 in 0..n_steps {
                        cov[(n1 * dims + d) * n + (n2 * dims + d)] += var * w[n1] * w[n2];
                    }
                }
            }
        }
        let mut oracle = Self::new(mean, cov, context_dim, sched)?;
        oracle.dct_stds = Some(mode_stds.as_slice().to_vec());
        Ok(oracle)
    }

    pub fn schedule(&self) -> &NoiseSchedule {
        &self.sched
    }

    pub fn mean_chunk(&self) -> ActionChunk {
        ActionChunk::new(self.mean.clone(), self.chunk_len, self.dims).expect("stored mean")
    }

    /// Draws a clean chunk from the data law. Only available when the
    /// covariance was built via [`Self::from_dct_diagonal`].
    pub fn sample_clean(&self, rng: &mut impl Rng) -> Result<ActionChunk> {
        let stds = self.dct_stds.as_ref().ok_or_else(|| {
            FgoError::Config("sample_clean needs a DCT-diagonal covariance".into())
        })?;
        let mut out = self.mean.clone();
        for i in 0..self.chunk_len {
            let w = orthonormal_basis_vector(self.chunk_len, i);
            for d in 0..self.dims {
                let s = stds[i * self.dims + d];
                if s == 0.0 {
                    continue;
                }
                let g = crate::rng::standard_normal(rng) * s;
                for (n1, wv) in w.iter().enumerate() {
                    out[n1 * self.dims + d] += g * wv;
                }
            }
        }
        ActionChunk::new(out, self.chunk_len, self.dims)
    }

    /// Flattened low-pass projector matrix: per-dimension blocks of
    /// `sum_{i<cutoff} w_i w_i^T`.
    fn projector(&self, cutoff: usize) -> Vec<f64> {
        let n_steps = self.chunk_len;
        let dims = self.dims;
        let n = n_steps * dims;
        let mut proj = vec![0.0; n * n];
        for i in 0..cutoff {
            let w = orthonormal_basis_vector(n_steps, i);
            for n1 in 0..n_steps {
                for n2 in 0..n_steps {
                    let v = w[n1] * w[n2];
                    for d in 0..dims {
                        proj[(n1 * dims + d) * n + (n2 * dims + d)] += v;
                    }
                }
            }
        }
        proj
    }

    fn solve_op(&self, step: usize, cutoff: usize) -> Result<Arc<SolveOp>> {
        if let Some(op) = self.cache.lock().unwrap().get(&(step, cutoff)) {
            return Ok(op.clone());
        }
        let n = self.chunk_len * self.dims;
        let bar = self.sched.alpha_bar(step);
        let proj = self.projector(cutoff);
        let proj_mean = matvec(&proj, &self.mean, n, n);
        // S_f = P Sigma P^T; P is symmetric, so P^T = P.
        let tmp = matmul(&proj, &self.cov, n, n, n);
        let sigma_f = matmul(&tmp, &proj, n, n, n);
        let mut system = sigma_f.iter().map(|v| v * bar).collect::<Vec<f64>>();
        for i in 0..n {
            system[i * n + i] += 1.0 - bar + SOLVE_REG;
        }
        let chol = cholesky(&system, n).ok_or_else(|| {
            FgoError::Config(format!("singular oracle solve at step {step}, cutoff {cutoff}"))
        })?;
        let op = Arc::new(SolveOp { proj_mean, sigma_f, chol });
        self.cache.lock().unwrap().insert((step, cutoff), op.clone());
        Ok(op)
    }

    fn check_input(&self, input: &DenoiserInput) -> Result<()> {
        if input.noisy.n_steps() != self.chunk_len || input.noisy.dims() != self.dims {
            return Err(FgoError::Shape(format!(
                "input chunk {}x{} does not match oracle {}x{}",
                input.noisy.n_steps(),
                input.noisy.dims(),
                self.chunk_len,
                self.dims
            )));
        }
        if input.step < 1 || input.step > self.sched.n_steps() {
            return Err(FgoError::StepOutOfRange {
                step: input.step,
                min: 1,
                max: self.sched.n_steps(),
            });
        }
        if input.cutoff > self.chunk_len {
            return Err(FgoError::CutoffOutOfRange { cutoff: input.cutoff, max: self.chunk_len });
        }
        if !input.noisy.is_finite() {
            return Err(FgoError::NonFinite("oracle input".into()));
        }
        Ok(())
    }
}

impl Denoiser for GaussianOracle {
    fn predict(&self, input: &DenoiserInput) -> Result<ActionChunk> {
        self.check_input(input)?;
        let n = self.chunk_len * self.dims;
        let bar = self.sched.alpha_bar(input.step);
        let sqrt_bar = bar.sqrt();
        let op = self.solve_op(input.step, input.cutoff)?;
        let x = input.noisy.as_slice();

        let residual: Vec<f64> =
            x.iter().zip(&op.proj_mean).map(|(xv, mv)| xv - sqrt_bar * mv).collect();
        let sol = cholesky_solve(&op.chol, &residual, n);
        let correction = matvec(&op.sigma_f, &sol, n, n);
        let denom = (1.0 - bar).sqrt();
        let eps: Vec<f64> = (0..n)
            .map(|i| {
                let m = op.proj_mean[i] + sqrt_bar * correction[i];
                (x[i] - sqrt_bar * m) / denom
            })
            .collect();
        ActionChunk::new(eps, self.chunk_len, self.dims)
    }

    fn chunk_len(&self) -> usize {
        self.chunk_len
    }

    fn dims(&self) -> usize {
        self.dims
    }

    fn context_dim(&self) -> usize {
        self.context_dim
    }
}
