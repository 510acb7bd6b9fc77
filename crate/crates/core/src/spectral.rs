//! DCT-II/III transform pair, low/high-pass projectors at integer cut-off
//! frequencies, and single-level Haar decomposition.
//!
//! The transform pair is the non-orthonormal one: the forward transform has
//! no scaling and the inverse carries the `1/N` and factor-2 terms, so
//! filter outputs match the defining formulas directly. Energy bookkeeping
//! uses the orthonormal rescaling (see [`orthonormal_coeffs`]).

use crate::chunk::ActionChunk;
use crate::error::{FgoError, Result};

/// DCT coefficients of an action chunk. Row `i` is frequency index `i`,
/// column `d` is the action dimension; same shape as the source chunk.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    coeffs: Vec<f64>,
    n_steps: usize,
    dims: usize,
}

impl Spectrum {
    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    #[inline]
    pub fn get(&self, freq: usize, dim: usize) -> f64 {
        self.coeffs[freq * self.dims + dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }
}

/// Single-level orthonormal Haar split of an even-length chunk.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarPair {
    pub approx: ActionChunk,
    pub detail: ActionChunk,
}

#[inline]
fn dct_angle(n_steps: usize, n: usize, i: usize) -> f64 {
    std::f64::consts::PI / n_steps as f64 * (n as f64 + 0.5) * i as f64
}

/// Forward DCT-II per column: `C_i = sum_n a_n cos[(pi/N)(n+1/2)i]`.
pub fn dct_forward(chunk: &ActionChunk) -> Spectrum {
    let n_steps = chunk.n_steps();
    let dims = chunk.dims();
    let mut coeffs = vec![0.0; n_steps * dims];
    for i in 0..n_steps {
        for n in 0..n_steps {
            let basis = dct_angle(n_steps, n, i).cos();
            for d in 0..dims {
                coeffs[i * dims + d] += chunk.get(n, d) * basis;
            }
        }
    }
    Spectrum { coeffs, n_steps, dims }
}

/// Inverse transform keeping only the first `cutoff` coefficients:
/// `a_n = (1/N)(C_0 + 2 sum_{i=1}^{cutoff-1} C_i cos[(pi/N)(n+1/2)i])`.
///
/// `cutoff = 0` yields the all-zero chunk (empty retained band).
pub fn dct_inverse(spectrum: &Spectrum, cutoff: usize) -> Result<ActionChunk> {
    let n_steps = spectrum.n_steps();
    let dims = spectrum.dims();
    check_cutoff(cutoff, n_steps)?;
    let mut out = ActionChunk::zeros(n_steps, dims);
    if cutoff == 0 {
        return Ok(out);
    }
    let inv_n = 1.0 / n_steps as f64;
    for n in 0..n_steps {
        for d in 0..dims {
            let mut acc = spectrum.get(0, d);
            for i in 1..cutoff {
                acc += 2.0 * spectrum.get(i, d) * dct_angle(n_steps, n, i).cos();
            }
            out.set(n, d, acc * inv_n);
        }
    }
    Ok(out)
}

fn check_cutoff(cutoff: usize, n_steps: usize) -> Result<()> {
    if cutoff > n_steps {
        return Err(FgoError::CutoffOutOfRange { cutoff, max: n_steps });
    }
    Ok(())
}

/// Low-pass projector `L_f`: reconstruction from the first `cutoff` DCT modes.
///
/// `cutoff = N` returns the chunk unchanged and `cutoff = 0` returns zeros,
/// both without running the transform, so the boundary filters are exact
/// identities rather than 1e-9-accurate ones.
pub fn low_pass(chunk: &ActionChunk, cutoff: usize) -> Result<ActionChunk> {
    check_cutoff(cutoff, chunk.n_steps())?;
    if cutoff == chunk.n_steps() {
        return Ok(chunk.clone());
    }
    if cutoff == 0 {
        return Ok(ActionChunk::zeros(chunk.n_steps(), chunk.dims()));
    }
    dct_inverse(&dct_forward(chunk), cutoff)
}

/// Complementary high-pass filter `H_f = I - L_f`.
pub fn high_pass(chunk: &ActionChunk, cutoff: usize) -> Result<ActionChunk> {
    Ok(chunk.sub(&low_pass(chunk, cutoff)?))
}

/// Squared Frobenius norms of the low- and high-pass images.
pub fn band_energy(chunk: &ActionChunk, cutoff: usize) -> Result<(f64, f64)> {
    let low = low_pass(chunk, cutoff)?;
    let high = chunk.sub(&low);
    Ok((low.norm_sq(), high.norm_sq()))
}

/// Orthonormally rescaled DCT coefficients: `sqrt(1/N) C_0`, `sqrt(2/N) C_i`
/// for `i >= 1`. Under this scaling the coefficient energy equals the
/// time-domain energy, which is what the energy-partition checks assert.
pub fn orthonormal_coeffs(chunk: &ActionChunk) -> Spectrum {
    let spec = dct_forward(chunk);
    let n_steps = spec.n_steps;
    let dims = spec.dims;
    let c0 = (1.0 / n_steps as f64).sqrt();
    let ci = (2.0 / n_steps as f64).sqrt();
    let coeffs = spec
        .coeffs
        .iter()
        .enumerate()
        .map(|(flat, v)| if flat / dims == 0 { v * c0 } else { v * ci })
        .collect();
    Spectrum { coeffs, n_steps, dims }
}

/// The `i`-th orthonormal DCT basis vector of length `n_steps`.
/// These are the columns of the synthesis operator: a chunk column equals
/// `sum_i g_i w_i` where `g` are the orthonormal coefficients.
pub fn orthonormal_basis_vector(n_steps: usize, i: usize) -> Vec<f64> {
    assert!(i < n_steps, "mode index out of range");
    let scale = if i == 0 {
        (1.0 / n_steps as f64).sqrt()
    } else {
        (2.0 / n_steps as f64).sqrt()
    };
    (0..n_steps)
        .map(|n| scale * dct_angle(n_steps, n, i).cos())
        .collect()
}

/// Single-level orthonormal Haar split:
/// `approx_m = (a_{2m} + a_{2m+1})/sqrt(2)`, `detail_m = (a_{2m} - a_{2m+1})/sqrt(2)`.
pub fn haar_decompose(chunk: &ActionChunk) -> Result<HaarPair> {
    let n_steps = chunk.n_steps();
    if !n_steps.is_multiple_of(2) {
        return Err(FgoError::Shape(format!(
            "haar decomposition needs even chunk length, got {n_steps}"
        )));
    }
    let dims = chunk.dims();
    let half = n_steps / 2;
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut approx = ActionChunk::zeros(half, dims);
    let mut detail = ActionChunk::zeros(half, dims);
    for m in 0..half {
        for d in 0..dims {
            let a = chunk.get(2 * m, d);
            let b = chunk.get(2 * m + 1, d);
            approx.set(m, d, (a + b) * inv_sqrt2);
            detail.set(m, d, (a - b) * inv_sqrt2);
        }
    }
    Ok(HaarPair { approx, detail })
}

/// Exact inverse of [`haar_decompose`].
pub fn haar_reconstruct(pair: &HaarPair) -> Result<ActionChunk> {
    if !pair.approx.same_shape(&pair.detail) {
        return Err(FgoError::Shape(format!(
            "haar pair shape mismatch: {}x{} vs {}x{}",
            pair.approx.n_steps(),
            pair.approx.dims(),
            pair.detail.n_steps(),
            pair.detail.dims()
        )));
    }
    let half = pair.approx.n_steps();
    let dims = pair.approx.dims();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = ActionChunk::zeros(2 * half, dims);
    for m in 0..half {
        for d in 0..dims {
            let s = pair.approx.get(m, d);
            let t = pair.detail.get(m, d);
            out.set(2 * m, d, (s + t) * inv_sqrt2);
            out.set(2 * m + 1, d, (s - t) * inv_sqrt2);
        }
    }
    Ok(out)
}
