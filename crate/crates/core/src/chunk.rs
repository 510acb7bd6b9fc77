//! Action chunks: fixed-length windows of consecutive actions, stored as
//! time-major `n_steps x dims` matrices of `f64`.

use crate::error::{FgoError, Result};

/// An `N x D` action chunk. Row `n` holds the action vector at time step `n`.
///
/// Storage is row-major: entry `(n, d)` lives at `data[n * dims + d]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionChunk {
    data: Vec<f64>,
    n_steps: usize,
    dims: usize,
}

impl ActionChunk {
    /// Builds a chunk from row-major data, checking shape and finiteness.
    pub fn new(data: Vec<f64>, n_steps: usize, dims: usize) -> Result<Self> {
        if n_steps == 0 || dims == 0 {
            return Err(FgoError::Shape(format!(
                "chunk must have n_steps >= 1 and dims >= 1, got {n_steps}x{dims}"
            )));
        }
        if data.len() != n_steps * dims {
            return Err(FgoError::Shape(format!(
                "data length {} does not match {n_steps}x{dims}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().position(|v| !v.is_finite()) {
            return Err(FgoError::NonFinite(format!(
                "chunk entry at flat index {bad} is {}",
                data[bad]
            )));
        }
        Ok(Self { data, n_steps, dims })
    }

    pub fn zeros(n_steps: usize, dims: usize) -> Self {
        assert!(n_steps >= 1 && dims >= 1, "zero-sized chunk");
        Self { data: vec![0.0; n_steps * dims], n_steps, dims }
    }

    /// Builds a single-column chunk from a time series.
    pub fn from_column(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec(), values.len(), 1)
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.n_steps == other.n_steps && self.dims == other.dims
    }

    #[inline]
    pub fn get(&self, step: usize, dim: usize) -> f64 {
        self.data[step * self.dims + dim]
    }

    #[inline]
    pub fn set(&mut self, step: usize, dim: usize, value: f64) {
        self.data[step * self.dims + dim] = value;
    }

    /// Row-major flat view (time-major, dimension-minor).
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, step: usize) -> &[f64] {
        &self.data[step * self.dims..(step + 1) * self.dims]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Squared Frobenius norm.
    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            data: self.data.iter().map(|v| v * factor).collect(),
            n_steps: self.n_steps,
            dims: self.dims,
        }
    }

    /// Entry-wise `self + factor * other`. Panics on shape mismatch.
    pub fn axpy(&self, factor: f64, other: &Self) -> Self {
        assert!(self.same_shape(other), "axpy shape mismatch");
        Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + factor * b)
                .collect(),
            n_steps: self.n_steps,
            dims: self.dims,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(-1.0, other)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(1.0, other)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert!(self.same_shape(other), "diff shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
