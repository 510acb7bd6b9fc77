//! Dense noise-prediction trunk over the flattened chunk, with sinusoidal
//! step/cut-off encodings concatenated to the context vector. Gradients are
//! exact reverse accumulation; the whole parameter vector is flat so the
//! optimizer and finite-difference checks can treat it uniformly.

use rand::Rng;

use super::{embed_scalar, Denoiser, DenoiserInput};
use crate::chunk::ActionChunk;
use crate::container::{Container, Tensor};
use crate::error::{FgoError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MlpConfig {
    pub chunk_len: usize,
    pub dims: usize,
    pub context_dim: usize,
    pub hidden_width: usize,
    /// Number of hidden (activated) layers; a final linear layer follows.
    pub hidden_layers: usize,
    /// Sinusoidal embedding width used for both the step and the cut-off.
    pub embed_dim: usize,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self {
            chunk_len: 16,
            dims: 2,
            context_dim: 4,
            hidden_width: 64,
            hidden_layers: 3,
            embed_dim: 16,
        }
    }
}

impl MlpConfig {
    pub fn input_dim(&self) -> usize {
        self.chunk_len * self.dims + 2 * self.embed_dim + self.context_dim
    }

    pub fn output_dim(&self) -> usize {
        self.chunk_len * self.dims
    }

    fn validate(&self) -> Result<()> {
        if self.chunk_len == 0 || self.dims == 0 || self.hidden_width == 0 {
            return Err(FgoError::Config("mlp sizes must be positive".into()));
        }
        if self.hidden_layers == 0 {
            return Err(FgoError::Config("mlp needs at least one hidden layer".into()));
        }
        if self.embed_dim == 0 || !self.embed_dim.is_multiple_of(2) {
            return Err(FgoError::Config("embed_dim must be even and positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct MlpDenoiser {
    cfg: MlpConfig,
    /// `(out, in)` per dense layer, hidden layers first, linear head last.
    layer_shapes: Vec<(usize, usize)>,
    /// Flat parameters: per layer, row-major weights then biases.
    params: Vec<f64>,
}

const GELU_C: f64 = 0.7978845608028654; // sqrt(2/pi)
const GELU_A: f64 = 0.044715;

fn gelu(x: f64) -> f64 {
    0.5 * x * (1.0 + (GELU_C * (x + GELU_A * x * x * x)).tanh())
}

fn gelu_deriv(x: f64) -> f64 {
    let u = GELU_C * (x + GELU_A * x * x * x);
    let t = u.tanh();
    let sech2 = 1.0 - t * t;
    0.5 * (1.0 + t) + 0.5 * x * sech2 * GELU_C * (1.0 + 3.0 * GELU_A * x * x)
}

impl MlpDenoiser {
    fn layer_shapes(cfg: &MlpConfig) -> Vec<(usize, usize)> {
        let mut shapes = Vec::with_capacity(cfg.hidden_layers + 1);
        shapes.push((cfg.hidden_width, cfg.input_dim()));
        for _ in 1..cfg.hidden_layers {
            shapes.push((cfg.hidden_width, cfg.hidden_width));
        }
        shapes.push((cfg.output_dim(), cfg.hidden_width));
        shapes
    }

    /// All parameters zero; predicts the zero chunk for any input.
    pub fn zeros(cfg: MlpConfig) -> Result<Self> {
        cfg.validate()?;
        let layer_shapes = Self::layer_shapes(&cfg);
        let count: usize = layer_shapes.iter().map(|(o, i)| o * i + o).sum();
        Ok(Self { cfg, layer_shapes, params: vec![0.0; count] })
    }

    /// Gaussian weight init scaled by `1/sqrt(fan_in)`, zero biases.
    pub fn init(cfg: MlpConfig, rng: &mut impl Rng) -> Result<Self> {
        let mut model = Self::zeros(cfg)?;
        let mut offset = 0;
        for (out, inp) in model.layer_shapes.clone() {
            let scale = 1.0 / (inp as f64).sqrt();
            for w in &mut model.params[offset..offset + out * inp] {
                *w = crate::rng::standard_normal(rng) * scale;
            }
            offset += out * inp + out;
        }
        Ok(model)
    }

    pub fn config(&self) -> &MlpConfig {
        &self.cfg
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn check_input(&self, input: &DenoiserInput) -> Result<()> {
        if input.noisy.n_steps() != self.cfg.chunk_len || input.noisy.dims() != self.cfg.dims {
            return Err(FgoError::Shape(format!(
                "input chunk {}x{} does not match model {}x{}",
                input.noisy.n_steps(),
                input.noisy.dims(),
                self.cfg.chunk_len,
                self.cfg.dims
            )));
        }
        if input.context.len() != self.cfg.context_dim {
            return Err(FgoError::Shape(format!(
                "context length {} does not match model {}",
                input.context.len(),
                self.cfg.context_dim
            )));
        }
        if input.cutoff > self.cfg.chunk_len {
            return Err(FgoError::CutoffOutOfRange {
                cutoff: input.cutoff,
                max: self.cfg.chunk_len,
            });
        }
        if input.step == 0 {
            return Err(FgoError::StepOutOfRange { step: 0, min: 1, max: usize::MAX });
        }
        if !input.noisy.is_finite() || input.context.iter().any(|v| !v.is_finite()) {
            return Err(FgoError::NonFinite("denoiser input".into()));
        }
        Ok(())
    }

    fn build_input(&self, input: &DenoiserInput) -> Result<Vec<f64>> {
        self.check_input(input)?;
        let mut vec = Vec::with_capacity(self.cfg.input_dim());
        vec.extend_from_slice(input.noisy.as_slice());
        vec.extend(embed_scalar(input.step as f64, self.cfg.embed_dim)?);
        vec.extend(embed_scalar(input.cutoff as f64, self.cfg.embed_dim)?);
        vec.extend_from_slice(input.context);
        Ok(vec)
    }

    /// Forward pass caching pre-activations and activations per layer.
    fn forward_cached(&self, input: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let n_layers = self.layer_shapes.len();
        let mut pre = Vec::with_capacity(n_layers);
        let mut act = Vec::with_capacity(n_layers + 1);
        act.push(input.to_vec());
        let mut offset = 0;
        for (l, &(out, inp)) in self.layer_shapes.iter().enumerate() {
            let w = &self.params[offset..offset + out * inp];
            let b = &self.params[offset + out * inp..offset + out * inp + out];
            offset += out * inp + out;
            let prev = &act[l];
            let mut z = vec![0.0; out];
            for o in 0..out {
                let row = &w[o * inp..(o + 1) * inp];
                z[o] = b[o] + row.iter().zip(prev).map(|(wv, av)| wv * av).sum::<f64>();
            }
            let a = if l + 1 == n_layers {
                z.clone()
            } else {
                z.iter().map(|&v| gelu(v)).collect()
            };
            pre.push(z);
            act.push(a);
        }
        (pre, act)
    }

    /// Mean squared error over the batch plus exact gradients, flat like
    /// [`Self::params`].
    pub fn loss_and_grad(
        &self,
        batch: &[(DenoiserInput, &ActionChunk)],
    ) -> Result<(f64, Vec<f64>)> {
        if batch.is_empty() {
            return Err(FgoError::Empty("loss_and_grad batch".into()));
        }
        let out_dim = self.cfg.output_dim();
        for (input, target) in batch {
            if target.n_steps() != self.cfg.chunk_len || target.dims() != self.cfg.dims {
                return Err(FgoError::Shape("target shape does not match model".into()));
            }
            self.check_input(input)?;
        }
        let norm = 1.0 / (batch.len() * out_dim) as f64;
        let n_layers = self.layer_shapes.len();
        let mut grads = vec![0.0; self.params.len()];
        let mut loss = 0.0;

        // Per-layer parameter offsets, computed once.
        let mut offsets = Vec::with_capacity(n_layers);
        let mut off = 0;
        for &(out, inp) in &self.layer_shapes {
            offsets.push(off);
            off += out * inp + out;
        }

        for (input, target) in batch {
            let x = self.build_input(input)?;
            let (pre, act) = self.forward_cached(&x);
            let output = &act[n_layers];

            let mut delta: Vec<f64> = output
                .iter()
                .zip(target.as_slice())
                .map(|(o, t)| {
                    let err = o - t;
                    loss += err * err * norm;
                    2.0 * err * norm
                })
                .collect();

            for l in (0..n_layers).rev() {
                let (out, inp) = self.layer_shapes[l];
                let base = offsets[l];
                // Hidden layers carry the activation derivative.
                if l + 1 != n_layers {
                    for (d, z) in delta.iter_mut().zip(&pre[l]) {
                        *d *= gelu_deriv(*z);
                    }
                }
                let prev = &act[l];
                for o in 0..out {
                    let d = delta[o];
                    if d != 0.0 {
                        let grad_row = &mut grads[base + o * inp..base + (o + 1) * inp];
                        for (g, a) in grad_row.iter_mut().zip(prev) {
                            *g += d * a;
                        }
                    }
                    grads[base + out * inp + o] += d;
                }
                if l > 0 {
                    let w = &self.params[base..base + out * inp];
                    let mut next = vec![0.0; inp];
                    for o in 0..out {
                        let d = delta[o];
                        if d != 0.0 {
                            for (nv, wv) in next.iter_mut().zip(&w[o * inp..(o + 1) * inp]) {
                                *nv += d * wv;
                            }
                        }
                    }
                    delta = next;
                }
            }
        }
        Ok((loss, grads))
    }

    /// Serializes config and parameters into the tensor container.
    pub fn to_container(&self) -> Container {
        let mut c = Container::new();
        c.insert(
            "meta.config",
            Tensor::new(
                vec![6],
                vec![
                    self.cfg.chunk_len as f64,
                    self.cfg.dims as f64,
                    self.cfg.context_dim as f64,
                    self.cfg.hidden_width as f64,
                    self.cfg.hidden_layers as f64,
                    self.cfg.embed_dim as f64,
                ],
            )
            .expect("meta tensor"),
        );
        let mut offset = 0;
        for (l, &(out, inp)) in self.layer_shapes.iter().enumerate() {
            let w = self.params[offset..offset + out * inp].to_vec();
            let b = self.params[offset + out * inp..offset + out * inp + out].to_vec();
            offset += out * inp + out;
            c.insert(&format!("layer{l}.weight"), Tensor::new(vec![out, inp], w).unwrap());
            c.insert(&format!("layer{l}.bias"), Tensor::new(vec![out], b).unwrap());
        }
        c
    }

    pub fn from_container(c: &Container) -> Result<Self> {
        let meta = c.get("meta.config")?;
        if meta.data.len() != 6 {
            return Err(FgoError::Container("meta.config must have 6 entries".into()));
        }
        let cfg = MlpConfig {
            chunk_len: meta.data[0] as usize,
            dims: meta.data[1] as usize,
            context_dim: meta.data[2] as usize,
            hidden_width: meta.data[3] as usize,
            hidden_layers: meta.data[4] as usize,
            embed_dim: meta.data[5] as usize,
        };
        let mut model = Self::zeros(cfg)?;
        let mut offset = 0;
        for (l, &(out, inp)) in model.layer_shapes.clone().iter().enumerate() {
            let w = c.get(&format!("layer{l}.weight"))?;
            let b = c.get(&format!("layer{l}.bias"))?;
            if w.shape != vec![out, inp] || b.shape != vec![out] {
                return Err(FgoError::Container(format!("layer {l} shape mismatch")));
            }
            if w.data.iter().chain(&b.data).any(|v| !v.is_finite()) {
                return Err(FgoError::NonFinite(format!("layer {l} parameters")));
            }
            model.params[offset..offset + out * inp].copy_from_slice(&w.data);
            model.params[offset + out * inp..offset + out * inp + out].copy_from_slice(&b.data);
            offset += out * inp + out;
        }
        Ok(model)
    }
}

impl Denoiser for MlpDenoiser {
    fn predict(&self, input: &DenoiserInput) -> Result<ActionChunk> {
        let x = self.build_input(input)?;
        let (_, act) = self.forward_cached(&x);
        ActionChunk::new(act.last().unwrap().clone(), self.cfg.chunk_len, self.cfg.dims)
    }

    fn chunk_len(&self) -> usize {
        self.cfg.chunk_len
    }

    fn dims(&self) -> usize {
        self.cfg.dims
    }

    fn context_dim(&self) -> usize {
        self.cfg.context_dim
    }
}
