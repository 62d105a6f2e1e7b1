//! Dense feed-forward networks: tanh hidden layers, identity output.
//!
//! Weights are row-major `(out_dim, in_dim)` per layer. All arithmetic is
//! `f64`. Forward caching plus hand-rolled reverse mode keeps the whole
//! gradient path auditable against finite differences.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    layer_dims: Vec<usize>,
    /// Row-major weight matrix per layer, shape (dims[i+1], dims[i]).
    weights: Vec<Vec<f64>>,
    /// Bias vector per layer, length dims[i+1].
    biases: Vec<Vec<f64>>,
}

/// Per-layer post-activation values from a cached forward pass.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    /// activations[0] is the input; activations[L] is the network output.
    pub activations: Vec<Vec<f64>>,
}

impl ForwardTrace {
    pub fn output(&self) -> &[f64] {
        self.activations.last().expect("trace has layers")
    }
}

/// Parameter gradients mirroring an [`Mlp`]'s weight and bias shapes.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub d_weights: Vec<Vec<f64>>,
    pub d_biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(net: &Mlp) -> Self {
        Self {
            d_weights: net.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            d_biases: net.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    pub fn fill_zero(&mut self) {
        for w in &mut self.d_weights {
            w.fill(0.0);
        }
        for b in &mut self.d_biases {
            b.fill(0.0);
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for w in &mut self.d_weights {
            for v in w.iter_mut() {
                *v *= factor;
            }
        }
        for b in &mut self.d_biases {
            for v in b.iter_mut() {
                *v *= factor;
            }
        }
    }

    /// Elementwise `self += other * factor`.
    pub fn add_scaled(&mut self, other: &Gradients, factor: f64) {
        for (dst, src) in self.d_weights.iter_mut().zip(&other.d_weights) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += s * factor;
            }
        }
        for (dst, src) in self.d_biases.iter_mut().zip(&other.d_biases) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += s * factor;
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.d_weights
            .iter()
            .zip(&self.d_biases)
            .flat_map(|(w, b)| w.iter().chain(b.iter()))
    }
}

impl Mlp {
    /// Builds a network with Gaussian weights scaled by `1/sqrt(fan_in)`.
    ///
    /// `final_scale` multiplies the last layer's weights; policies pass a
    /// small value (see [`Mlp::new_policy`]) so initial action distributions
    /// are near uniform.
    pub fn new(layer_dims: &[usize], final_scale: f64, rng: &mut ChaCha8Rng) -> Result<Self> {
        if layer_dims.len() < 2 || layer_dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidConfig(format!(
                "layer_dims must have >= 2 positive entries, got {layer_dims:?}"
            )));
        }
        let mut weights = Vec::with_capacity(layer_dims.len() - 1);
        let mut biases = Vec::with_capacity(layer_dims.len() - 1);
        for (i, pair) in layer_dims.windows(2).enumerate() {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let last = i == layer_dims.len() - 2;
            let scale = (1.0 / fan_in as f64).sqrt() * if last { final_scale } else { 1.0 };
            let w: Vec<f64> = (0..fan_in * fan_out)
                .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
                .collect();
            weights.push(w);
            biases.push(vec![0.0; fan_out]);
        }
        Ok(Self {
            layer_dims: layer_dims.to_vec(),
            weights,
            biases,
        })
    }

    /// Value-net style initialization (unit final scale).
    pub fn new_value(layer_dims: &[usize], rng: &mut ChaCha8Rng) -> Result<Self> {
        Self::new(layer_dims, 1.0, rng)
    }

    /// Policy-net style initialization: final layer damped so softmax heads
    /// start near uniform.
    pub fn new_policy(layer_dims: &[usize], rng: &mut ChaCha8Rng) -> Result<Self> {
        Self::new(layer_dims, 0.01, rng)
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    pub fn input_dim(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_dims.last().unwrap()
    }

    pub fn num_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn num_params(&self) -> usize {
        self.weights.iter().map(Vec::len).sum::<usize>() + self.biases.iter().map(Vec::len).sum::<usize>()
    }

    /// Flat parameter view: per layer, weights (row-major) then biases.
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend_from_slice(w);
            out.extend_from_slice(b);
        }
        out
    }

    /// Overwrites parameters from the flat layout produced by [`Mlp::params`].
    pub fn set_params(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.num_params() {
            return Err(Error::ShapeMismatch {
                context: "Mlp::set_params",
                expected: self.num_params(),
                got: flat.len(),
            });
        }
        let mut offset = 0;
        for (w, b) in self.weights.iter_mut().zip(&mut self.biases) {
            let wn = w.len();
            w.copy_from_slice(&flat[offset..offset + wn]);
            offset += wn;
            let bn = b.len();
            b.copy_from_slice(&flat[offset..offset + bn]);
            offset += bn;
        }
        Ok(())
    }

    /// Mutable access to one parameter by flat index (finite-difference probes).
    pub fn param_mut(&mut self, mut index: usize) -> Option<&mut f64> {
        for (w, b) in self.weights.iter_mut().zip(&mut self.biases) {
            if index < w.len() {
                return Some(&mut w[index]);
            }
            index -= w.len();
            if index < b.len() {
                return Some(&mut b[index]);
            }
            index -= b.len();
        }
        None
    }

    fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.input_dim() {
            return Err(Error::ShapeMismatch {
                context: "Mlp::forward input",
                expected: self.input_dim(),
                got: input.len(),
            });
        }
        Ok(())
    }

    /// Forward pass. Hidden layers apply tanh; the output layer is linear.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.check_input(input)?;
        let mut current = input.to_vec();
        for (i, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            current = self.layer_forward(i, w, b, &current);
        }
        Ok(current)
    }

    /// Forward pass keeping every layer's activations for backprop.
    pub fn forward_trace(&self, input: &[f64]) -> Result<ForwardTrace> {
        self.check_input(input)?;
        let mut activations = Vec::with_capacity(self.num_layers() + 1);
        activations.push(input.to_vec());
        for (i, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let next = self.layer_forward(i, w, b, activations.last().unwrap());
            activations.push(next);
        }
        Ok(ForwardTrace { activations })
    }

    fn layer_forward(&self, layer: usize, w: &[f64], b: &[f64], input: &[f64]) -> Vec<f64> {
        let in_dim = self.layer_dims[layer];
        let out_dim = self.layer_dims[layer + 1];
        let hidden = layer + 1 < self.num_layers();
        let mut out = Vec::with_capacity(out_dim);
        for o in 0..out_dim {
            let row = &w[o * in_dim..(o + 1) * in_dim];
            let mut sum = b[o];
            for (wi, xi) in row.iter().zip(input) {
                sum += wi * xi;
            }
            out.push(if hidden { sum.tanh() } else { sum });
        }
        out
    }

    /// Accumulates parameter gradients for one sample into `grads`.
    ///
    /// `d_output` is dL/d(output); the trace must come from `forward_trace`
    /// on this network. Returns dL/d(input) in case callers need to chain.
    pub fn backward(
        &self,
        trace: &ForwardTrace,
        d_output: &[f64],
        grads: &mut Gradients,
    ) -> Result<Vec<f64>> {
        if d_output.len() != self.output_dim() {
            return Err(Error::ShapeMismatch {
                context: "Mlp::backward d_output",
                expected: self.output_dim(),
                got: d_output.len(),
            });
        }
        if trace.activations.len() != self.num_layers() + 1
            || trace.activations[0].len() != self.input_dim()
        {
            return Err(Error::ShapeMismatch {
                context: "Mlp::backward trace",
                expected: self.num_layers() + 1,
                got: trace.activations.len(),
            });
        }
        let mut upstream = d_output.to_vec();
        for layer in (0..self.num_layers()).rev() {
            let in_dim = self.layer_dims[layer];
            let out_dim = self.layer_dims[layer + 1];
            let input = &trace.activations[layer];
            let output = &trace.activations[layer + 1];
            let hidden = layer + 1 < self.num_layers();
            let w = &self.weights[layer];
            let dw = &mut grads.d_weights[layer];
            let db = &mut grads.d_biases[layer];
            let mut d_input = vec![0.0; in_dim];
            for o in 0..out_dim {
                // tanh'(z) expressed through the cached post-activation.
                let dz = if hidden {
                    upstream[o] * (1.0 - output[o] * output[o])
                } else {
                    upstream[o]
                };
                db[o] += dz;
                let row = o * in_dim;
                for i in 0..in_dim {
                    dw[row + i] += dz * input[i];
                    d_input[i] += w[row + i] * dz;
                }
            }
            upstream = d_input;
        }
        Ok(upstream)
    }

    /// Batch wrapper: gradient of a scalar loss given per-sample output
    /// gradients, summed over the batch.
    pub fn backward_batch(&self, inputs: &[Vec<f64>], d_outputs: &[Vec<f64>]) -> Result<Gradients> {
        if inputs.len() != d_outputs.len() {
            return Err(Error::ShapeMismatch {
                context: "Mlp::backward_batch",
                expected: inputs.len(),
                got: d_outputs.len(),
            });
        }
        let mut grads = Gradients::zeros_like(self);
        for (input, d_out) in inputs.iter().zip(d_outputs) {
            let trace = self.forward_trace(input)?;
            self.backward(&trace, d_out, &mut grads)?;
        }
        Ok(grads)
    }
}
