//! Adaptive-moment optimizer with bias correction.

use crate::error::{Error, Result};
use crate::nn::mlp::{Gradients, Mlp};

pub const DEFAULT_LEARNING_RATE: f64 = 3e-4;

/// First/second moment accumulators for one network, flat over parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    first_moment: Vec<f64>,
    second_moment: Vec<f64>,
    step_count: u64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl OptimizerState {
    pub fn new(net: &Mlp, learning_rate: f64) -> Self {
        Self {
            first_moment: vec![0.0; net.num_params()],
            second_moment: vec![0.0; net.num_params()],
            step_count: 0,
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    /// Restores the step counter when loading a checkpoint. Moment
    /// accumulators are not persisted; they restart from zero.
    pub fn set_step_count(&mut self, count: u64) {
        self.step_count = count;
    }
}

/// One optimizer update in place. Rejects non-finite gradients without
/// touching parameters or accumulators.
pub fn optimizer_step(net: &mut Mlp, grads: &Gradients, state: &mut OptimizerState) -> Result<()> {
    let n = net.num_params();
    if state.first_moment.len() != n {
        return Err(Error::ShapeMismatch {
            context: "optimizer_step state",
            expected: n,
            got: state.first_moment.len(),
        });
    }
    let flat_grads: Vec<f64> = grads.iter().copied().collect();
    if flat_grads.len() != n {
        return Err(Error::ShapeMismatch {
            context: "optimizer_step grads",
            expected: n,
            got: flat_grads.len(),
        });
    }
    if flat_grads.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite("optimizer_step gradients"));
    }

    state.step_count += 1;
    let t = state.step_count as i32;
    let bias1 = 1.0 - state.beta1.powi(t);
    let bias2 = 1.0 - state.beta2.powi(t);

    let mut params = net.params();
    for (i, g) in flat_grads.iter().enumerate() {
        let m = &mut state.first_moment[i];
        let v = &mut state.second_moment[i];
        *m = state.beta1 * *m + (1.0 - state.beta1) * g;
        *v = state.beta2 * *v + (1.0 - state.beta2) * g * g;
        let m_hat = *m / bias1;
        let v_hat = *v / bias2;
        params[i] -= state.learning_rate * m_hat / (v_hat.sqrt() + state.epsilon);
    }
    net.set_params(&params)
}
