//! Generalized advantage estimation.

use crate::error::{Error, Result};

/// Discount and smoothing parameters for advantage estimation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaeConfig {
    /// Discount factor in (0, 1].
    pub gamma: f64,
    /// Smoothing parameter in [0, 1].
    pub lambda: f64,
}

impl Default for GaeConfig {
    fn default() -> Self {
        Self {
            gamma: 0.998,
            lambda: 0.95,
        }
    }
}

impl GaeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "student.gamma must be in (0, 1], got {}",
                self.gamma
            )));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::InvalidConfig(format!(
                "student.lambda must be in [0, 1], got {}",
                self.lambda
            )));
        }
        Ok(())
    }
}

/// Computes advantages and value targets for one episode.
///
/// `values[t]` is the critic's prediction at state t; `bootstrap_value`
/// stands in for V at the state after the last step (0 for terminal
/// episodes, which is every fixed-length maze episode). Advantages follow
/// the backward recursion `a_t = delta_t + gamma * lambda * a_{t+1}` with
/// `delta_t = r_t + gamma * V_{t+1} - V_t`; targets are `a_t + V_t`.
pub fn compute_gae(
    rewards: &[f64],
    values: &[f64],
    bootstrap_value: f64,
    cfg: &GaeConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if rewards.len() != values.len() {
        return Err(Error::ShapeMismatch {
            context: "compute_gae",
            expected: rewards.len(),
            got: values.len(),
        });
    }
    cfg.validate()?;
    let t_max = rewards.len();
    let mut advantages = vec![0.0; t_max];
    let mut running = 0.0;
    for t in (0..t_max).rev() {
        let next_value = if t + 1 < t_max {
            values[t + 1]
        } else {
            bootstrap_value
        };
        let delta = rewards[t] + cfg.gamma * next_value - values[t];
        running = delta + cfg.gamma * cfg.lambda * running;
        advantages[t] = running;
    }
    let targets = advantages
        .iter()
        .zip(values)
        .map(|(a, v)| a + v)
        .collect();
    Ok((advantages, targets))
}
