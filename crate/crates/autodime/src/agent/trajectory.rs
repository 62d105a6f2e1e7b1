//! One student episode as the teacher and the PPO update see it.

use crate::error::{Error, Result};

/// Per-timestep record of a fixed-length episode.
///
/// `values_primary` (the designated ensemble member V1) feeds both the GAE
/// targets and the value-prediction-error reward; `values_second` only
/// exists for the disagreement signal and the shared-target regression.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub observations: Vec<Vec<f64>>,
    pub actions: Vec<usize>,
    /// Behavior log-probabilities (finite, <= 0).
    pub log_probs: Vec<f64>,
    pub rewards: Vec<f64>,
    /// V1 predictions per state.
    pub values_primary: Vec<f64>,
    /// V2 predictions per state.
    pub values_second: Vec<f64>,
    /// GAE value targets, computed from `values_primary`.
    pub value_targets: Vec<f64>,
    pub episode_length: usize,
}

impl Trajectory {
    /// Checks the equal-length and log-probability invariants.
    pub fn validate(&self) -> Result<()> {
        let t = self.episode_length;
        let lens = [
            self.observations.len(),
            self.actions.len(),
            self.log_probs.len(),
            self.rewards.len(),
            self.values_primary.len(),
            self.values_second.len(),
            self.value_targets.len(),
        ];
        if let Some(&bad) = lens.iter().find(|&&l| l != t) {
            return Err(Error::ShapeMismatch {
                context: "Trajectory arrays",
                expected: t,
                got: bad,
            });
        }
        if t == 0 {
            return Err(Error::EmptyBatch("Trajectory"));
        }
        if self.log_probs.iter().any(|lp| !lp.is_finite() || *lp > 0.0) {
            return Err(Error::NonFinite("Trajectory log_probs"));
        }
        Ok(())
    }

    /// Undiscounted environment return of the episode.
    pub fn total_reward(&self) -> f64 {
        self.rewards.iter().sum()
    }
}
