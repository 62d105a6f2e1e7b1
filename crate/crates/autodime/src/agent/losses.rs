//! PPO surrogate losses and entropy bonus.

use crate::error::{Error, Result};
use crate::nn::categorical;

/// Clipped-surrogate optimization parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PpoConfig {
    pub clip_epsilon: f64,
    pub entropy_coef: f64,
    pub value_coef: f64,
    /// Optimization epochs per collected batch.
    pub epochs: usize,
    /// Minibatch size in whole episodes.
    pub minibatch_episodes: usize,
    /// Normalize advantages to zero mean / unit variance per batch.
    pub normalize_advantages: bool,
}

impl Default for PpoConfig {
    fn default() -> Self {
        Self {
            clip_epsilon: 0.2,
            entropy_coef: 0.01,
            value_coef: 0.5,
            epochs: 4,
            minibatch_episodes: 16,
            normalize_advantages: true,
        }
    }
}

impl PpoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.clip_epsilon <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "clip_epsilon must be > 0, got {}",
                self.clip_epsilon
            )));
        }
        if self.entropy_coef < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "entropy_coef must be >= 0, got {}",
                self.entropy_coef
            )));
        }
        if self.epochs == 0 || self.minibatch_episodes == 0 {
            return Err(Error::InvalidConfig(
                "epochs and minibatch_episodes must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Mean clipped surrogate loss:
/// `-mean_t min(rho_t * A_t, clip(rho_t, 1 - eps, 1 + eps) * A_t)` with
/// `rho_t = exp(new_logp_t - old_logp_t)`.
pub fn ppo_policy_loss(
    new_logp: &[f64],
    old_logp: &[f64],
    advantages: &[f64],
    cfg: &PpoConfig,
) -> Result<f64> {
    check_lengths(new_logp, old_logp, advantages)?;
    cfg.validate()?;
    let mut total = 0.0;
    for ((n, o), a) in new_logp.iter().zip(old_logp).zip(advantages) {
        if !n.is_finite() || !o.is_finite() || !a.is_finite() {
            return Err(Error::NonFinite("ppo_policy_loss inputs"));
        }
        let rho = (n - o).exp();
        let clipped = rho.clamp(1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon);
        total += -f64::min(rho * a, clipped * a);
    }
    Ok(total / new_logp.len() as f64)
}

/// d(ppo_policy_loss)/d(new_logp_t). The gradient flows through the
/// unclipped branch whenever it attains the pessimistic min; on the flat
/// clipped branch it is zero.
pub fn ppo_policy_loss_grad(
    new_logp: &[f64],
    old_logp: &[f64],
    advantages: &[f64],
    cfg: &PpoConfig,
) -> Result<Vec<f64>> {
    check_lengths(new_logp, old_logp, advantages)?;
    let n = new_logp.len() as f64;
    let mut grad = Vec::with_capacity(new_logp.len());
    for ((nl, o), a) in new_logp.iter().zip(old_logp).zip(advantages) {
        let rho = (nl - o).exp();
        let clipped = rho.clamp(1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon);
        let g = if rho * a <= clipped * a {
            // d(-rho * a)/d(new_logp) = -a * rho
            -a * rho / n
        } else {
            0.0
        };
        grad.push(g);
    }
    Ok(grad)
}

fn check_lengths(a: &[f64], b: &[f64], c: &[f64]) -> Result<()> {
    if a.len() != b.len() || a.len() != c.len() {
        return Err(Error::ShapeMismatch {
            context: "ppo loss arrays",
            expected: a.len(),
            got: b.len().min(c.len()),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyBatch("ppo_policy_loss"));
    }
    Ok(())
}

/// Sum over ensemble members of the mean squared error to shared targets.
pub fn value_loss(predictions: &[&[f64]], targets: &[f64]) -> Result<f64> {
    if targets.is_empty() {
        return Err(Error::EmptyBatch("value_loss"));
    }
    let mut total = 0.0;
    for member in predictions {
        if member.len() != targets.len() {
            return Err(Error::ShapeMismatch {
                context: "value_loss member",
                expected: targets.len(),
                got: member.len(),
            });
        }
        let mse: f64 = member
            .iter()
            .zip(targets)
            .map(|(p, t)| (p - t) * (p - t))
            .sum::<f64>()
            / targets.len() as f64;
        total += mse;
    }
    Ok(total)
}

/// Mean Shannon entropy of softmax action distributions over a batch of
/// logit rows.
pub fn policy_entropy(action_logits: &[Vec<f64>]) -> Result<f64> {
    if action_logits.is_empty() {
        return Err(Error::EmptyBatch("policy_entropy"));
    }
    let mut total = 0.0;
    for row in action_logits {
        if row.iter().any(|l| !l.is_finite()) {
            return Err(Error::NonFinite("policy_entropy logits"));
        }
        total += categorical::entropy(row);
    }
    Ok(total / action_logits.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::{child_rng, Stream};
    use rand::Rng;

    #[test]
    fn ratio_one_gives_negative_mean_advantage() {
        let cfg = PpoConfig::default();
        let logp = [-0.5, -1.2, -0.1];
        let adv = [1.0, -2.0, 0.5];
        let loss = ppo_policy_loss(&logp, &logp, &adv, &cfg).unwrap();
        let mean_adv = adv.iter().sum::<f64>() / 3.0;
        assert!((loss + mean_adv).abs() < 1e-15);
    }

    #[test]
    fn clip_boundary_single_step() {
        // A = 1, rho = 2, eps = 0.2: min(2, 1.2) = 1.2, loss = -1.2.
        let cfg = PpoConfig::default();
        let new_logp = [2.0f64.ln()];
        let old_logp = [0.0];
        let loss = ppo_policy_loss(&new_logp, &old_logp, &[1.0], &cfg).unwrap();
        assert!((loss + 1.2).abs() < 1e-12);
    }

    #[test]
    fn matches_elementwise_reference_on_random_batches() {
        let mut r = child_rng(13, Stream::Rollout, 0);
        let cfg = PpoConfig::default();
        for _ in 0..50 {
            let n = r.gen_range(1..30);
            let new_logp: Vec<f64> = (0..n).map(|_| -r.gen::<f64>() * 3.0).collect();
            let old_logp: Vec<f64> = (0..n).map(|_| -r.gen::<f64>() * 3.0).collect();
            let adv: Vec<f64> = (0..n).map(|_| r.gen::<f64>() * 4.0 - 2.0).collect();
            let got = ppo_policy_loss(&new_logp, &old_logp, &adv, &cfg).unwrap();
            // Scalar reference computation.
            let mut want = 0.0;
            for i in 0..n {
                let rho = (new_logp[i] - old_logp[i]).exp();
                let c = rho.max(0.8).min(1.2);
                want -= (rho * adv[i]).min(c * adv[i]);
            }
            want /= n as f64;
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn clipped_surrogate_never_exceeds_unclipped_when_it_differs() {
        let mut r = child_rng(14, Stream::Rollout, 0);
        for _ in 0..500 {
            let new_logp = -r.gen::<f64>() * 3.0;
            let old_logp = -r.gen::<f64>() * 3.0;
            let a = r.gen::<f64>() * 4.0 - 2.0;
            let rho = (new_logp - old_logp).exp();
            let clipped = rho.clamp(0.8, 1.2);
            let surrogate = f64::min(rho * a, clipped * a);
            if (surrogate - rho * a).abs() > 1e-12 {
                assert!(surrogate <= rho * a);
            }
        }
    }

    #[test]
    fn policy_loss_grad_matches_finite_differences() {
        let mut r = child_rng(15, Stream::Rollout, 0);
        let cfg = PpoConfig::default();
        let n = 12;
        let new_logp: Vec<f64> = (0..n).map(|_| -r.gen::<f64>() * 2.0).collect();
        let old_logp: Vec<f64> = (0..n).map(|_| -r.gen::<f64>() * 2.0).collect();
        let adv: Vec<f64> = (0..n).map(|_| r.gen::<f64>() * 4.0 - 2.0).collect();
        let grad = ppo_policy_loss_grad(&new_logp, &old_logp, &adv, &cfg).unwrap();
        let h = 1e-7;
        for i in 0..n {
            let mut plus = new_logp.clone();
            plus[i] += h;
            let mut minus = new_logp.clone();
            minus[i] -= h;
            let lp = ppo_policy_loss(&plus, &old_logp, &adv, &cfg).unwrap();
            let lm = ppo_policy_loss(&minus, &old_logp, &adv, &cfg).unwrap();
            let numeric = (lp - lm) / (2.0 * h);
            assert!(
                (grad[i] - numeric).abs() < 1e-6,
                "i={i}: analytic {}, numeric {numeric}",
                grad[i]
            );
        }
    }

    #[test]
    fn non_finite_inputs_rejected() {
        let cfg = PpoConfig::default();
        let out = ppo_policy_loss(&[f64::NAN], &[0.0], &[1.0], &cfg);
        assert!(matches!(out, Err(Error::NonFinite(_))));
    }

    #[test]
    fn value_loss_zero_when_exact() {
        let targets = [0.5, -1.0, 2.0];
        let loss = value_loss(&[&targets, &targets], &targets).unwrap();
        assert_eq!(loss, 0.0);
    }

    #[test]
    fn value_loss_counts_each_member() {
        let targets = [1.0, 1.0, 1.0, 1.0];
        let off = [2.0, 2.0, 2.0, 2.0];
        let loss = value_loss(&[&off, &targets], &targets).unwrap();
        assert_eq!(loss, 1.0);
    }

    #[test]
    fn value_loss_matches_hand_summed_mse() {
        let mut r = child_rng(16, Stream::Rollout, 0);
        let n = 17;
        let t: Vec<f64> = (0..n).map(|_| r.gen::<f64>()).collect();
        let v1: Vec<f64> = (0..n).map(|_| r.gen::<f64>()).collect();
        let v2: Vec<f64> = (0..n).map(|_| r.gen::<f64>()).collect();
        let got = value_loss(&[&v1, &v2], &t).unwrap();
        let mut want = 0.0;
        for i in 0..n {
            want += (v1[i] - t[i]).powi(2) / n as f64;
            want += (v2[i] - t[i]).powi(2) / n as f64;
        }
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn value_loss_length_mismatch_errors() {
        let out = value_loss(&[&[1.0, 2.0][..]], &[1.0]);
        assert!(matches!(out, Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn batch_entropy_is_mean_of_rows() {
        let rows = vec![vec![0.0; 4], vec![1e6, 0.0, 0.0, 0.0]];
        let h = policy_entropy(&rows).unwrap();
        assert!((h - 4.0f64.ln() / 2.0).abs() < 1e-9);
    }
}
