//! The student learner: PPO policy, two-member value ensemble, and the
//! behaviorally cloned shadow policy.

use rand::seq::SliceRandom;
#[cfg(test)]
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::agent::gae::{compute_gae, GaeConfig};
use crate::agent::losses::{ppo_policy_loss_grad, PpoConfig};
use crate::agent::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::nn::categorical;
use crate::nn::{optimizer_step, Gradients, Mlp, OptimizerState};
use crate::seed::{child_rng, Stream};

/// Network sizing and optimization knobs for one student.
#[derive(Debug, Clone, PartialEq)]
pub struct StudentConfig {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub gae: GaeConfig,
    pub ppo: PpoConfig,
}

impl Default for StudentConfig {
    fn default() -> Self {
        Self {
            hidden: vec![32, 32],
            learning_rate: 3e-4,
            gae: GaeConfig {
                gamma: 0.99,
                lambda: 0.95,
            },
            ppo: PpoConfig::default(),
        }
    }
}

/// Loss diagnostics from one update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StudentLossStats {
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
    pub clone_kl: f64,
}

/// Policy pi1, clone pi2, and the independently initialized value ensemble
/// {V1, V2}, each with its own optimizer. pi2 only ever receives cloning
/// gradients.
#[derive(Debug, Clone)]
pub struct StudentBundle {
    pub policy: Mlp,
    pub clone_policy: Mlp,
    pub value_nets: [Mlp; 2],
    opt_policy: OptimizerState,
    opt_clone: OptimizerState,
    opt_values: [OptimizerState; 2],
    pub cfg: StudentConfig,
}

impl StudentBundle {
    pub fn new(obs_dim: usize, action_count: usize, cfg: &StudentConfig, master_seed: u64) -> Result<Self> {
        let mut policy_dims = vec![obs_dim];
        policy_dims.extend_from_slice(&cfg.hidden);
        policy_dims.push(action_count);
        let mut value_dims = vec![obs_dim];
        value_dims.extend_from_slice(&cfg.hidden);
        value_dims.push(1);

        let rng = |idx| child_rng(master_seed, Stream::StudentInit, idx);
        let policy = Mlp::new_policy(&policy_dims, &mut rng(0))?;
        let clone_policy = Mlp::new_policy(&policy_dims, &mut rng(1))?;
        let value_nets = [
            Mlp::new_value(&value_dims, &mut rng(2))?,
            Mlp::new_value(&value_dims, &mut rng(3))?,
        ];
        Ok(Self {
            opt_policy: OptimizerState::new(&policy, cfg.learning_rate),
            opt_clone: OptimizerState::new(&clone_policy, cfg.learning_rate),
            opt_values: [
                OptimizerState::new(&value_nets[0], cfg.learning_rate),
                OptimizerState::new(&value_nets[1], cfg.learning_rate),
            ],
            policy,
            clone_policy,
            value_nets,
            cfg: cfg.clone(),
        })
    }

    /// Optimizer step counters in checkpoint order:
    /// policy, value1, value2, clone.
    pub fn optimizer_steps(&self) -> [u64; 4] {
        [
            self.opt_policy.step_count(),
            self.opt_values[0].step_count(),
            self.opt_values[1].step_count(),
            self.opt_clone.step_count(),
        ]
    }

    pub fn set_optimizer_steps(&mut self, steps: [u64; 4]) {
        self.opt_policy.set_step_count(steps[0]);
        self.opt_values[0].set_step_count(steps[1]);
        self.opt_values[1].set_step_count(steps[2]);
        self.opt_clone.set_step_count(steps[3]);
    }

    /// Samples an action from pi1 and returns (action index, log-prob).
    pub fn act(&self, obs: &[f64], rng: &mut ChaCha8Rng) -> Result<(usize, f64)> {
        let logits = self.policy.forward(obs)?;
        let probs = categorical::softmax(&logits);
        let action = categorical::sample_index(&probs, rng);
        let logp = categorical::log_softmax(&logits)[action];
        Ok((action, logp))
    }

    /// Ensemble value predictions (V1, V2) at one state.
    pub fn predict_values(&self, obs: &[f64]) -> Result<(f64, f64)> {
        let v1 = self.value_nets[0].forward(obs)?[0];
        let v2 = self.value_nets[1].forward(obs)?[0];
        Ok((v1, v2))
    }

    /// One gradient step on `mean_t KL(pi1 || pi2)` with respect to pi2 only.
    /// Returns the pre-step mean KL.
    pub fn clone_update(&mut self, observations: &[&[f64]]) -> Result<f64> {
        if observations.is_empty() {
            return Err(Error::EmptyBatch("clone_update"));
        }
        let mut grads = Gradients::zeros_like(&self.clone_policy);
        let mut total_kl = 0.0;
        let scale = 1.0 / observations.len() as f64;
        for obs in observations {
            let p_logits = self.policy.forward(obs)?;
            let trace = self.clone_policy.forward_trace(obs)?;
            let q_logits = trace.output();
            total_kl += categorical::kl_from_logits(&p_logits, q_logits);
            let d_logits: Vec<f64> = categorical::kl_grad_wrt_q_logits(&p_logits, q_logits)
                .iter()
                .map(|g| g * scale)
                .collect();
            self.clone_policy.backward(&trace, &d_logits, &mut grads)?;
        }
        optimizer_step(&mut self.clone_policy, &grads, &mut self.opt_clone)?;
        Ok(total_kl * scale)
    }

    /// Full PPO update over a batch of on-policy trajectories followed by
    /// one cloning pass over all batch observations.
    pub fn student_update(
        &mut self,
        batch: &[Trajectory],
        shuffle_rng: &mut ChaCha8Rng,
    ) -> Result<StudentLossStats> {
        if batch.is_empty() {
            return Err(Error::EmptyBatch("student_update"));
        }
        let ppo = self.cfg.ppo.clone();
        ppo.validate()?;
        for traj in batch {
            traj.validate()?;
        }

        // Advantages / targets from the designated GAE source V1.
        let mut advantages: Vec<Vec<f64>> = Vec::with_capacity(batch.len());
        let mut targets: Vec<Vec<f64>> = Vec::with_capacity(batch.len());
        for traj in batch {
            let (adv, tgt) = compute_gae(&traj.rewards, &traj.values_primary, 0.0, &self.cfg.gae)?;
            advantages.push(adv);
            targets.push(tgt);
        }

        if ppo.normalize_advantages {
            normalize_in_place(&mut advantages);
        }

        let mut stats = StudentLossStats::default();
        let mut order: Vec<usize> = (0..batch.len()).collect();
        for epoch in 0..ppo.epochs {
            order.shuffle(shuffle_rng);
            let last_epoch = epoch + 1 == ppo.epochs;
            let mut epoch_stats = StudentLossStats::default();
            for chunk in order.chunks(ppo.minibatch_episodes) {
                let mb = self.minibatch_step(batch, &advantages, &targets, chunk, &ppo)?;
                epoch_stats.policy_loss += mb.policy_loss * chunk.len() as f64;
                epoch_stats.value_loss += mb.value_loss * chunk.len() as f64;
                epoch_stats.entropy += mb.entropy * chunk.len() as f64;
            }
            if last_epoch {
                let n = batch.len() as f64;
                stats.policy_loss = epoch_stats.policy_loss / n;
                stats.value_loss = epoch_stats.value_loss / n;
                stats.entropy = epoch_stats.entropy / n;
            }
        }

        let observations: Vec<&[f64]> = batch
            .iter()
            .flat_map(|t| t.observations.iter().map(Vec::as_slice))
            .collect();
        stats.clone_kl = self.clone_update(&observations)?;
        Ok(stats)
    }

    /// Gradient step over one minibatch of episodes. Per-episode means are
    /// averaged across episodes so that all episodes weigh equally.
    fn minibatch_step(
        &mut self,
        batch: &[Trajectory],
        advantages: &[Vec<f64>],
        targets: &[Vec<f64>],
        episodes: &[usize],
        ppo: &PpoConfig,
    ) -> Result<StudentLossStats> {
        let mut policy_grads = Gradients::zeros_like(&self.policy);
        let mut value_grads = [
            Gradients::zeros_like(&self.value_nets[0]),
            Gradients::zeros_like(&self.value_nets[1]),
        ];
        let mut episode_policy = Gradients::zeros_like(&self.policy);
        let mut episode_value = [
            Gradients::zeros_like(&self.value_nets[0]),
            Gradients::zeros_like(&self.value_nets[1]),
        ];
        let mut stats = StudentLossStats::default();
        let episode_weight = 1.0 / episodes.len() as f64;

        for &ep in episodes {
            let traj = &batch[ep];
            let adv = &advantages[ep];
            let tgt = &targets[ep];
            let t_len = traj.episode_length as f64;
            let step_weight = 1.0 / t_len;

            episode_policy.fill_zero();
            episode_value[0].fill_zero();
            episode_value[1].fill_zero();

            // Recompute current log-probs for the PPO ratio.
            let traces: Vec<_> = traj
                .observations
                .iter()
                .map(|obs| self.policy.forward_trace(obs))
                .collect::<Result<_>>()?;
            let new_logp: Vec<f64> = traces
                .iter()
                .zip(&traj.actions)
                .map(|(tr, &a)| categorical::log_softmax(tr.output())[a])
                .collect();
            let dl_dlogp = ppo_policy_loss_grad(&new_logp, &traj.log_probs, adv, ppo)?;

            for (t, trace) in traces.iter().enumerate() {
                let logits = trace.output();
                let probs = categorical::softmax(logits);
                // Surrogate term: d logp / d logits = e_a - p. dl_dlogp
                // already carries the per-episode 1/T normalization.
                let g = dl_dlogp[t];
                let mut d_logits: Vec<f64> = probs.iter().map(|p| -g * p).collect();
                d_logits[traj.actions[t]] += g;
                // Entropy bonus: loss includes -coef * H.
                let ent_grad = categorical::entropy_grad(logits);
                for (dl, eg) in d_logits.iter_mut().zip(&ent_grad) {
                    *dl -= ppo.entropy_coef * eg * step_weight;
                }
                self.policy.backward(trace, &d_logits, &mut episode_policy)?;
                stats.entropy += categorical::entropy(logits) * step_weight * episode_weight;

                // Value ensemble regression to the shared target.
                for (m, member) in self.value_nets.iter().enumerate() {
                    let trace_v = member.forward_trace(&traj.observations[t])?;
                    let v = trace_v.output()[0];
                    let err = v - tgt[t];
                    stats.value_loss += err * err * step_weight * episode_weight;
                    let d_out = [ppo.value_coef * 2.0 * err * step_weight];
                    member.backward(&trace_v, &d_out, &mut episode_value[m])?;
                }

                let rho = (new_logp[t] - traj.log_probs[t]).exp();
                let clipped = rho.clamp(1.0 - ppo.clip_epsilon, 1.0 + ppo.clip_epsilon);
                stats.policy_loss +=
                    -f64::min(rho * adv[t], clipped * adv[t]) * step_weight * episode_weight;
            }

            policy_grads.add_scaled(&episode_policy, episode_weight);
            value_grads[0].add_scaled(&episode_value[0], episode_weight);
            value_grads[1].add_scaled(&episode_value[1], episode_weight);
        }

        optimizer_step(&mut self.policy, &policy_grads, &mut self.opt_policy)?;
        optimizer_step(&mut self.value_nets[0], &value_grads[0], &mut self.opt_values[0])?;
        optimizer_step(&mut self.value_nets[1], &value_grads[1], &mut self.opt_values[1])?;
        Ok(stats)
    }
}

/// Zero-mean / unit-variance normalization across all timesteps of a batch.
fn normalize_in_place(advantages: &mut [Vec<f64>]) {
    let n: usize = advantages.iter().map(Vec::len).sum();
    if n == 0 {
        return;
    }
    let mean: f64 = advantages.iter().flatten().sum::<f64>() / n as f64;
    let var: f64 = advantages
        .iter()
        .flatten()
        .map(|a| (a - mean) * (a - mean))
        .sum::<f64>()
        / n as f64;
    let std = var.sqrt() + 1e-8;
    for row in advantages.iter_mut() {
        for a in row.iter_mut() {
            *a = (*a - mean) / std;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::{child_rng, Stream};

    fn tiny_bundle(seed: u64) -> StudentBundle {
        let cfg = StudentConfig {
            hidden: vec![8],
            ..StudentConfig::default()
        };
        StudentBundle::new(4, 3, &cfg, seed).unwrap()
    }

    fn synthetic_trajectory(rng: &mut ChaCha8Rng, bundle: &StudentBundle, t: usize) -> Trajectory {
        let observations: Vec<Vec<f64>> = (0..t)
            .map(|_| (0..4).map(|_| rng.gen::<f64>()).collect())
            .collect();
        let mut actions = Vec::new();
        let mut log_probs = Vec::new();
        let mut v1 = Vec::new();
        let mut v2 = Vec::new();
        for obs in &observations {
            let (a, lp) = bundle.act(obs, rng).unwrap();
            actions.push(a);
            log_probs.push(lp);
            let (a_v, b_v) = bundle.predict_values(obs).unwrap();
            v1.push(a_v);
            v2.push(b_v);
        }
        Trajectory {
            observations,
            actions,
            log_probs,
            rewards: (0..t).map(|_| rng.gen::<f64>()).collect(),
            values_primary: v1,
            values_second: v2,
            value_targets: vec![0.0; t],
            episode_length: t,
        }
    }

    #[test]
    fn value_ensemble_members_differ_at_init() {
        let bundle = tiny_bundle(0);
        assert_ne!(bundle.value_nets[0].params(), bundle.value_nets[1].params());
        assert_eq!(
            bundle.value_nets[0].layer_dims(),
            bundle.value_nets[1].layer_dims()
        );
    }

    #[test]
    fn clone_of_identical_policy_has_zero_kl_and_no_movement() {
        let mut bundle = tiny_bundle(1);
        bundle.clone_policy = bundle.policy.clone();
        let before = bundle.clone_policy.params();
        let obs = vec![0.1, 0.2, 0.3, 0.4];
        let kl = bundle.clone_update(&[&obs]).unwrap();
        assert!(kl.abs() < 1e-15);
        let after = bundle.clone_policy.params();
        for (b, a) in before.iter().zip(&after) {
            assert!((b - a).abs() < 1e-12);
        }
    }

    #[test]
    fn repeated_clone_updates_shrink_kl_monotonically() {
        let mut bundle = tiny_bundle(2);
        // Push pi1 away from pi2 so there is something to learn.
        let mut params = bundle.policy.params();
        for p in params.iter_mut() {
            *p *= 40.0;
        }
        bundle.policy.set_params(&params).unwrap();

        let mut rng = child_rng(3, Stream::Rollout, 0);
        let obs: Vec<Vec<f64>> = (0..16)
            .map(|_| (0..4).map(|_| rng.gen::<f64>()).collect())
            .collect();
        let refs: Vec<&[f64]> = obs.iter().map(Vec::as_slice).collect();
        let mut previous = f64::INFINITY;
        for step in 0..50 {
            let kl = bundle.clone_update(&refs).unwrap();
            assert!(
                kl <= previous + 1e-9,
                "KL rose at step {step}: {kl} > {previous}"
            );
            previous = kl;
        }
    }

    #[test]
    fn empty_batch_is_rejected() {
        let mut bundle = tiny_bundle(4);
        let mut rng = child_rng(4, Stream::StudentShuffle, 0);
        assert!(matches!(
            bundle.student_update(&[], &mut rng),
            Err(Error::EmptyBatch(_))
        ));
    }

    #[test]
    fn duplicated_batch_produces_identical_update_in_full_batch_mode() {
        let mut rng = child_rng(5, Stream::Rollout, 0);
        let proto = tiny_bundle(6);
        let traj = synthetic_trajectory(&mut rng, &proto, 7);

        let mut cfg = proto.cfg.clone();
        cfg.ppo.minibatch_episodes = 8; // full batch either way
        let mut bundle_a = StudentBundle::new(4, 3, &cfg, 6).unwrap();
        let mut bundle_b = bundle_a.clone();

        let mut rng_a = child_rng(7, Stream::StudentShuffle, 0);
        let mut rng_b = child_rng(7, Stream::StudentShuffle, 0);
        bundle_a.student_update(&[traj.clone()], &mut rng_a).unwrap();
        bundle_b
            .student_update(&[traj.clone(), traj.clone()], &mut rng_b)
            .unwrap();

        for (a, b) in bundle_a.policy.params().iter().zip(bundle_b.policy.params()) {
            assert!((a - b).abs() < 1e-12, "policy diverged: {a} vs {b}");
        }
        for m in 0..2 {
            for (a, b) in bundle_a.value_nets[m]
                .params()
                .iter()
                .zip(bundle_b.value_nets[m].params())
            {
                assert!((a - b).abs() < 1e-12, "value net {m} diverged");
            }
        }
    }

    #[test]
    fn zero_advantage_batch_moves_policy_only_through_entropy() {
        // Exact value predictions and zero rewards make every advantage zero;
        // disable normalization so they stay zero. The policy then moves, but
        // only because of the entropy bonus; with the bonus off it must not.
        let mut rng = child_rng(8, Stream::Rollout, 0);
        let mut cfg = StudentConfig {
            hidden: vec![8],
            ..StudentConfig::default()
        };
        cfg.ppo.normalize_advantages = false;
        cfg.gae = GaeConfig {
            gamma: 0.99,
            lambda: 0.95,
        };

        let build = |entropy_coef: f64| {
            let mut c = cfg.clone();
            c.ppo.entropy_coef = entropy_coef;
            StudentBundle::new(4, 3, &c, 9).unwrap()
        };

        let make_traj = |bundle: &StudentBundle, rng: &mut ChaCha8Rng| {
            let mut t = synthetic_trajectory(rng, bundle, 5);
            t.rewards = vec![0.0; 5];
            // Zero rewards + zero values => zero advantages.
            t.values_primary = vec![0.0; 5];
            t.values_second = vec![0.0; 5];
            t
        };

        let mut with_entropy = build(0.01);
        let traj = make_traj(&with_entropy, &mut rng);
        let before = with_entropy.policy.params();
        let mut srng = child_rng(10, Stream::StudentShuffle, 0);
        with_entropy.student_update(&[traj.clone()], &mut srng).unwrap();
        let moved = with_entropy
            .policy
            .params()
            .iter()
            .zip(&before)
            .any(|(a, b)| (a - b).abs() > 1e-12);
        assert!(moved, "entropy gradient should move the policy");

        let mut without_entropy = build(0.0);
        let before = without_entropy.policy.params();
        let mut srng = child_rng(10, Stream::StudentShuffle, 0);
        without_entropy.student_update(&[traj], &mut srng).unwrap();
        let moved = without_entropy
            .policy
            .params()
            .iter()
            .zip(&before)
            .any(|(a, b)| (a - b).abs() > 1e-12);
        assert!(!moved, "policy must be frozen with zero advantages and no entropy term");
    }

    #[test]
    fn composite_policy_gradient_matches_finite_differences() {
        // End-to-end check of d(policy objective)/d(theta) through the
        // surrogate + entropy path, against central differences on the full
        // scalar objective.
        let mut rng = child_rng(11, Stream::Rollout, 0);
        let cfg = StudentConfig {
            hidden: vec![6],
            ..StudentConfig::default()
        };
        let bundle = StudentBundle::new(4, 3, &cfg, 12).unwrap();
        let traj = synthetic_trajectory(&mut rng, &bundle, 6);
        let adv: Vec<f64> = (0..6).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let ppo = PpoConfig {
            normalize_advantages: false,
            ..PpoConfig::default()
        };

        let objective = |policy: &Mlp| -> f64 {
            let new_logp: Vec<f64> = traj
                .observations
                .iter()
                .zip(&traj.actions)
                .map(|(obs, &a)| categorical::log_softmax(&policy.forward(obs).unwrap())[a])
                .collect();
            let surrogate =
                crate::agent::losses::ppo_policy_loss(&new_logp, &traj.log_probs, &adv, &ppo)
                    .unwrap();
            let entropy: f64 = traj
                .observations
                .iter()
                .map(|obs| categorical::entropy(&policy.forward(obs).unwrap()))
                .sum::<f64>()
                / 6.0;
            surrogate - ppo.entropy_coef * entropy
        };

        // Analytic gradient assembled the same way minibatch_step does.
        let mut grads = Gradients::zeros_like(&bundle.policy);
        let traces: Vec<_> = traj
            .observations
            .iter()
            .map(|obs| bundle.policy.forward_trace(obs).unwrap())
            .collect();
        let new_logp: Vec<f64> = traces
            .iter()
            .zip(&traj.actions)
            .map(|(tr, &a)| categorical::log_softmax(tr.output())[a])
            .collect();
        let dl = ppo_policy_loss_grad(&new_logp, &traj.log_probs, &adv, &ppo).unwrap();
        for (t, trace) in traces.iter().enumerate() {
            let probs = categorical::softmax(trace.output());
            let mut d_logits: Vec<f64> = probs.iter().map(|p| -dl[t] * p).collect();
            d_logits[traj.actions[t]] += dl[t];
            let ent = categorical::entropy_grad(trace.output());
            for (dlog, e) in d_logits.iter_mut().zip(&ent) {
                *dlog -= ppo.entropy_coef * e / 6.0;
            }
            bundle.policy.backward(trace, &d_logits, &mut grads).unwrap();
        }

        let flat: Vec<f64> = grads.iter().copied().collect();
        let mut probe = bundle.policy.clone();
        let h = 1e-6;
        for idx in (0..probe.num_params()).step_by(7) {
            let orig = *probe.param_mut(idx).unwrap();
            *probe.param_mut(idx).unwrap() = orig + h;
            let plus = objective(&probe);
            *probe.param_mut(idx).unwrap() = orig - h;
            let minus = objective(&probe);
            *probe.param_mut(idx).unwrap() = orig;
            let numeric = (plus - minus) / (2.0 * h);
            let denom = numeric.abs().max(flat[idx].abs()).max(1e-6);
            assert!(
                (flat[idx] - numeric).abs() / denom < 1e-4,
                "param {idx}: analytic {}, numeric {numeric}",
                flat[idx]
            );
        }
    }
}
