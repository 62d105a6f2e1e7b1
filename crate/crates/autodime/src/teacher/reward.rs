//! Intrinsic teacher rewards, summed over episode time.

use crate::agent::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::nn::categorical;
use crate::nn::Mlp;

/// Which signal the teacher optimizes. `Constant` reduces teacher training
/// to maximum-entropy RL, i.e. the uniform-sampling baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TeacherRewardKind {
    ValuePredictionError,
    ValueDisagreement,
    PolicyDisagreement,
    Constant,
}

impl TeacherRewardKind {
    pub fn key(&self) -> &'static str {
        match self {
            TeacherRewardKind::ValuePredictionError => "vpe",
            TeacherRewardKind::ValueDisagreement => "vd",
            TeacherRewardKind::PolicyDisagreement => "pd",
            TeacherRewardKind::Constant => "constant",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        match key {
            "vpe" => Some(TeacherRewardKind::ValuePredictionError),
            "vd" => Some(TeacherRewardKind::ValueDisagreement),
            "pd" => Some(TeacherRewardKind::PolicyDisagreement),
            "constant" => Some(TeacherRewardKind::Constant),
            _ => None,
        }
    }
}

/// Value prediction error: `sum_t |V(s_t) - Vhat(s_t)|`, with V the
/// designated ensemble member V1.
pub fn vpe_reward(traj: &Trajectory) -> f64 {
    traj.values_primary
        .iter()
        .zip(&traj.value_targets)
        .map(|(v, t)| (v - t).abs())
        .sum()
}

/// Value disagreement: `sum_t (1/2)|V1(s_t) - V2(s_t)|`, the population
/// standard deviation of a two-member ensemble.
pub fn vd_reward(traj: &Trajectory) -> f64 {
    traj.values_primary
        .iter()
        .zip(&traj.values_second)
        .map(|(a, b)| 0.5 * (a - b).abs())
        .sum()
}

/// Policy disagreement: `sum_t KL(pi1(.|s_t) || pi2(.|s_t))` over the
/// visited states. Depends only on observations and the two policies.
pub fn pd_reward(traj: &Trajectory, policy: &Mlp, clone_policy: &Mlp) -> Result<f64> {
    let mut total = 0.0;
    for obs in &traj.observations {
        let p = policy.forward(obs)?;
        let q = clone_policy.forward(obs)?;
        total += categorical::kl_from_logits(&p, &q);
    }
    Ok(total)
}

/// Evaluates the selected reward on one episode.
pub fn teacher_reward(
    kind: TeacherRewardKind,
    traj: &Trajectory,
    policy: &Mlp,
    clone_policy: &Mlp,
) -> Result<f64> {
    Ok(match kind {
        TeacherRewardKind::ValuePredictionError => vpe_reward(traj),
        TeacherRewardKind::ValueDisagreement => vd_reward(traj),
        TeacherRewardKind::PolicyDisagreement => pd_reward(traj, policy, clone_policy)?,
        TeacherRewardKind::Constant => 1.0,
    })
}

/// Mean over students rolled out with the current policy; off-policy
/// students are excluded.
pub fn aggregate_teacher_reward(episode_rewards: &[f64], on_policy: &[bool]) -> Result<f64> {
    if episode_rewards.len() != on_policy.len() {
        return Err(Error::ShapeMismatch {
            context: "aggregate_teacher_reward",
            expected: episode_rewards.len(),
            got: on_policy.len(),
        });
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for (r, &keep) in episode_rewards.iter().zip(on_policy) {
        if keep {
            sum += r;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::EmptyBatch("aggregate_teacher_reward (no on-policy students)"));
    }
    Ok(sum / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::{child_rng, Stream};
    use rand::Rng;

    fn trajectory_with(v1: Vec<f64>, v2: Vec<f64>, targets: Vec<f64>) -> Trajectory {
        let t = v1.len();
        Trajectory {
            observations: vec![vec![0.0; 4]; t],
            actions: vec![0; t],
            log_probs: vec![-0.5; t],
            rewards: vec![0.0; t],
            values_primary: v1,
            values_second: v2,
            value_targets: targets,
            episode_length: t,
        }
    }

    #[test]
    fn vpe_zero_when_predictions_match_targets() {
        let t = trajectory_with(vec![1.0; 8], vec![0.0; 8], vec![1.0; 8]);
        assert_eq!(vpe_reward(&t), 0.0);
    }

    #[test]
    fn vpe_constant_gap_sums_linearly() {
        let t = trajectory_with(vec![1.0; 64], vec![0.0; 64], vec![0.5; 64]);
        assert_eq!(vpe_reward(&t), 32.0);
    }

    #[test]
    fn vpe_matches_scalar_loop_oracle() {
        let mut r = child_rng(17, Stream::Rollout, 0);
        let v: Vec<f64> = (0..20).map(|_| r.gen::<f64>() * 4.0 - 2.0).collect();
        let tg: Vec<f64> = (0..20).map(|_| r.gen::<f64>() * 4.0 - 2.0).collect();
        let t = trajectory_with(v.clone(), vec![0.0; 20], tg.clone());
        let mut oracle = 0.0;
        for i in 0..20 {
            oracle += (v[i] - tg[i]).abs();
        }
        assert!((vpe_reward(&t) - oracle).abs() < 1e-12);
    }

    #[test]
    fn vd_zero_when_members_agree() {
        let t = trajectory_with(vec![0.7; 5], vec![0.7; 5], vec![0.0; 5]);
        assert_eq!(vd_reward(&t), 0.0);
    }

    #[test]
    fn vd_constant_gap() {
        // V1 - V2 = 2c everywhere over T steps sums to T*c.
        let c = 0.3;
        let t = trajectory_with(vec![2.0 * c; 10], vec![0.0; 10], vec![0.0; 10]);
        assert!((vd_reward(&t) - 10.0 * c).abs() < 1e-12);
    }

    #[test]
    fn vd_matches_general_population_std() {
        // For n = 2, std({a, b}) = |a - b| / 2.
        let general_std = |xs: &[f64]| {
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / xs.len() as f64).sqrt()
        };
        let mut r = child_rng(18, Stream::Rollout, 0);
        for _ in 0..100 {
            let a = r.gen::<f64>() * 10.0 - 5.0;
            let b = r.gen::<f64>() * 10.0 - 5.0;
            let t = trajectory_with(vec![a], vec![b], vec![0.0]);
            assert!((vd_reward(&t) - general_std(&[a, b])).abs() < 1e-12);
        }
    }

    #[test]
    fn vd_invariant_under_member_swap_and_time_permutation() {
        let mut r = child_rng(19, Stream::Rollout, 0);
        let v1: Vec<f64> = (0..12).map(|_| r.gen::<f64>()).collect();
        let v2: Vec<f64> = (0..12).map(|_| r.gen::<f64>()).collect();
        let forward = trajectory_with(v1.clone(), v2.clone(), vec![0.0; 12]);
        let swapped = trajectory_with(v2.clone(), v1.clone(), vec![0.0; 12]);
        assert!((vd_reward(&forward) - vd_reward(&swapped)).abs() < 1e-15);

        let mut rv1 = v1.clone();
        let mut rv2 = v2.clone();
        rv1.reverse();
        rv2.reverse();
        let reversed = trajectory_with(rv1, rv2, vec![0.0; 12]);
        assert!((vd_reward(&forward) - vd_reward(&reversed)).abs() < 1e-12);
    }

    #[test]
    fn aggregate_filters_off_policy_students() {
        assert_eq!(aggregate_teacher_reward(&[5.0], &[true]).unwrap(), 5.0);
        assert_eq!(aggregate_teacher_reward(&[2.0, 4.0], &[true, true]).unwrap(), 3.0);
        assert_eq!(
            aggregate_teacher_reward(&[2.0, 4.0, 100.0], &[true, true, false]).unwrap(),
            3.0
        );
        assert!(matches!(
            aggregate_teacher_reward(&[2.0], &[false]),
            Err(Error::EmptyBatch(_))
        ));
    }
}
