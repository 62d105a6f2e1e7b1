//! On-policy episode collection.

use rand_chacha::ChaCha8Rng;

use crate::agent::student::StudentBundle;
use crate::agent::trajectory::Trajectory;
use crate::env::layout::MazeLayout;
use crate::env::sim::{observe, reset, step, Action, EnvParams};
use crate::env::spawn::SpawnSpec;
use crate::error::Result;

/// Rolls one fixed-length episode under the current pi1, recording ensemble
/// value predictions and filling GAE value targets from V1.
pub fn collect_episode(
    bundle: &StudentBundle,
    layout: &MazeLayout,
    spawn: &SpawnSpec,
    params: &EnvParams,
    rng: &mut ChaCha8Rng,
) -> Result<Trajectory> {
    let t_max = params.episode_length;
    let mut state = reset(spawn, params, rng);

    let mut observations = Vec::with_capacity(t_max);
    let mut actions = Vec::with_capacity(t_max);
    let mut log_probs = Vec::with_capacity(t_max);
    let mut rewards = Vec::with_capacity(t_max);
    let mut values_primary = Vec::with_capacity(t_max);
    let mut values_second = Vec::with_capacity(t_max);

    for _ in 0..t_max {
        let obs = observe(&state, layout, params);
        let (action_idx, logp) = bundle.act(&obs, rng)?;
        let (v1, v2) = bundle.predict_values(&obs)?;
        let action = Action::from_index(action_idx).expect("policy head matches action count");
        let (next, reward) = step(&state, layout, params, action)?;

        observations.push(obs);
        actions.push(action_idx);
        log_probs.push(logp);
        rewards.push(reward);
        values_primary.push(v1);
        values_second.push(v2);
        state = next;
    }

    let (_, value_targets) =
        crate::agent::gae::compute_gae(&rewards, &values_primary, 0.0, &bundle.cfg.gae)?;

    let traj = Trajectory {
        observations,
        actions,
        log_probs,
        rewards,
        values_primary,
        values_second,
        value_targets,
        episode_length: t_max,
    };
    traj.validate()?;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::student::StudentConfig;
    use crate::env::layout::generate_layout;
    use crate::env::sim::OBSERVATION_DIM;
    use crate::env::spawn::uniform_spawn;
    use crate::seed::{child_rng, Stream};

    #[test]
    fn episode_has_consistent_shape_and_is_deterministic_per_stream() {
        let layout = generate_layout(21, 6, 6, 3).unwrap();
        let mut spawn_rng = child_rng(21, Stream::Spawn, 0);
        let spawn = uniform_spawn(&mut spawn_rng, &layout).unwrap();
        let params = EnvParams {
            episode_length: 16,
            stochastic: false,
        };
        let cfg = StudentConfig {
            hidden: vec![8],
            ..StudentConfig::default()
        };
        let bundle = StudentBundle::new(OBSERVATION_DIM, Action::COUNT, &cfg, 5).unwrap();

        let mut rng_a = child_rng(22, Stream::Rollout, 0);
        let a = collect_episode(&bundle, &layout, &spawn, &params, &mut rng_a).unwrap();
        assert_eq!(a.episode_length, 16);
        a.validate().unwrap();

        let mut rng_b = child_rng(22, Stream::Rollout, 0);
        let b = collect_episode(&bundle, &layout, &spawn, &params, &mut rng_b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn room_membership_never_changes_without_climbing() {
        // Randomized rollouts with a policy that cannot climb (head truncated
        // by masking climb actions out via rejection) would need a custom
        // policy; instead drive the env directly with random non-climb
        // actions and assert the room id is invariant.
        use crate::env::sim::{reset, step};
        use rand::Rng;

        let layout = generate_layout(33, 12, 12, 6).unwrap();
        let mut spawn_rng = child_rng(33, Stream::Spawn, 0);
        let mut rng = child_rng(34, Stream::Rollout, 0);
        let params = EnvParams {
            episode_length: usize::MAX,
            stochastic: false,
        };
        let non_climb = [
            Action::Up,
            Action::Down,
            Action::Left,
            Action::Right,
            Action::PickUp,
            Action::Drop,
            Action::Stay,
        ];
        for _ in 0..10 {
            let spawn = uniform_spawn(&mut spawn_rng, &layout).unwrap();
            let mut state = reset(&spawn, &params, &mut rng);
            let home = layout.room_id(state.agent);
            for _ in 0..1000 {
                let action = non_climb[rng.gen_range(0..non_climb.len())];
                let (next, _) = step(&state, &layout, &params, action).unwrap();
                state = next;
                assert_eq!(layout.room_id(state.agent), home);
                // Ramp conservation: carrying implies co-location.
                if state.carrying_ramp {
                    assert_eq!(state.agent, state.ramp);
                }
            }
        }
    }
}
