//! The teacher-student training loop.
//!
//! Each iteration: sample a batch of fresh mazes from the stationary
//! generator, place spawns (teacher policy or literal uniform), roll out the
//! student, score each episode with the configured intrinsic teacher reward,
//! update the student with PPO + cloning, update the teacher with
//! single-timestep PPO, and log one row.

use crate::agent::rollout::collect_episode;
use crate::agent::student::StudentBundle;
use crate::env::layout::generate_layout_with;
use crate::env::sim::{Action, OBSERVATION_DIM};
use crate::env::spawn::{classify_difficulty, uniform_spawn, Difficulty};
use crate::error::Result;
use crate::harness::config::{ExperimentConfig, SpawnMode};
use crate::harness::eval::{evaluate_hard, sampling_probabilities, GreedyPolicy};
use crate::harness::logging::{ExperimentLog, LogRow, RowSink};
use crate::seed::{child_rng, Stream};
use crate::teacher::policy::{SpawnMasks, TeacherPolicy, TeacherTransition};
use crate::teacher::reward::{aggregate_teacher_reward, teacher_reward};

/// Final state of a run: the log plus both learners.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub log: ExperimentLog,
    pub student: StudentBundle,
    pub teacher: TeacherPolicy,
}

/// Runs the full loop for `cfg.iterations` iterations, streaming rows into
/// `sink` as they are produced. Fails fast on any module error; rows
/// produced before the failure have already been flushed by the sink.
pub fn autodime_loop(cfg: &ExperimentConfig, sink: &mut dyn RowSink) -> Result<TrainOutcome> {
    cfg.validate()?;
    let env_params = cfg.env.params();
    let mut student = StudentBundle::new(OBSERVATION_DIM, Action::COUNT, &cfg.student, cfg.seed)?;
    let mut teacher = TeacherPolicy::new(cfg.env.height, cfg.env.width, &cfg.teacher, cfg.seed)?;
    let masks = SpawnMasks::allow_all(cfg.env.height * cfg.env.width);

    let mut log = ExperimentLog::default();
    let mut eval_round: u64 = 0;

    for iter in 0..cfg.iterations {
        let mut batch = Vec::with_capacity(cfg.episodes_per_iter);
        let mut transitions: Vec<TeacherTransition> = Vec::new();
        let mut difficulties: Vec<Difficulty> = Vec::with_capacity(cfg.episodes_per_iter);
        let mut rewards = Vec::with_capacity(cfg.episodes_per_iter);

        for episode in 0..cfg.episodes_per_iter {
            let index = (iter * cfg.episodes_per_iter + episode) as u64;
            let mut layout_rng = child_rng(cfg.seed, Stream::LayoutGen, index);
            let layout =
                generate_layout_with(&mut layout_rng, cfg.env.height, cfg.env.width, cfg.env.rooms)?;

            let spawn = match cfg.spawn_mode {
                SpawnMode::Teacher => {
                    let mut act_rng = child_rng(cfg.seed, Stream::TeacherAct, index);
                    let transition = teacher.act(&layout, &masks, &mut act_rng)?;
                    let spawn = transition.spawn;
                    transitions.push(transition);
                    spawn
                }
                SpawnMode::Uniform => {
                    let mut spawn_rng = child_rng(cfg.seed, Stream::Spawn, index);
                    uniform_spawn(&mut spawn_rng, &layout)?
                }
            };
            difficulties.push(classify_difficulty(&layout, &spawn));

            let mut rollout_rng = child_rng(cfg.seed, Stream::Rollout, index);
            let traj = collect_episode(&student, &layout, &spawn, &env_params, &mut rollout_rng)?;

            // Single student per environment; the aggregation contract still
            // applies (mean over on-policy students).
            let episode_reward = teacher_reward(
                cfg.teacher_reward,
                &traj,
                &student.policy,
                &student.clone_policy,
            )?;
            let reward = aggregate_teacher_reward(&[episode_reward], &[true])?;
            rewards.push(reward);
            if let Some(tr) = transitions.last_mut() {
                tr.reward = reward;
            }
            batch.push(traj);
        }

        let mut shuffle_rng = child_rng(cfg.seed, Stream::StudentShuffle, iter as u64);
        let student_stats = student.student_update(&batch, &mut shuffle_rng)?;

        let teacher_entropy = match cfg.spawn_mode {
            SpawnMode::Teacher => {
                let mut teacher_rng = child_rng(cfg.seed, Stream::TeacherShuffle, iter as u64);
                let stats = teacher.update(&transitions, &masks, &mut teacher_rng)?;
                stats.entropy
            }
            SpawnMode::Uniform => f64::NAN,
        };

        let (p_easy, p_hard, p_impossible) = sampling_probabilities(&difficulties)?;
        let mean_return =
            batch.iter().map(|t| t.total_reward()).sum::<f64>() / batch.len() as f64;
        let teacher_reward_mean = rewards.iter().sum::<f64>() / rewards.len() as f64;

        let last_iteration = iter + 1 == cfg.iterations;
        let cadence_hit = cfg.eval_every > 0 && (iter + 1) % cfg.eval_every == 0;
        let eval_hard_return = if cadence_hit || last_iteration {
            let mut greedy = GreedyPolicy {
                policy: &student.policy,
            };
            let value = evaluate_hard(&mut greedy, &cfg.env, cfg.seed, eval_round, cfg.eval_episodes)?;
            eval_round += 1;
            Some(value)
        } else {
            None
        };

        let row = LogRow {
            iteration: iter + 1,
            p_easy,
            p_hard,
            p_impossible,
            teacher_reward: teacher_reward_mean,
            teacher_entropy,
            policy_loss: student_stats.policy_loss,
            value_loss: student_stats.value_loss,
            entropy: student_stats.entropy,
            clone_kl: student_stats.clone_kl,
            mean_return,
            eval_hard_return,
        };
        sink.row(&row)?;
        log.rows.push(row);
    }

    Ok(TrainOutcome {
        log,
        student,
        teacher,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::logging::NullSink;
    use crate::teacher::reward::TeacherRewardKind;

    fn tiny_config() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.iterations = 2;
        cfg.episodes_per_iter = 4;
        cfg.eval_every = 0;
        cfg.eval_episodes = 2;
        cfg.env.height = 6;
        cfg.env.width = 6;
        cfg.env.rooms = 3;
        cfg.env.episode_length = 8;
        cfg.student.hidden = vec![8];
        cfg.teacher.hidden = vec![16];
        cfg
    }

    #[test]
    fn zero_budget_yields_empty_log() {
        let mut cfg = tiny_config();
        cfg.iterations = 0;
        let outcome = autodime_loop(&cfg, &mut NullSink).unwrap();
        assert!(outcome.log.rows.is_empty());
    }

    #[test]
    fn rows_keep_the_probability_simplex_invariant() {
        let cfg = tiny_config();
        let outcome = autodime_loop(&cfg, &mut NullSink).unwrap();
        assert_eq!(outcome.log.rows.len(), 2);
        for row in &outcome.log.rows {
            let sum = row.p_easy + row.p_hard + row.p_impossible;
            assert!((sum - 1.0).abs() < 1e-9);
            // Final iteration always evaluates.
            if row.iteration == 2 {
                assert!(row.eval_hard_return.is_some());
            }
        }
    }

    #[test]
    fn identical_configs_produce_identical_logs() {
        let cfg = tiny_config();
        let a = autodime_loop(&cfg, &mut NullSink).unwrap();
        let b = autodime_loop(&cfg, &mut NullSink).unwrap();
        assert_eq!(a.log, b.log);
        assert_eq!(a.log.to_csv(), b.log.to_csv());
    }

    #[test]
    fn uniform_mode_skips_teacher_and_flags_entropy() {
        let mut cfg = tiny_config();
        cfg.spawn_mode = SpawnMode::Uniform;
        cfg.teacher_reward = TeacherRewardKind::Constant;
        let outcome = autodime_loop(&cfg, &mut NullSink).unwrap();
        for row in &outcome.log.rows {
            assert!(row.teacher_entropy.is_nan());
            assert_eq!(row.teacher_reward, 1.0);
        }
    }
}
