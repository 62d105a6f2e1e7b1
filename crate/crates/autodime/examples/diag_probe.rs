//! Temporary diagnostic: per-difficulty returns and policy entropy.

use autodime::agent::{collect_episode, StudentBundle};
use autodime::env::{
    classify_difficulty, generate_layout_with, uniform_spawn, Action, Difficulty, OBSERVATION_DIM,
};
use autodime::harness::ExperimentConfig;
use autodime::seed::{child_rng, Stream};
use autodime::teacher::{teacher_reward, SpawnMasks, TeacherPolicy};

fn main() {
    let mut args = std::env::args().skip(1);
    let iterations: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(150);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);

    let cfg = ExperimentConfig::default();
    let env_params = cfg.env.params();
    let mut student =
        StudentBundle::new(OBSERVATION_DIM, Action::COUNT, &cfg.student, seed).unwrap();
    let mut teacher = TeacherPolicy::new(cfg.env.height, cfg.env.width, &cfg.teacher, seed).unwrap();
    let masks = SpawnMasks::allow_all(cfg.env.height * cfg.env.width);

    for iter in 0..iterations {
        let mut batch = Vec::new();
        let mut transitions = Vec::new();
        let mut per_diff: [(f64, usize, f64); 3] = [(0.0, 0, 0.0); 3]; // sum, count, max
        let mut hard_agent_on_ramp = 0usize;
        let mut hard_solved = 0usize;

        for episode in 0..cfg.episodes_per_iter {
            let index = (iter * cfg.episodes_per_iter + episode) as u64;
            let mut layout_rng = child_rng(seed, Stream::LayoutGen, index);
            let layout =
                generate_layout_with(&mut layout_rng, cfg.env.height, cfg.env.width, cfg.env.rooms)
                    .unwrap();
            let mut act_rng = child_rng(seed, Stream::TeacherAct, index);
            let mut tr = teacher.act(&layout, &masks, &mut act_rng).unwrap();
            let spawn = tr.spawn;
            let difficulty = classify_difficulty(&layout, &spawn);
            let mut rollout_rng = child_rng(seed, Stream::Rollout, index);
            let traj = collect_episode(&student, &layout, &spawn, &env_params, &mut rollout_rng)
                .unwrap();
            let ret = traj.total_reward();
            let d = match difficulty {
                Difficulty::Easy => 0,
                Difficulty::Hard => 1,
                Difficulty::Impossible => 2,
            };
            per_diff[d].0 += ret;
            per_diff[d].1 += 1;
            per_diff[d].2 = per_diff[d].2.max(ret);
            if difficulty == Difficulty::Hard {
                if spawn.agent.chebyshev(&spawn.ramp) <= 1 {
                    hard_agent_on_ramp += 1;
                }
                if ret > 0.0 {
                    hard_solved += 1;
                }
            }
            tr.reward = teacher_reward(
                cfg.teacher_reward,
                &traj,
                &student.policy,
                &student.clone_policy,
            )
            .unwrap();
            transitions.push(tr);
            batch.push(traj);
        }
        let mut shuffle_rng = child_rng(seed, Stream::StudentShuffle, iter as u64);
        let stats = student.student_update(&batch, &mut shuffle_rng).unwrap();
        let mut teacher_rng = child_rng(seed, Stream::TeacherShuffle, iter as u64);
        teacher.update(&transitions, &masks, &mut teacher_rng).unwrap();
        let _ = uniform_spawn; // keep import

        if (iter + 1) % 10 == 0 {
            let fmt = |d: usize| {
                if per_diff[d].1 == 0 {
                    "   -  ".to_string()
                } else {
                    format!("{:6.2}", per_diff[d].0 / per_diff[d].1 as f64)
                }
            };
            println!(
                "iter {:4} H={:.2} ent={:.3} kl={:.4} | mean ret E={} H={} I={} | maxH={:5.1} H_onramp={:2} H_solved={:2}/{:2}",
                iter + 1,
                transitions.len() as f64 / cfg.episodes_per_iter as f64,
                stats.entropy,
                stats.clone_kl,
                fmt(0),
                fmt(1),
                fmt(2),
                per_diff[1].2,
                hard_agent_on_ramp,
                hard_solved,
                per_diff[1].1,
            );
        }
    }
}
