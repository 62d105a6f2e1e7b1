//! Temporary diagnostic: solvability of Hard instances and random-policy
//! success rates, via BFS over the exact step function.

use std::collections::{HashMap, VecDeque};

use autodime::env::{
    classify_difficulty, generate_layout, near_box, reset, step, uniform_spawn, Action, Difficulty,
    EnvParams, EnvState, MazeLayout,
};
use autodime::seed::{child_rng, Stream};
use rand::Rng;

fn state_key(s: &EnvState) -> (usize, usize, usize, usize, bool) {
    (s.agent.row, s.agent.col, s.ramp.row, s.ramp.col, s.carrying_ramp)
}

/// Minimum number of actions to reach a rewarded (post-step) state.
fn bfs_min_steps(layout: &MazeLayout, start: &EnvState) -> Option<usize> {
    let params = EnvParams {
        episode_length: usize::MAX,
        stochastic: false,
    };
    let mut dist = HashMap::new();
    let mut queue = VecDeque::new();
    let mut s0 = *start;
    s0.t = 0;
    dist.insert(state_key(&s0), 0usize);
    queue.push_back(s0);
    if near_box(&s0, layout) {
        return Some(0);
    }
    while let Some(state) = queue.pop_front() {
        let d = dist[&state_key(&state)];
        for action in Action::ALL {
            let (mut next, _) = step(&state, layout, &params, action).unwrap();
            next.t = 0;
            if near_box(&next, layout) {
                return Some(d + 1);
            }
            if !dist.contains_key(&state_key(&next)) {
                dist.insert(state_key(&next), d + 1);
                queue.push_back(next);
            }
        }
    }
    None
}

fn main() {
    let params = EnvParams::default();
    let mut spawn_rng = child_rng(500, Stream::Spawn, 0);
    let mut solvable = 0;
    let mut unsolvable = 0;
    let mut dists = Vec::new();
    let mut hard_instances = Vec::new();
    let mut seed = 0u64;
    while hard_instances.len() < 200 {
        let layout = generate_layout(seed, 12, 12, 6).unwrap();
        seed += 1;
        let spawn = uniform_spawn(&mut spawn_rng, &layout).unwrap();
        if classify_difficulty(&layout, &spawn) != Difficulty::Hard {
            continue;
        }
        let state = reset(&spawn, &params, &mut spawn_rng);
        match bfs_min_steps(&layout, &state) {
            Some(d) => {
                solvable += 1;
                dists.push(d);
                hard_instances.push((layout, spawn));
            }
            None => {
                unsolvable += 1;
                hard_instances.push((layout, spawn));
            }
        }
    }
    dists.sort_unstable();
    println!(
        "hard instances: {} solvable, {} unsolvable; min-steps median {} max {}",
        solvable,
        unsolvable,
        dists.get(dists.len() / 2).copied().unwrap_or(0),
        dists.last().copied().unwrap_or(0)
    );

    // Uniform-random policy success rate on solvable hard instances.
    let mut rng = child_rng(501, Stream::Rollout, 0);
    let mut successes = 0usize;
    let mut episodes = 0usize;
    for (layout, spawn) in &hard_instances {
        for _ in 0..20 {
            let mut state = reset(spawn, &params, &mut rng);
            let mut total = 0.0;
            for _ in 0..params.episode_length {
                let action = Action::ALL[rng.gen_range(0..Action::COUNT)];
                let (next, r) = step(&state, layout, &params, action).unwrap();
                total += r;
                state = next;
            }
            episodes += 1;
            if total > 0.0 {
                successes += 1;
            }
        }
    }
    println!(
        "random policy on hard: {successes}/{episodes} episodes with positive return ({:.4})",
        successes as f64 / episodes as f64
    );
}
