//! Episode dynamics: movement, the ramp mechanic, proximity reward, and the
//! stochastic-reward variant.
//!
//! Climbing crosses an interior wall edge while carrying the ramp and leaves
//! the ramp behind on the origin cell, so a wall crossing is a one-way
//! commitment. Reward is +1 per step whenever the agent is within Chebyshev
//! distance 1 of the box *inside the same room*; proximity across a wall
//! never pays.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::env::layout::{Cell, Dir, MazeLayout};
use crate::env::spawn::SpawnSpec;
use crate::error::{Error, Result};

/// The student's discrete action set, in categorical-head order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Up,
    Down,
    Left,
    Right,
    PickUp,
    Drop,
    ClimbUp,
    ClimbDown,
    ClimbLeft,
    ClimbRight,
    Stay,
}

impl Action {
    pub const COUNT: usize = 11;
    pub const ALL: [Action; Action::COUNT] = [
        Action::Up,
        Action::Down,
        Action::Left,
        Action::Right,
        Action::PickUp,
        Action::Drop,
        Action::ClimbUp,
        Action::ClimbDown,
        Action::ClimbLeft,
        Action::ClimbRight,
        Action::Stay,
    ];

    pub fn index(&self) -> usize {
        Action::ALL.iter().position(|a| a == self).unwrap()
    }

    pub fn from_index(index: usize) -> Option<Action> {
        Action::ALL.get(index).copied()
    }

    pub fn label(&self) -> &'static str {
        match self {
            Action::Up => "up",
            Action::Down => "down",
            Action::Left => "left",
            Action::Right => "right",
            Action::PickUp => "pickup",
            Action::Drop => "drop",
            Action::ClimbUp => "climb-up",
            Action::ClimbDown => "climb-down",
            Action::ClimbLeft => "climb-left",
            Action::ClimbRight => "climb-right",
            Action::Stay => "stay",
        }
    }

    pub fn from_label(label: &str) -> Option<Action> {
        Action::ALL.iter().find(|a| a.label() == label).copied()
    }

    fn move_dir(&self) -> Option<Dir> {
        match self {
            Action::Up => Some(Dir::Up),
            Action::Down => Some(Dir::Down),
            Action::Left => Some(Dir::Left),
            Action::Right => Some(Dir::Right),
            _ => None,
        }
    }

    fn climb_dir(&self) -> Option<Dir> {
        match self {
            Action::ClimbUp => Some(Dir::Up),
            Action::ClimbDown => Some(Dir::Down),
            Action::ClimbLeft => Some(Dir::Left),
            Action::ClimbRight => Some(Dir::Right),
            _ => None,
        }
    }
}

/// Fixed per-episode parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvParams {
    pub episode_length: usize,
    /// When set, episode rewards are doubled or zeroed by a per-episode coin.
    pub stochastic: bool,
}

impl Default for EnvParams {
    fn default() -> Self {
        Self {
            episode_length: 64,
            stochastic: false,
        }
    }
}

/// Mutable episode state. Value-like: copying is cheap and stepping returns
/// a fresh state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnvState {
    pub agent: Cell,
    pub ramp: Cell,
    pub carrying_ramp: bool,
    pub box_cell: Cell,
    /// Step index in [0, episode_length).
    pub t: usize,
    /// Bernoulli(0.5) outcome for the stochastic-reward variant.
    pub reward_flag: bool,
}

/// Starts an episode. The reward coin is drawn here (once per episode) when
/// the stochastic variant is active; deterministic episodes pin it to 1 so
/// the flag never influences them.
pub fn reset(spawn: &SpawnSpec, params: &EnvParams, rng: &mut ChaCha8Rng) -> EnvState {
    let reward_flag = if params.stochastic {
        rng.gen::<f64>() < 0.5
    } else {
        true
    };
    EnvState {
        agent: spawn.agent,
        ramp: spawn.ramp,
        carrying_ramp: false,
        box_cell: spawn.box_cell,
        t: 0,
        reward_flag,
    }
}

/// Doubles or zeroes a raw reward according to the episode coin.
pub fn stochastic_reward(raw_reward: f64, reward_flag: bool) -> f64 {
    if reward_flag {
        2.0 * raw_reward
    } else {
        0.0
    }
}

/// True when the agent earns the proximity reward in `state`.
pub fn near_box(state: &EnvState, layout: &MazeLayout) -> bool {
    state.agent.chebyshev(&state.box_cell) <= 1
        && layout.room_id(state.agent) == layout.room_id(state.box_cell)
}

/// Advances one step. Blocked moves and inapplicable pickups/climbs are
/// no-ops that still consume the step.
pub fn step(
    state: &EnvState,
    layout: &MazeLayout,
    params: &EnvParams,
    action: Action,
) -> Result<(EnvState, f64)> {
    if state.t >= params.episode_length {
        return Err(Error::EpisodeOver(state.t));
    }
    let mut next = *state;

    if let Some(dir) = action.move_dir() {
        if !layout.has_wall(next.agent, dir) {
            next.agent = layout.neighbor(next.agent, dir).expect("open edge has a far cell");
            if next.carrying_ramp {
                next.ramp = next.agent;
            }
        }
    } else if let Some(dir) = action.climb_dir() {
        if next.carrying_ramp && layout.has_interior_wall(next.agent, dir) {
            let origin = next.agent;
            next.agent = layout.neighbor(next.agent, dir).expect("interior wall has a far cell");
            next.ramp = origin;
            next.carrying_ramp = false;
        }
    } else {
        match action {
            Action::PickUp => {
                if !next.carrying_ramp && next.agent == next.ramp {
                    next.carrying_ramp = true;
                }
            }
            Action::Drop => {
                // Ramp stays wherever the agent is standing.
                next.carrying_ramp = false;
            }
            Action::Stay => {}
            _ => unreachable!("movement and climb handled above"),
        }
    }

    next.t += 1;
    let raw = if near_box(&next, layout) { 1.0 } else { 0.0 };
    let reward = if params.stochastic {
        stochastic_reward(raw, next.reward_flag)
    } else {
        raw
    };
    Ok((next, reward))
}

/// Flat observation vector: normalized agent/box/ramp coordinates, the
/// carrying flag, normalized episode time, and the four adjacent-wall bits.
pub const OBSERVATION_DIM: usize = 12;

pub fn observe(state: &EnvState, layout: &MazeLayout, params: &EnvParams) -> Vec<f64> {
    let h = layout.height() as f64;
    let w = layout.width() as f64;
    let norm = |cell: &Cell| (cell.row as f64 / h, cell.col as f64 / w);
    let (ar, ac) = norm(&state.agent);
    let (br, bc) = norm(&state.box_cell);
    let (rr, rc) = norm(&state.ramp);
    let mut obs = Vec::with_capacity(OBSERVATION_DIM);
    obs.extend_from_slice(&[ar, ac, br, bc, rr, rc]);
    obs.push(if state.carrying_ramp { 1.0 } else { 0.0 });
    obs.push(state.t as f64 / params.episode_length as f64);
    for dir in Dir::ALL {
        obs.push(if layout.has_wall(state.agent, dir) { 1.0 } else { 0.0 });
    }
    obs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::layout::MazeLayout;
    use crate::env::spawn::SpawnSpec;
    use crate::seed::{child_rng, Stream};

    fn open_3x3() -> (MazeLayout, SpawnSpec, EnvParams) {
        let layout = MazeLayout::open(3, 3).unwrap();
        let spawn = SpawnSpec::new(Cell::new(0, 0), Cell::new(2, 2), Cell::new(0, 2)).unwrap();
        (layout, spawn, EnvParams::default())
    }

    fn rng() -> ChaCha8Rng {
        child_rng(0, Stream::Rollout, 0)
    }

    #[test]
    fn stay_next_to_box_earns_reward() {
        let (layout, _, params) = open_3x3();
        let spawn = SpawnSpec::new(Cell::new(1, 1), Cell::new(2, 2), Cell::new(0, 2)).unwrap();
        let state = reset(&spawn, &params, &mut rng());
        let (next, reward) = step(&state, &layout, &params, Action::Stay).unwrap();
        assert_eq!(reward, 1.0);
        assert_eq!(next.agent, Cell::new(1, 1));
        assert_eq!(next.t, 1);
    }

    #[test]
    fn blocked_move_is_a_noop() {
        let (layout, spawn, params) = open_3x3();
        let state = reset(&spawn, &params, &mut rng());
        let (next, reward) = step(&state, &layout, &params, Action::Up).unwrap();
        assert_eq!(next.agent, state.agent);
        assert_eq!(reward, 0.0);
    }

    #[test]
    fn proximity_across_wall_does_not_pay() {
        // 1x2 grid, wall between cells: Chebyshev distance 1 but rooms differ.
        let layout = MazeLayout::from_walls(1, 2, vec![true, false], vec![false, false]).unwrap();
        let spawn = SpawnSpec::new(Cell::new(0, 0), Cell::new(0, 1), Cell::new(0, 0)).ok();
        // Distinctness forces us to build the state directly here.
        assert!(spawn.is_none());
        let state = EnvState {
            agent: Cell::new(0, 0),
            ramp: Cell::new(0, 0),
            carrying_ramp: false,
            box_cell: Cell::new(0, 1),
            t: 0,
            reward_flag: true,
        };
        assert!(!near_box(&state, &layout));
    }

    #[test]
    fn pickup_carry_and_climb_crossing_leaves_ramp_behind() {
        // 1x2 grid with a wall between the cells; ramp under the agent.
        let layout = MazeLayout::from_walls(1, 2, vec![true, false], vec![false, false]).unwrap();
        let params = EnvParams::default();
        let mut state = EnvState {
            agent: Cell::new(0, 0),
            ramp: Cell::new(0, 0),
            carrying_ramp: false,
            box_cell: Cell::new(0, 1),
            t: 0,
            reward_flag: true,
        };

        // Climb without carrying: no-op.
        let (s, _) = step(&state, &layout, &params, Action::ClimbRight).unwrap();
        assert_eq!(s.agent, Cell::new(0, 0));

        let (s, _) = step(&state, &layout, &params, Action::PickUp).unwrap();
        assert!(s.carrying_ramp);
        state = s;

        // Carrying moves the ramp with the agent; here it is pinned by walls,
        // so climb across the interior wall instead.
        let (s, reward) = step(&state, &layout, &params, Action::ClimbRight).unwrap();
        assert_eq!(s.agent, Cell::new(0, 1));
        assert_eq!(s.ramp, Cell::new(0, 0), "ramp stays on the origin side");
        assert!(!s.carrying_ramp);
        // Crossed into the box's room and landed on... the box cell itself is
        // the agent cell here, Chebyshev 0, same room.
        assert_eq!(reward, 1.0);
    }

    #[test]
    fn carrying_moves_ramp_with_agent() {
        let (layout, _, params) = open_3x3();
        let state = EnvState {
            agent: Cell::new(0, 2),
            ramp: Cell::new(0, 2),
            carrying_ramp: true,
            box_cell: Cell::new(2, 2),
            t: 0,
            reward_flag: true,
        };
        let (s, _) = step(&state, &layout, &params, Action::Left).unwrap();
        assert_eq!(s.agent, Cell::new(0, 1));
        assert_eq!(s.ramp, Cell::new(0, 1));
        let (s2, _) = step(&s, &layout, &params, Action::Drop).unwrap();
        assert!(!s2.carrying_ramp);
        assert_eq!(s2.ramp, Cell::new(0, 1));
    }

    #[test]
    fn climbing_the_boundary_is_impossible() {
        let (layout, _, params) = open_3x3();
        let state = EnvState {
            agent: Cell::new(0, 0),
            ramp: Cell::new(0, 0),
            carrying_ramp: true,
            box_cell: Cell::new(2, 2),
            t: 0,
            reward_flag: true,
        };
        let (s, _) = step(&state, &layout, &params, Action::ClimbUp).unwrap();
        assert_eq!(s.agent, Cell::new(0, 0));
        assert!(s.carrying_ramp, "failed climb keeps the ramp");
    }

    #[test]
    fn step_after_episode_end_errors() {
        let (layout, spawn, params) = open_3x3();
        let mut state = reset(&spawn, &params, &mut rng());
        state.t = params.episode_length;
        assert!(matches!(
            step(&state, &layout, &params, Action::Stay),
            Err(Error::EpisodeOver(_))
        ));
    }

    #[test]
    fn stochastic_reward_doubles_or_zeroes() {
        assert_eq!(stochastic_reward(1.0, true), 2.0);
        assert_eq!(stochastic_reward(1.0, false), 0.0);
        // Expectation over the fair coin equals the raw reward.
        assert_eq!((stochastic_reward(1.0, true) + stochastic_reward(1.0, false)) / 2.0, 1.0);
    }

    #[test]
    fn reward_coin_frequency_is_half() {
        let (_, spawn, _) = open_3x3();
        let params = EnvParams {
            stochastic: true,
            ..EnvParams::default()
        };
        let mut r = rng();
        let hits = (0..100_000)
            .filter(|_| reset(&spawn, &params, &mut r).reward_flag)
            .count();
        let freq = hits as f64 / 100_000.0;
        assert!((freq - 0.5).abs() < 0.01, "freq = {freq}");
    }

    #[test]
    fn observation_layout_and_time_feature() {
        let (layout, spawn, params) = open_3x3();
        let mut state = reset(&spawn, &params, &mut rng());
        let obs = observe(&state, &layout, &params);
        assert_eq!(obs.len(), OBSERVATION_DIM);
        assert_eq!(obs[7], 0.0);
        state.t = params.episode_length - 1;
        let obs = observe(&state, &layout, &params);
        let expected = (params.episode_length - 1) as f64 / params.episode_length as f64;
        assert_eq!(obs[7], expected);
        // Agent at (0,0): walls up and left.
        assert_eq!(&obs[8..12], &[1.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn carrying_makes_ramp_features_track_agent() {
        let (layout, _, params) = open_3x3();
        let state = EnvState {
            agent: Cell::new(1, 2),
            ramp: Cell::new(1, 2),
            carrying_ramp: true,
            box_cell: Cell::new(2, 2),
            t: 3,
            reward_flag: true,
        };
        let obs = observe(&state, &layout, &params);
        assert_eq!(obs[0], obs[4]);
        assert_eq!(obs[1], obs[5]);
        assert_eq!(obs[6], 1.0);
        // Determinism: identical state, identical vector.
        assert_eq!(obs, observe(&state, &layout, &params));
    }
}
