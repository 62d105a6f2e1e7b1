//! Teacher-student curriculum training in procedurally generated grid mazes.
//!
//! A teacher policy places the agent, a goal box, and a movable ramp into a
//! doorless random maze, and is rewarded with intrinsic signals derived from
//! the student's prediction problems (value prediction error, value
//! disagreement, policy disagreement) or a constant baseline. The student is
//! a categorical-policy PPO learner with a two-member value ensemble and a
//! behaviorally cloned shadow policy.
//!
//! Start with the `examples/` directory: each file demonstrates one
//! capability (maze generation, rollouts and intrinsic rewards, training,
//! evaluation, replays). The `autodime` binary exposes the same machinery as
//! `train` / `eval` / `sweep` / `inspect` subcommands.

pub mod error;
pub mod seed;

pub mod agent;
pub mod env;
pub mod harness;
pub mod nn;
pub mod teacher;

pub use error::{Error, Result};
