//! Procedurally generated doorless grid mazes with a movable ramp.

pub mod layout;
pub mod occupancy;
pub mod sim;
pub mod spawn;
pub mod text;

pub use layout::{generate_layout, generate_layout_with, Cell, Dir, MazeLayout};
pub use occupancy::{
    decode_occupancy, layout_feature_dim, layout_features, render_occupancy, OccupancyMap,
};
pub use sim::{
    near_box, observe, reset, step, stochastic_reward, Action, EnvParams, EnvState,
    OBSERVATION_DIM,
};
pub use spawn::{classify_difficulty, uniform_spawn, Difficulty, SpawnSpec};
pub use text::{instance_from_line, instance_to_line, render_ascii, Replay};
