//! Spawn placement and the three-way difficulty taxonomy.

use rand_chacha::ChaCha8Rng;

use crate::env::layout::{Cell, MazeLayout};
use crate::error::{Error, Result};

/// The teacher-controlled placements: agent, box and ramp cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpawnSpec {
    pub agent: Cell,
    pub box_cell: Cell,
    pub ramp: Cell,
}

impl SpawnSpec {
    pub fn new(agent: Cell, box_cell: Cell, ramp: Cell) -> Result<Self> {
        if agent == box_cell || agent == ramp || box_cell == ramp {
            return Err(Error::InvalidConfig(format!(
                "spawn cells must be distinct: agent {agent:?}, box {box_cell:?}, ramp {ramp:?}"
            )));
        }
        Ok(Self {
            agent,
            box_cell,
            ramp,
        })
    }

    pub fn cells(&self) -> [Cell; 3] {
        [self.agent, self.box_cell, self.ramp]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Difficulty {
    /// Agent shares a room with the box.
    Easy,
    /// Agent shares a room with the ramp only.
    Hard,
    /// Agent is in a room with neither box nor ramp.
    Impossible,
}

impl Difficulty {
    pub fn label(&self) -> &'static str {
        match self {
            Difficulty::Easy => "easy",
            Difficulty::Hard => "hard",
            Difficulty::Impossible => "impossible",
        }
    }
}

/// Draws three distinct cells uniformly without replacement.
pub fn uniform_spawn(rng: &mut ChaCha8Rng, layout: &MazeLayout) -> Result<SpawnSpec> {
    let n = layout.num_cells();
    if n < 3 {
        return Err(Error::Infeasible("grid needs at least 3 cells to spawn".into()));
    }
    let mut picks = [0usize; 3];
    for k in 0..3 {
        // Uniform over the remaining cells: draw from the reduced range and
        // skip over already-taken indices in sorted order.
        let mut taken: Vec<usize> = picks[..k].to_vec();
        taken.sort_unstable();
        let mut idx = rand::Rng::gen_range(rng, 0..n - k);
        for &t in &taken {
            if idx >= t {
                idx += 1;
            }
        }
        picks[k] = idx;
    }
    SpawnSpec::new(
        layout.cell_from_index(picks[0]),
        layout.cell_from_index(picks[1]),
        layout.cell_from_index(picks[2]),
    )
}

/// Classifies a spawn by which objects share the agent's room.
pub fn classify_difficulty(layout: &MazeLayout, spawn: &SpawnSpec) -> Difficulty {
    let agent_room = layout.room_id(spawn.agent);
    if agent_room == layout.room_id(spawn.box_cell) {
        Difficulty::Easy
    } else if agent_room == layout.room_id(spawn.ramp) {
        Difficulty::Hard
    } else {
        Difficulty::Impossible
    }
}
