//! Channelized occupancy maps: the teacher's view of an environment.
//!
//! Five H*W channels: right-wall edges, down-wall edges, agent, box, ramp.
//! The wall channels alone describe the layout; the object channels are
//! one-hot. The encoding is invertible back to (layout, spawn).

use crate::env::layout::{Cell, MazeLayout};
use crate::env::spawn::SpawnSpec;
use crate::error::{Error, Result};

pub const CHANNELS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyMap {
    height: usize,
    width: usize,
    /// Channel-major: data[ch * H * W + r * W + c].
    data: Vec<f64>,
}

impl OccupancyMap {
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Full flattened tensor, channel-major.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// The two wall channels only: what the teacher observes before placing
    /// anything.
    pub fn layout_features(&self) -> &[f64] {
        &self.data[..2 * self.height * self.width]
    }

    pub fn channel(&self, ch: usize) -> &[f64] {
        let hw = self.height * self.width;
        &self.data[ch * hw..(ch + 1) * hw]
    }
}

/// Number of inputs a teacher network sees for an H x W grid.
pub fn layout_feature_dim(height: usize, width: usize) -> usize {
    2 * height * width
}

/// Wall channels for a bare layout (no spawn yet), matching the first two
/// channels of [`render_occupancy`].
pub fn layout_features(layout: &MazeLayout) -> Vec<f64> {
    let hw = layout.num_cells();
    let mut data = vec![0.0; 2 * hw];
    for (i, &w) in layout.wall_right_bits().iter().enumerate() {
        data[i] = if w { 1.0 } else { 0.0 };
    }
    for (i, &w) in layout.wall_down_bits().iter().enumerate() {
        data[hw + i] = if w { 1.0 } else { 0.0 };
    }
    data
}

/// Encodes a (layout, spawn) pair into channels.
pub fn render_occupancy(layout: &MazeLayout, spawn: &SpawnSpec) -> OccupancyMap {
    let hw = layout.num_cells();
    let mut data = vec![0.0; CHANNELS * hw];
    data[..2 * hw].copy_from_slice(&layout_features(layout));
    data[2 * hw + spawn.agent.index(layout.width())] = 1.0;
    data[3 * hw + spawn.box_cell.index(layout.width())] = 1.0;
    data[4 * hw + spawn.ramp.index(layout.width())] = 1.0;
    OccupancyMap {
        height: layout.height(),
        width: layout.width(),
        data,
    }
}

/// Inverts [`render_occupancy`].
pub fn decode_occupancy(map: &OccupancyMap) -> Result<(MazeLayout, SpawnSpec)> {
    let hw = map.height * map.width;
    let to_bits = |ch: &[f64]| ch.iter().map(|&v| v != 0.0).collect::<Vec<bool>>();
    let layout = MazeLayout::from_walls(
        map.height,
        map.width,
        to_bits(map.channel(0)),
        to_bits(map.channel(1)),
    )?;
    let one_hot = |ch: usize, what: &str| -> Result<Cell> {
        let slice = map.channel(ch);
        let hot: Vec<usize> = (0..hw).filter(|&i| slice[i] != 0.0).collect();
        if hot.len() != 1 {
            return Err(Error::Parse(format!(
                "{what} channel must have exactly one hot cell, found {}",
                hot.len()
            )));
        }
        Ok(layout.cell_from_index(hot[0]))
    };
    let spawn = SpawnSpec::new(
        one_hot(2, "agent")?,
        one_hot(3, "box")?,
        one_hot(4, "ramp")?,
    )?;
    Ok((layout, spawn))
}
