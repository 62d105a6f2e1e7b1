//! Doorless grid mazes.
//!
//! Walls sit on edges between orthogonally adjacent cells; the outer boundary
//! is always walled. Rooms are the connected components of the open-edge
//! graph, derived from the wall set by flood fill so the wall set stays the
//! single source of truth.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::seed::{child_rng, Stream};

/// A grid coordinate (row, col).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    pub fn index(&self, width: usize) -> usize {
        self.row * width + self.col
    }

    pub fn chebyshev(&self, other: &Cell) -> usize {
        let dr = self.row.abs_diff(other.row);
        let dc = self.col.abs_diff(other.col);
        dr.max(dc)
    }
}

/// The four movement directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    Up,
    Down,
    Left,
    Right,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::Up, Dir::Down, Dir::Left, Dir::Right];
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MazeLayout {
    height: usize,
    width: usize,
    /// wall_right[r*W + c]: wall between (r, c) and (r, c+1). Last column unused.
    wall_right: Vec<bool>,
    /// wall_down[r*W + c]: wall between (r, c) and (r+1, c). Last row unused.
    wall_down: Vec<bool>,
    room_ids: Vec<usize>,
    room_count: usize,
}

impl MazeLayout {
    /// Builds a layout from explicit wall bitmaps; rooms are recomputed.
    pub fn from_walls(
        height: usize,
        width: usize,
        wall_right: Vec<bool>,
        wall_down: Vec<bool>,
    ) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidConfig("grid dimensions must be positive".into()));
        }
        if wall_right.len() != height * width || wall_down.len() != height * width {
            return Err(Error::ShapeMismatch {
                context: "MazeLayout::from_walls",
                expected: height * width,
                got: wall_right.len().min(wall_down.len()),
            });
        }
        let mut layout = Self {
            height,
            width,
            wall_right,
            wall_down,
            room_ids: vec![usize::MAX; height * width],
            room_count: 0,
        };
        layout.label_rooms();
        Ok(layout)
    }

    /// Single open room covering the whole grid.
    pub fn open(height: usize, width: usize) -> Result<Self> {
        Self::from_walls(
            height,
            width,
            vec![false; height * width],
            vec![false; height * width],
        )
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn num_cells(&self) -> usize {
        self.height * self.width
    }

    pub fn room_count(&self) -> usize {
        self.room_count
    }

    pub fn room_id(&self, cell: Cell) -> usize {
        self.room_ids[cell.index(self.width)]
    }

    pub fn cell_from_index(&self, index: usize) -> Cell {
        Cell::new(index / self.width, index % self.width)
    }

    pub fn in_bounds(&self, row: isize, col: isize) -> bool {
        row >= 0 && col >= 0 && (row as usize) < self.height && (col as usize) < self.width
    }

    /// True if a wall edge (including the outer boundary) blocks movement
    /// from `cell` in direction `dir`.
    pub fn has_wall(&self, cell: Cell, dir: Dir) -> bool {
        let (r, c) = (cell.row, cell.col);
        match dir {
            Dir::Up => r == 0 || self.wall_down[(r - 1) * self.width + c],
            Dir::Down => r + 1 == self.height || self.wall_down[r * self.width + c],
            Dir::Left => c == 0 || self.wall_right[r * self.width + c - 1],
            Dir::Right => c + 1 == self.width || self.wall_right[r * self.width + c],
        }
    }

    /// True if there is an interior wall edge in `dir`, i.e. a wall with a
    /// grid cell on the far side (climbable, unlike the boundary).
    pub fn has_interior_wall(&self, cell: Cell, dir: Dir) -> bool {
        self.neighbor(cell, dir).is_some() && self.has_wall(cell, dir)
    }

    /// The adjacent cell in `dir`, if inside the grid (walls ignored).
    pub fn neighbor(&self, cell: Cell, dir: Dir) -> Option<Cell> {
        let (r, c) = (cell.row as isize, cell.col as isize);
        let (nr, nc) = match dir {
            Dir::Up => (r - 1, c),
            Dir::Down => (r + 1, c),
            Dir::Left => (r, c - 1),
            Dir::Right => (r, c + 1),
        };
        self.in_bounds(nr, nc)
            .then(|| Cell::new(nr as usize, nc as usize))
    }

    /// Interior wall edges as ((r, c), (r', c')) pairs, row-major order.
    pub fn wall_edges(&self) -> Vec<(Cell, Cell)> {
        let mut edges = Vec::new();
        for r in 0..self.height {
            for c in 0..self.width {
                if c + 1 < self.width && self.wall_right[r * self.width + c] {
                    edges.push((Cell::new(r, c), Cell::new(r, c + 1)));
                }
                if r + 1 < self.height && self.wall_down[r * self.width + c] {
                    edges.push((Cell::new(r, c), Cell::new(r + 1, c)));
                }
            }
        }
        edges
    }

    /// Room labels by flood fill in row-major discovery order.
    fn label_rooms(&mut self) {
        self.room_ids.fill(usize::MAX);
        let mut next_id = 0;
        let mut stack = Vec::new();
        for start in 0..self.num_cells() {
            if self.room_ids[start] != usize::MAX {
                continue;
            }
            stack.push(start);
            self.room_ids[start] = next_id;
            while let Some(idx) = stack.pop() {
                let cell = self.cell_from_index(idx);
                for dir in Dir::ALL {
                    if self.has_wall(cell, dir) {
                        continue;
                    }
                    if let Some(n) = self.neighbor(cell, dir) {
                        let ni = n.index(self.width);
                        if self.room_ids[ni] == usize::MAX {
                            self.room_ids[ni] = next_id;
                            stack.push(ni);
                        }
                    }
                }
            }
            next_id += 1;
        }
        self.room_count = next_id;
    }

    pub(crate) fn wall_right_bits(&self) -> &[bool] {
        &self.wall_right
    }

    pub(crate) fn wall_down_bits(&self) -> &[bool] {
        &self.wall_down
    }
}

#[derive(Debug, Clone, Copy)]
struct Region {
    top: usize,
    left: usize,
    height: usize,
    width: usize,
}

impl Region {
    fn area(&self) -> usize {
        self.height * self.width
    }
}

/// Generates a doorless maze with exactly `target_rooms` rooms by recursive
/// binary splitting. The largest region is split next (ties to the earliest
/// created); the split axis follows the longer dimension and the split index
/// is drawn uniformly from the seeded generator.
pub fn generate_layout(seed: u64, height: usize, width: usize, target_rooms: usize) -> Result<MazeLayout> {
    let mut rng = child_rng(seed, Stream::LayoutGen, 0);
    generate_layout_with(&mut rng, height, width, target_rooms)
}

/// Same as [`generate_layout`] but drawing from a caller-provided stream.
pub fn generate_layout_with(
    rng: &mut ChaCha8Rng,
    height: usize,
    width: usize,
    target_rooms: usize,
) -> Result<MazeLayout> {
    if target_rooms < 1 {
        return Err(Error::Infeasible("target_rooms must be >= 1".into()));
    }
    if height * width < 4 * target_rooms {
        return Err(Error::Infeasible(format!(
            "{height}x{width} grid cannot hold {target_rooms} rooms (need H*W >= 4*rooms)"
        )));
    }

    let mut wall_right = vec![false; height * width];
    let mut wall_down = vec![false; height * width];
    let mut regions = vec![Region {
        top: 0,
        left: 0,
        height,
        width,
    }];

    while regions.len() < target_rooms {
        // Pick the region to split with probability proportional to the
        // square of its splittable area (a 1x1 region cannot be cut again).
        // Squaring favors big regions enough to avoid sliver-dominated
        // mazes while keeping a realistic spread of room sizes.
        let weight = |reg: &Region| {
            if reg.area() >= 2 {
                (reg.area() * reg.area()) as u64
            } else {
                0
            }
        };
        let total: u64 = regions.iter().map(weight).sum();
        debug_assert!(total > 0, "feasibility guaranteed by precondition");
        let mut ticket = rng.gen_range(0..total);
        let mut ri = 0;
        for (i, reg) in regions.iter().enumerate() {
            let wgt = weight(reg);
            if ticket < wgt {
                ri = i;
                break;
            }
            ticket -= wgt;
        }
        let reg = regions[ri];
        debug_assert!(reg.area() >= 2, "feasibility guaranteed by precondition");

        if reg.height >= reg.width {
            // Horizontal cut: wall between rows (top+k-1) and (top+k).
            let k = rng.gen_range(1..reg.height);
            let wall_row = reg.top + k - 1;
            for c in reg.left..reg.left + reg.width {
                wall_down[wall_row * width + c] = true;
            }
            regions[ri] = Region {
                height: k,
                ..reg
            };
            regions.push(Region {
                top: reg.top + k,
                height: reg.height - k,
                ..reg
            });
        } else {
            // Vertical cut: wall between cols (left+k-1) and (left+k).
            let k = rng.gen_range(1..reg.width);
            let wall_col = reg.left + k - 1;
            for r in reg.top..reg.top + reg.height {
                wall_right[r * width + wall_col] = true;
            }
            regions[ri] = Region {
                width: k,
                ..reg
            };
            regions.push(Region {
                left: reg.left + k,
                width: reg.width - k,
                ..reg
            });
        }
    }

    let layout = MazeLayout::from_walls(height, width, wall_right, wall_down)?;
    debug_assert_eq!(layout.room_count(), target_rooms);
    Ok(layout)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn single_room_has_no_interior_walls() {
        let layout = generate_layout(1, 6, 6, 1).unwrap();
        assert_eq!(layout.room_count(), 1);
        assert!(layout.wall_edges().is_empty());
        for idx in 0..layout.num_cells() {
            assert_eq!(layout.room_ids[idx], 0);
        }
    }

    #[test]
    fn rooms_partition_grid_and_are_wall_separated() {
        for seed in 0..50 {
            let layout = generate_layout(seed, 12, 12, 6).unwrap();
            assert_eq!(layout.room_count(), 6);
            // Every cell labeled.
            assert!(layout.room_ids.iter().all(|&id| id < 6));
            // No open edge crosses rooms; flood fill already guarantees this,
            // so check the converse: every wall edge separates distinct rooms
            // or lies inside... walls may also exist inside a room only if
            // splitting created them, which it cannot. Check both directions.
            for r in 0..12 {
                for c in 0..12 {
                    let cell = Cell::new(r, c);
                    for dir in [Dir::Right, Dir::Down] {
                        if let Some(n) = layout.neighbor(cell, dir) {
                            let same = layout.room_id(cell) == layout.room_id(n);
                            let wall = layout.has_wall(cell, dir);
                            assert_eq!(same, !wall, "cell {cell:?} dir {dir:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let a = generate_layout(42, 12, 12, 6).unwrap();
        let b = generate_layout(42, 12, 12, 6).unwrap();
        assert_eq!(a, b);
        let c = generate_layout(43, 12, 12, 6).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn layouts_are_diverse_across_seeds() {
        let mut distinct = HashSet::new();
        for seed in 0..1000 {
            let layout = generate_layout(seed, 12, 12, 6).unwrap();
            distinct.insert((layout.wall_right.clone(), layout.wall_down.clone()));
        }
        assert!(distinct.len() >= 900, "only {} distinct wall sets", distinct.len());
    }

    #[test]
    fn infeasible_room_counts_rejected() {
        assert!(matches!(generate_layout(0, 4, 4, 0), Err(Error::Infeasible(_))));
        assert!(matches!(generate_layout(0, 4, 4, 5), Err(Error::Infeasible(_))));
        assert!(generate_layout(0, 4, 4, 4).is_ok());
    }

    #[test]
    fn boundary_is_walled() {
        let layout = MazeLayout::open(3, 3).unwrap();
        assert!(layout.has_wall(Cell::new(0, 0), Dir::Up));
        assert!(layout.has_wall(Cell::new(0, 0), Dir::Left));
        assert!(layout.has_wall(Cell::new(2, 2), Dir::Down));
        assert!(layout.has_wall(Cell::new(2, 2), Dir::Right));
        assert!(!layout.has_wall(Cell::new(1, 1), Dir::Up));
        assert!(!layout.has_interior_wall(Cell::new(0, 0), Dir::Up));
    }
}
