//! Compact text serialization for environments and replays.
//!
//! An instance line carries dimensions, the interior wall-edge list and the
//! three spawn cells:
//!
//! ```text
//! 12x12 | 0,3-0,4 1,3-1,4 ... | agent=2,5 box=9,1 ramp=4,4
//! ```
//!
//! A replay file is an instance line, a `mode` line (`deterministic` or
//! `stochastic:<coin>`), and one action label per subsequent line. Round
//! trips are bit-exact: the grammar is integers and fixed labels only.

use std::fmt::Write as _;

use crate::env::layout::{Cell, MazeLayout};
use crate::env::sim::{Action, EnvState};
use crate::env::spawn::SpawnSpec;
use crate::error::{Error, Result};

/// Serializes a (layout, spawn) pair to one line.
pub fn instance_to_line(layout: &MazeLayout, spawn: &SpawnSpec) -> String {
    let mut line = format!("{}x{} |", layout.height(), layout.width());
    for (a, b) in layout.wall_edges() {
        write!(line, " {},{}-{},{}", a.row, a.col, b.row, b.col).unwrap();
    }
    write!(
        line,
        " | agent={},{} box={},{} ramp={},{}",
        spawn.agent.row,
        spawn.agent.col,
        spawn.box_cell.row,
        spawn.box_cell.col,
        spawn.ramp.row,
        spawn.ramp.col
    )
    .unwrap();
    line
}

fn parse_cell(text: &str, what: &str) -> Result<Cell> {
    let (r, c) = text
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("bad {what} cell '{text}'")))?;
    let row = r
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what} row '{r}'")))?;
    let col = c
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what} col '{c}'")))?;
    Ok(Cell::new(row, col))
}

/// Parses a line produced by [`instance_to_line`].
pub fn instance_from_line(line: &str) -> Result<(MazeLayout, SpawnSpec)> {
    let mut parts = line.split('|');
    let dims = parts
        .next()
        .ok_or_else(|| Error::Parse("missing dimensions".into()))?
        .trim();
    let walls = parts
        .next()
        .ok_or_else(|| Error::Parse("missing wall list".into()))?
        .trim();
    let spawn_part = parts
        .next()
        .ok_or_else(|| Error::Parse("missing spawn cells".into()))?
        .trim();
    if parts.next().is_some() {
        return Err(Error::Parse("too many '|' sections".into()));
    }

    let (h, w) = dims
        .split_once('x')
        .ok_or_else(|| Error::Parse(format!("bad dimensions '{dims}'")))?;
    let height: usize = h
        .parse()
        .map_err(|_| Error::Parse(format!("bad height '{h}'")))?;
    let width: usize = w
        .parse()
        .map_err(|_| Error::Parse(format!("bad width '{w}'")))?;

    let mut wall_right = vec![false; height * width];
    let mut wall_down = vec![false; height * width];
    for edge in walls.split_whitespace() {
        let (a, b) = edge
            .split_once('-')
            .ok_or_else(|| Error::Parse(format!("bad wall edge '{edge}'")))?;
        let a = parse_cell(a, "wall")?;
        let b = parse_cell(b, "wall")?;
        if a.row == b.row && a.col + 1 == b.col {
            wall_right[a.row * width + a.col] = true;
        } else if a.col == b.col && a.row + 1 == b.row {
            wall_down[a.row * width + a.col] = true;
        } else {
            return Err(Error::Parse(format!("non-adjacent wall edge '{edge}'")));
        }
    }
    let layout = MazeLayout::from_walls(height, width, wall_right, wall_down)?;

    let mut agent = None;
    let mut box_cell = None;
    let mut ramp = None;
    for field in spawn_part.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad spawn field '{field}'")))?;
        let cell = parse_cell(value, key)?;
        match key {
            "agent" => agent = Some(cell),
            "box" => box_cell = Some(cell),
            "ramp" => ramp = Some(cell),
            other => return Err(Error::Parse(format!("unknown spawn field '{other}'"))),
        }
    }
    let spawn = SpawnSpec::new(
        agent.ok_or_else(|| Error::Parse("missing agent cell".into()))?,
        box_cell.ok_or_else(|| Error::Parse("missing box cell".into()))?,
        ramp.ok_or_else(|| Error::Parse("missing ramp cell".into()))?,
    )?;
    Ok((layout, spawn))
}

/// A recorded episode: the instance, the reward mode and the action list.
#[derive(Debug, Clone, PartialEq)]
pub struct Replay {
    pub layout: MazeLayout,
    pub spawn: SpawnSpec,
    pub stochastic_coin: Option<bool>,
    pub actions: Vec<Action>,
}

impl Replay {
    pub fn to_text(&self) -> String {
        let mut out = instance_to_line(&self.layout, &self.spawn);
        out.push('\n');
        match self.stochastic_coin {
            None => out.push_str("deterministic\n"),
            Some(coin) => {
                writeln!(out, "stochastic:{}", if coin { 1 } else { 0 }).unwrap();
            }
        }
        for action in &self.actions {
            out.push_str(action.label());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Replay> {
        let mut lines = text.lines();
        let instance = lines
            .next()
            .ok_or_else(|| Error::Parse("empty replay".into()))?;
        let (layout, spawn) = instance_from_line(instance)?;
        let mode = lines
            .next()
            .ok_or_else(|| Error::Parse("missing reward-mode line".into()))?
            .trim();
        let stochastic_coin = match mode {
            "deterministic" => None,
            "stochastic:0" => Some(false),
            "stochastic:1" => Some(true),
            other => return Err(Error::Parse(format!("bad reward-mode line '{other}'"))),
        };
        let mut actions = Vec::new();
        for line in lines {
            let label = line.trim();
            if label.is_empty() {
                continue;
            }
            actions.push(
                Action::from_label(label)
                    .ok_or_else(|| Error::Parse(format!("unknown action '{label}'")))?,
            );
        }
        Ok(Replay {
            layout,
            spawn,
            stochastic_coin,
            actions,
        })
    }
}

/// ASCII frame of the grid: walls drawn between cells, objects as letters
/// (A agent, B box, R ramp; lowercase 'a' when the agent carries or shares a
/// cell with the ramp).
pub fn render_ascii(layout: &MazeLayout, state: &EnvState) -> String {
    let (h, w) = (layout.height(), layout.width());
    let mut out = String::new();
    out.push('+');
    for _ in 0..w {
        out.push_str("--+");
    }
    out.push('\n');
    for r in 0..h {
        out.push('|');
        for c in 0..w {
            let cell = Cell::new(r, c);
            let glyph = if state.agent == cell && state.ramp == cell {
                "a "
            } else if state.agent == cell {
                "A "
            } else if state.box_cell == cell {
                "B "
            } else if state.ramp == cell {
                "R "
            } else {
                "  "
            };
            out.push_str(glyph);
            let wall = c + 1 == w || layout.wall_right_bits()[r * w + c];
            out.push(if wall { '|' } else { ' ' });
        }
        out.push('\n');
        out.push('+');
        for c in 0..w {
            let wall = r + 1 == h || layout.wall_down_bits()[r * w + c];
            out.push_str(if wall { "--" } else { "  " });
            out.push('+');
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::layout::generate_layout;
    use crate::env::sim::{reset, EnvParams};
    use crate::env::spawn::uniform_spawn;
    use crate::seed::{child_rng, Stream};

    #[test]
    fn instance_line_round_trips_bit_exact() {
        let mut rng = child_rng(5, Stream::Spawn, 0);
        for seed in 0..50 {
            let layout = generate_layout(seed, 12, 12, 6).unwrap();
            let spawn = uniform_spawn(&mut rng, &layout).unwrap();
            let line = instance_to_line(&layout, &spawn);
            let (layout2, spawn2) = instance_from_line(&line).unwrap();
            assert_eq!(layout, layout2);
            assert_eq!(spawn, spawn2);
            assert_eq!(line, instance_to_line(&layout2, &spawn2));
        }
    }

    #[test]
    fn replay_round_trips() {
        let layout = generate_layout(7, 6, 6, 3).unwrap();
        let mut rng = child_rng(6, Stream::Spawn, 0);
        let spawn = uniform_spawn(&mut rng, &layout).unwrap();
        let replay = Replay {
            layout,
            spawn,
            stochastic_coin: Some(true),
            actions: vec![Action::Up, Action::PickUp, Action::ClimbLeft, Action::Stay],
        };
        let text = replay.to_text();
        assert_eq!(Replay::from_text(&text).unwrap(), replay);
    }

    #[test]
    fn malformed_lines_are_rejected() {
        assert!(instance_from_line("12x12").is_err());
        assert!(instance_from_line("ax2 | | agent=0,0 box=0,1 ramp=0,2").is_err());
        assert!(instance_from_line("1x3 | 0,0-1,5 | agent=0,0 box=0,1 ramp=0,2").is_err());
        assert!(instance_from_line("1x3 | | agent=0,0 box=0,1").is_err());
        assert!(Replay::from_text("1x3 | | agent=0,0 box=0,1 ramp=0,2\nwarp\n").is_err());
    }

    #[test]
    fn ascii_render_shows_objects_and_walls() {
        let layout = generate_layout(11, 4, 4, 2).unwrap();
        let mut rng = child_rng(7, Stream::Spawn, 0);
        let spawn = uniform_spawn(&mut rng, &layout).unwrap();
        let state = reset(&spawn, &EnvParams::default(), &mut rng);
        let frame = render_ascii(&layout, &state);
        assert!(frame.contains('A'));
        assert!(frame.contains('B'));
        assert!(frame.contains('R'));
        assert_eq!(frame.lines().count(), 2 * 4 + 1);
    }
}
