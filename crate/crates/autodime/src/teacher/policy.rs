//! The environment-designing policy.
//!
//! One MLP maps the flattened wall channels of a maze to three logit heads
//! (agent, box, ramp placements over cells) plus a scalar value baseline.
//! Placements are sampled simultaneously from the factorized distribution;
//! collisions between sampled cells are resolved outside the distribution,
//! so reported log-probabilities are pre-resolution.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use crate::env::layout::{Cell, MazeLayout};
use crate::env::occupancy::{layout_feature_dim, layout_features};
use crate::env::spawn::SpawnSpec;
use crate::error::{Error, Result};
use crate::nn::categorical;
use crate::nn::{optimizer_step, Gradients, Mlp, OptimizerState};
use crate::seed::{child_rng, Stream};

pub const PLACED_OBJECTS: usize = 3;
const OBJECT_NAMES: [&str; PLACED_OBJECTS] = ["agent", "box", "ramp"];

/// Per-object cell masks; `true` marks an allowed cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SpawnMasks {
    pub agent: Vec<bool>,
    pub box_cells: Vec<bool>,
    pub ramp: Vec<bool>,
}

impl SpawnMasks {
    /// Permits every cell for every object (the maze default).
    pub fn allow_all(num_cells: usize) -> Self {
        Self {
            agent: vec![true; num_cells],
            box_cells: vec![true; num_cells],
            ramp: vec![true; num_cells],
        }
    }

    fn for_object(&self, obj: usize) -> &[bool] {
        match obj {
            0 => &self.agent,
            1 => &self.box_cells,
            _ => &self.ramp,
        }
    }
}

/// Optimization knobs for the teacher.
#[derive(Debug, Clone, PartialEq)]
pub struct TeacherConfig {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub clip_epsilon: f64,
    pub entropy_coef: f64,
    pub value_coef: f64,
    pub epochs: usize,
    /// Minibatch size in transitions; batches are single-pass when this is
    /// at least the batch size.
    pub minibatch: usize,
    /// Divide rewards by a running mean of their magnitude. Off by default:
    /// raw per-episode sums are the contract.
    pub normalize_rewards: bool,
}

impl Default for TeacherConfig {
    fn default() -> Self {
        Self {
            hidden: vec![256, 256],
            learning_rate: 3e-4,
            clip_epsilon: 0.2,
            entropy_coef: 0.01,
            value_coef: 0.5,
            epochs: 1,
            minibatch: usize::MAX,
            normalize_rewards: false,
        }
    }
}

/// One sampled placement with everything the PPO update needs later.
#[derive(Debug, Clone, PartialEq)]
pub struct TeacherTransition {
    /// Flattened wall channels of the stationary maze.
    pub features: Vec<f64>,
    /// Pre-resolution cell indices per object: the action in policy space.
    pub pre_cells: [usize; 3],
    /// Post-resolution placements handed to the environment.
    pub spawn: SpawnSpec,
    /// Factorized log-probability of `pre_cells`.
    pub log_prob: f64,
    /// Value baseline at sampling time.
    pub value: f64,
    /// Episode teacher reward (filled after the student rollout).
    pub reward: f64,
}

/// Diagnostics from one teacher update.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TeacherLossStats {
    pub policy_loss: f64,
    pub value_loss: f64,
    /// Mean factorized entropy (sum over the three heads), in nats.
    pub entropy: f64,
}

#[derive(Debug, Clone)]
pub struct TeacherPolicy {
    net: Mlp,
    opt: OptimizerState,
    pub cfg: TeacherConfig,
    height: usize,
    width: usize,
    reward_scale: f64,
}

impl TeacherPolicy {
    pub fn new(height: usize, width: usize, cfg: &TeacherConfig, master_seed: u64) -> Result<Self> {
        let input = layout_feature_dim(height, width);
        let mut dims = vec![input];
        dims.extend_from_slice(&cfg.hidden);
        dims.push(PLACED_OBJECTS * height * width + 1);
        let mut rng = child_rng(master_seed, Stream::TeacherInit, 0);
        let net = Mlp::new_policy(&dims, &mut rng)?;
        Ok(Self {
            opt: OptimizerState::new(&net, cfg.learning_rate),
            net,
            cfg: cfg.clone(),
            height,
            width,
            reward_scale: 1.0,
        })
    }

    pub fn grid(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn network(&self) -> &Mlp {
        &self.net
    }

    pub fn network_mut(&mut self) -> &mut Mlp {
        &mut self.net
    }

    pub fn optimizer_steps(&self) -> u64 {
        self.opt.step_count()
    }

    pub fn set_optimizer_steps(&mut self, steps: u64) {
        self.opt.set_step_count(steps);
    }

    fn num_cells(&self) -> usize {
        self.height * self.width
    }

    fn head(&self, outputs: &[f64], obj: usize) -> Vec<f64> {
        let hw = self.num_cells();
        outputs[obj * hw..(obj + 1) * hw].to_vec()
    }

    fn value_of(&self, outputs: &[f64]) -> f64 {
        outputs[PLACED_OBJECTS * self.num_cells()]
    }

    /// Masked head probabilities for the three objects given a layout.
    pub fn placement_probs(&self, layout: &MazeLayout, masks: &SpawnMasks) -> Result<[Vec<f64>; 3]> {
        let outputs = self.net.forward(&layout_features(layout))?;
        Ok([
            categorical::masked_softmax(&self.head(&outputs, 0), &masks.agent, OBJECT_NAMES[0])?,
            categorical::masked_softmax(&self.head(&outputs, 1), &masks.box_cells, OBJECT_NAMES[1])?,
            categorical::masked_softmax(&self.head(&outputs, 2), &masks.ramp, OBJECT_NAMES[2])?,
        ])
    }

    /// Samples placements for a maze. Distinctness is enforced by collision
    /// resolution after sampling; the returned log-probability is the
    /// factorized pre-resolution one.
    pub fn act(
        &self,
        layout: &MazeLayout,
        masks: &SpawnMasks,
        rng: &mut ChaCha8Rng,
    ) -> Result<TeacherTransition> {
        let features = layout_features(layout);
        let outputs = self.net.forward(&features)?;
        let value = self.value_of(&outputs);

        let mut pre_cells = [0usize; 3];
        let mut log_prob = 0.0;
        for obj in 0..PLACED_OBJECTS {
            let probs = categorical::masked_softmax(
                &self.head(&outputs, obj),
                masks.for_object(obj),
                OBJECT_NAMES[obj],
            )?;
            let cell = categorical::sample_index(&probs, rng);
            pre_cells[obj] = cell;
            log_prob += probs[cell].ln();
        }

        let agent = resolve_collision(layout.cell_from_index(pre_cells[0]), &[], layout)?;
        let box_cell = resolve_collision(layout.cell_from_index(pre_cells[1]), &[agent], layout)?;
        let ramp =
            resolve_collision(layout.cell_from_index(pre_cells[2]), &[agent, box_cell], layout)?;
        let spawn = SpawnSpec::new(agent, box_cell, ramp)?;

        Ok(TeacherTransition {
            features,
            pre_cells,
            spawn,
            log_prob,
            value,
            reward: f64::NAN,
        })
    }

    /// Single-timestep PPO over a batch of transitions: clipped surrogate on
    /// `advantage = reward - value`, entropy bonus on each head, value head
    /// regressed to the reward.
    pub fn update(
        &mut self,
        batch: &[TeacherTransition],
        masks: &SpawnMasks,
        rng: &mut ChaCha8Rng,
    ) -> Result<TeacherLossStats> {
        if batch.is_empty() {
            return Err(Error::EmptyBatch("teacher update"));
        }
        if batch.iter().any(|t| !t.reward.is_finite()) {
            return Err(Error::NonFinite("teacher rewards"));
        }

        let mut rewards: Vec<f64> = batch.iter().map(|t| t.reward).collect();
        if self.cfg.normalize_rewards {
            let mean_abs =
                rewards.iter().map(|r| r.abs()).sum::<f64>() / rewards.len() as f64;
            self.reward_scale = 0.99 * self.reward_scale + 0.01 * mean_abs.max(1e-8);
            for r in &mut rewards {
                *r /= self.reward_scale;
            }
        }

        let hw = self.num_cells();
        let mut stats = TeacherLossStats::default();
        let mut order: Vec<usize> = (0..batch.len()).collect();
        for epoch in 0..self.cfg.epochs.max(1) {
            order.shuffle(rng);
            let last_epoch = epoch + 1 == self.cfg.epochs.max(1);
            let mut epoch_stats = TeacherLossStats::default();
            for chunk in order.chunks(self.cfg.minibatch.max(1).min(batch.len())) {
                let mb = self.minibatch_step(batch, &rewards, chunk, masks, hw)?;
                epoch_stats.policy_loss += mb.policy_loss * chunk.len() as f64;
                epoch_stats.value_loss += mb.value_loss * chunk.len() as f64;
                epoch_stats.entropy += mb.entropy * chunk.len() as f64;
            }
            if last_epoch {
                let n = batch.len() as f64;
                stats.policy_loss = epoch_stats.policy_loss / n;
                stats.value_loss = epoch_stats.value_loss / n;
                stats.entropy = epoch_stats.entropy / n;
            }
        }
        Ok(stats)
    }

    fn minibatch_step(
        &mut self,
        batch: &[TeacherTransition],
        rewards: &[f64],
        chunk: &[usize],
        masks: &SpawnMasks,
        hw: usize,
    ) -> Result<TeacherLossStats> {
        let mut grads = Gradients::zeros_like(&self.net);
        let mut stats = TeacherLossStats::default();
        let weight = 1.0 / chunk.len() as f64;

        for &i in chunk {
            let tr = &batch[i];
            let advantage = rewards[i] - tr.value;
            let trace = self.net.forward_trace(&tr.features)?;
            let outputs = trace.output();

            let mut new_logp = 0.0;
            let mut probs_per_head = Vec::with_capacity(PLACED_OBJECTS);
            for obj in 0..PLACED_OBJECTS {
                let probs = categorical::masked_softmax(
                    &outputs[obj * hw..(obj + 1) * hw],
                    masks.for_object(obj),
                    OBJECT_NAMES[obj],
                )?;
                new_logp += probs[tr.pre_cells[obj]].ln();
                probs_per_head.push(probs);
            }

            let rho = (new_logp - tr.log_prob).exp();
            let clipped = rho.clamp(1.0 - self.cfg.clip_epsilon, 1.0 + self.cfg.clip_epsilon);
            let unclipped_active = rho * advantage <= clipped * advantage;
            // d(-min)/d new_logp, averaged over the minibatch.
            let g = if unclipped_active {
                -advantage * rho * weight
            } else {
                0.0
            };
            stats.policy_loss += -f64::min(rho * advantage, clipped * advantage) * weight;

            let mut d_outputs = vec![0.0; outputs.len()];
            for (obj, probs) in probs_per_head.iter().enumerate() {
                let base = obj * hw;
                // Surrogate: d logp / d logits = e_cell - p (masked cells
                // stay zero because p is zero there).
                for (c, &p) in probs.iter().enumerate() {
                    d_outputs[base + c] = -g * p;
                }
                d_outputs[base + tr.pre_cells[obj]] += g;
                // Entropy bonus.
                let ent_grad = categorical::masked_entropy_grad(probs);
                for (c, eg) in ent_grad.iter().enumerate() {
                    d_outputs[base + c] -= self.cfg.entropy_coef * eg * weight;
                }
                stats.entropy += categorical::masked_entropy(probs) * weight;
            }

            // Value head regression to the (possibly normalized) reward.
            let v = self.value_of(outputs);
            let err = v - rewards[i];
            stats.value_loss += err * err * weight;
            d_outputs[PLACED_OBJECTS * hw] = self.cfg.value_coef * 2.0 * err * weight;

            self.net.backward(&trace, &d_outputs, &mut grads)?;
        }

        optimizer_step(&mut self.net, &grads, &mut self.opt)?;
        Ok(stats)
    }
}

/// Moves a proposed placement to the nearest free cell: the proposal itself
/// if unoccupied, otherwise the closest free cell by Chebyshev distance with
/// ties broken by row-major scan order.
pub fn resolve_collision(proposed: Cell, occupied: &[Cell], layout: &MazeLayout) -> Result<Cell> {
    if !occupied.contains(&proposed) {
        return Ok(proposed);
    }
    let max_radius = layout.height().max(layout.width());
    for radius in 1..=max_radius {
        // Row-major scan of the ring at this Chebyshev distance.
        let (h, w) = (layout.height() as isize, layout.width() as isize);
        let (pr, pc) = (proposed.row as isize, proposed.col as isize);
        let r_lo = (pr - radius as isize).max(0);
        let r_hi = (pr + radius as isize).min(h - 1);
        let c_lo = (pc - radius as isize).max(0);
        let c_hi = (pc + radius as isize).min(w - 1);
        for r in r_lo..=r_hi {
            for c in c_lo..=c_hi {
                let dist = (r - pr).abs().max((c - pc).abs()) as usize;
                if dist != radius {
                    continue;
                }
                let cell = Cell::new(r as usize, c as usize);
                if !occupied.contains(&cell) {
                    return Ok(cell);
                }
            }
        }
    }
    Err(Error::NoFreeCell)
}
