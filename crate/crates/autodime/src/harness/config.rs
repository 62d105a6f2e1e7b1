//! Experiment configuration: a flat `section.key = value` text format.
//!
//! `env.preset` (when present) is applied first and individual keys override
//! it, so file order does not matter. Unknown keys are rejected by name. A
//! run is a pure function of its config: all randomness derives from
//! `run.seed`.

use crate::agent::gae::GaeConfig;
use crate::agent::losses::PpoConfig;
use crate::agent::student::StudentConfig;
use crate::env::sim::EnvParams;
use crate::error::{Error, Result};
use crate::teacher::policy::TeacherConfig;
use crate::teacher::reward::TeacherRewardKind;

/// How spawns are produced: by the teacher policy or by literal uniform
/// sampling that bypasses the teacher (the exact experimental control).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpawnMode {
    Teacher,
    Uniform,
}

impl SpawnMode {
    pub fn key(&self) -> &'static str {
        match self {
            SpawnMode::Teacher => "policy",
            SpawnMode::Uniform => "uniform",
        }
    }
}

/// Maze geometry and reward variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvSetup {
    pub height: usize,
    pub width: usize,
    pub rooms: usize,
    pub episode_length: usize,
    pub stochastic: bool,
}

impl EnvSetup {
    pub fn params(&self) -> EnvParams {
        EnvParams {
            episode_length: self.episode_length,
            stochastic: self.stochastic,
        }
    }

    /// 12x12 grid, 6 rooms, 64-step episodes.
    pub fn desk() -> Self {
        Self {
            height: 12,
            width: 12,
            rooms: 6,
            episode_length: 64,
            stochastic: false,
        }
    }

    /// 30x30 grid, 20 rooms, 160-step episodes.
    pub fn paper() -> Self {
        Self {
            height: 30,
            width: 30,
            rooms: 20,
            episode_length: 160,
            stochastic: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub iterations: usize,
    pub episodes_per_iter: usize,
    /// Evaluate every this many iterations (0 disables cadence evaluation;
    /// the final iteration is always evaluated when iterations > 0).
    pub eval_every: usize,
    pub eval_episodes: usize,
    pub env: EnvSetup,
    pub teacher_reward: TeacherRewardKind,
    pub spawn_mode: SpawnMode,
    pub teacher: TeacherConfig,
    pub student: StudentConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            iterations: 300,
            episodes_per_iter: 64,
            eval_every: 25,
            eval_episodes: 100,
            env: EnvSetup::desk(),
            teacher_reward: TeacherRewardKind::ValueDisagreement,
            spawn_mode: SpawnMode::Teacher,
            teacher: TeacherConfig::default(),
            student: StudentConfig::default(),
        }
    }
}

impl ExperimentConfig {
    /// Paper-scale preset: bigger maze, longer episodes, gamma 0.998.
    pub fn paper() -> Self {
        let mut cfg = Self::default();
        cfg.env = EnvSetup::paper();
        cfg.student.gae = GaeConfig {
            gamma: 0.998,
            lambda: 0.95,
        };
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        if self.episodes_per_iter == 0 {
            return Err(Error::InvalidConfig(
                "run.episodes_per_iter must be positive".into(),
            ));
        }
        if self.eval_episodes == 0 {
            return Err(Error::InvalidConfig("run.eval_episodes must be positive".into()));
        }
        if self.env.rooms < 1 || self.env.height * self.env.width < 4 * self.env.rooms {
            return Err(Error::InvalidConfig(format!(
                "env.rooms: {} rooms do not fit a {}x{} grid",
                self.env.rooms, self.env.height, self.env.width
            )));
        }
        if self.env.num_cells_check() < 3 {
            return Err(Error::InvalidConfig("env grid needs at least 3 cells".into()));
        }
        if self.env.episode_length == 0 {
            return Err(Error::InvalidConfig("env.episode_length must be positive".into()));
        }
        self.student.gae.validate()?;
        self.student.ppo.validate()?;
        if self.teacher.learning_rate <= 0.0 || self.student.learning_rate <= 0.0 {
            return Err(Error::InvalidConfig("learning rates must be positive".into()));
        }
        Ok(())
    }

    /// Parses the flat key/value format. Rejects unknown keys by name.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            entries.push((key.trim().to_string(), value.trim().to_string()));
        }

        let mut cfg = ExperimentConfig::default();
        // Preset first, independent of file order.
        for (key, value) in &entries {
            if key == "env.preset" {
                cfg = match value.as_str() {
                    "desk" => ExperimentConfig::default(),
                    "paper" => ExperimentConfig::paper(),
                    other => {
                        return Err(Error::InvalidConfig(format!(
                            "env.preset: unknown preset '{other}'"
                        )))
                    }
                };
            }
        }
        for (key, value) in &entries {
            if key != "env.preset" {
                cfg.apply(key, value)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |key: &str, value: &str| {
            Error::InvalidConfig(format!("{key}: cannot parse value '{value}'"))
        };
        macro_rules! set {
            ($field:expr, $ty:ty) => {
                $field = value.parse::<$ty>().map_err(|_| bad(key, value))?
            };
        }
        match key {
            "run.seed" => set!(self.seed, u64),
            "run.iterations" => set!(self.iterations, usize),
            "run.episodes_per_iter" => set!(self.episodes_per_iter, usize),
            "run.eval_every" => set!(self.eval_every, usize),
            "run.eval_episodes" => set!(self.eval_episodes, usize),
            "env.height" => set!(self.env.height, usize),
            "env.width" => set!(self.env.width, usize),
            "env.rooms" => set!(self.env.rooms, usize),
            "env.episode_length" => set!(self.env.episode_length, usize),
            "env.stochastic" => set!(self.env.stochastic, bool),
            "teacher.reward" => {
                self.teacher_reward = TeacherRewardKind::from_key(value)
                    .ok_or_else(|| bad(key, value))?;
            }
            "teacher.spawn" => {
                self.spawn_mode = match value {
                    "policy" => SpawnMode::Teacher,
                    "uniform" => SpawnMode::Uniform,
                    _ => return Err(bad(key, value)),
                };
            }
            "teacher.hidden" => self.teacher.hidden = parse_dims(key, value)?,
            "teacher.learning_rate" => set!(self.teacher.learning_rate, f64),
            "teacher.clip_epsilon" => set!(self.teacher.clip_epsilon, f64),
            "teacher.entropy_coef" => set!(self.teacher.entropy_coef, f64),
            "teacher.value_coef" => set!(self.teacher.value_coef, f64),
            "teacher.epochs" => set!(self.teacher.epochs, usize),
            "teacher.minibatch" => set!(self.teacher.minibatch, usize),
            "teacher.normalize_rewards" => set!(self.teacher.normalize_rewards, bool),
            "student.hidden" => self.student.hidden = parse_dims(key, value)?,
            "student.learning_rate" => set!(self.student.learning_rate, f64),
            "student.gamma" => set!(self.student.gae.gamma, f64),
            "student.lambda" => set!(self.student.gae.lambda, f64),
            "student.clip_epsilon" => set!(self.student.ppo.clip_epsilon, f64),
            "student.entropy_coef" => set!(self.student.ppo.entropy_coef, f64),
            "student.value_coef" => set!(self.student.ppo.value_coef, f64),
            "student.epochs" => set!(self.student.ppo.epochs, usize),
            "student.minibatch_episodes" => set!(self.student.ppo.minibatch_episodes, usize),
            "student.normalize_advantages" => {
                set!(self.student.ppo.normalize_advantages, bool)
            }
            other => {
                return Err(Error::InvalidConfig(format!("unknown config key '{other}'")));
            }
        }
        Ok(())
    }

    /// Canonical echo of every key. `parse(to_text(cfg)) == cfg`.
    pub fn to_text(&self) -> String {
        let dims = |d: &[usize]| {
            d.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut out = String::new();
        let mut push = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        push("run.seed", self.seed.to_string());
        push("run.iterations", self.iterations.to_string());
        push("run.episodes_per_iter", self.episodes_per_iter.to_string());
        push("run.eval_every", self.eval_every.to_string());
        push("run.eval_episodes", self.eval_episodes.to_string());
        push("env.height", self.env.height.to_string());
        push("env.width", self.env.width.to_string());
        push("env.rooms", self.env.rooms.to_string());
        push("env.episode_length", self.env.episode_length.to_string());
        push("env.stochastic", self.env.stochastic.to_string());
        push("teacher.reward", self.teacher_reward.key().to_string());
        push("teacher.spawn", self.spawn_mode.key().to_string());
        push("teacher.hidden", dims(&self.teacher.hidden));
        push("teacher.learning_rate", self.teacher.learning_rate.to_string());
        push("teacher.clip_epsilon", self.teacher.clip_epsilon.to_string());
        push("teacher.entropy_coef", self.teacher.entropy_coef.to_string());
        push("teacher.value_coef", self.teacher.value_coef.to_string());
        push("teacher.epochs", self.teacher.epochs.to_string());
        push("teacher.minibatch", self.teacher.minibatch.to_string());
        push(
            "teacher.normalize_rewards",
            self.teacher.normalize_rewards.to_string(),
        );
        push("student.hidden", dims(&self.student.hidden));
        push("student.learning_rate", self.student.learning_rate.to_string());
        push("student.gamma", self.student.gae.gamma.to_string());
        push("student.lambda", self.student.gae.lambda.to_string());
        push("student.clip_epsilon", self.student.ppo.clip_epsilon.to_string());
        push("student.entropy_coef", self.student.ppo.entropy_coef.to_string());
        push("student.value_coef", self.student.ppo.value_coef.to_string());
        push("student.epochs", self.student.ppo.epochs.to_string());
        push(
            "student.minibatch_episodes",
            self.student.ppo.minibatch_episodes.to_string(),
        );
        push(
            "student.normalize_advantages",
            self.student.ppo.normalize_advantages.to_string(),
        );
        out
    }
}

impl EnvSetup {
    fn num_cells_check(&self) -> usize {
        self.height * self.width
    }
}

fn parse_dims(key: &str, value: &str) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidConfig(format!("{key}: bad dimension '{part}'")))
        })
        .collect()
}

/// Re-exported student sub-config pieces for builders.
pub fn desk_gae() -> GaeConfig {
    GaeConfig {
        gamma: 0.99,
        lambda: 0.95,
    }
}

pub fn default_ppo() -> PpoConfig {
    PpoConfig::default()
}
