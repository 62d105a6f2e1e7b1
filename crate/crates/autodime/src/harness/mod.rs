//! Training loop, evaluation, configuration, logging, checkpoints, CLI.

pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod eval;
pub mod logging;
pub mod train;

pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use cli::run_cli;
pub use config::{EnvSetup, ExperimentConfig, SpawnMode};
pub use eval::{evaluate_hard, sampling_probabilities, GreedyPolicy, MazeAgent};
pub use logging::{CsvSink, ExperimentLog, LogRow, NullSink, RowSink};
pub use train::{autodime_loop, TrainOutcome};
