//! Command-line surface: `train`, `eval`, `sweep`, `inspect`.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::env::sim::{reset, step};
use crate::env::text::{render_ascii, Replay};
use crate::error::{Error, Result};
use crate::harness::checkpoint::{load_checkpoint, save_checkpoint};
use crate::harness::config::ExperimentConfig;
use crate::harness::eval::{evaluate_hard, GreedyPolicy};
use crate::harness::logging::CsvSink;
use crate::harness::train::autodime_loop;
use crate::seed::{child_rng, Stream};

#[derive(Parser)]
#[command(
    name = "autodime",
    about = "Teacher-student curriculum training in doorless grid mazes",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a training loop from a config file.
    Train {
        /// Path to a `section.key = value` config file.
        #[arg(long)]
        config: PathBuf,
        /// Override run.seed from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for config echo, CSV log and checkpoint.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Evaluate a checkpoint's policy on uniformly sampled hard mazes.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        /// Number of hard episodes to average over.
        #[arg(long)]
        episodes: usize,
        /// Evaluation stream seed (defaults to the checkpoint's run.seed).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run every config file in a directory sequentially.
    Sweep {
        /// Directory containing *.cfg files.
        #[arg(long)]
        configs: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Print a recorded episode as ASCII frames.
    Inspect {
        #[arg(long)]
        replay: PathBuf,
    },
}

/// Entry point shared by the binary and tests. Returns the process exit
/// code: 0 on success, 1 on execution errors, 2 on usage errors.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            // clap renders its own usage/help text; --help and --version
            // exit successfully.
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            1
        }
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Train { config, seed, out } => train(&config, seed, &out),
        Command::Eval {
            checkpoint,
            episodes,
            seed,
        } => eval(&checkpoint, episodes, seed),
        Command::Sweep { configs, out } => sweep(&configs, &out),
        Command::Inspect { replay } => inspect(&replay),
    }
}

fn train(config_path: &Path, seed_override: Option<u64>, out: &Path) -> Result<()> {
    let text = fs::read_to_string(config_path)?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let Some(seed) = seed_override {
        cfg.seed = seed;
    }
    fs::create_dir_all(out)?;
    fs::write(out.join("config.txt"), cfg.to_text())?;
    let mut sink = CsvSink::create(&out.join("log.csv"))?;

    let outcome = autodime_loop(&cfg, &mut sink)?;
    save_checkpoint(&out.join("checkpoint.bin"), &cfg, &outcome.student, &outcome.teacher)?;

    println!(
        "trained {} iterations (seed {}) -> {}",
        cfg.iterations,
        cfg.seed,
        out.display()
    );
    if let Some((iter, ret)) = outcome.log.eval_points().last() {
        println!("final hard-environment eval at iteration {iter}: {ret:.6}");
    }
    Ok(())
}

fn eval(checkpoint: &Path, episodes: usize, seed: Option<u64>) -> Result<()> {
    let (cfg, student, _teacher) = load_checkpoint(checkpoint)?;
    let eval_seed = seed.unwrap_or(cfg.seed);
    let mut greedy = GreedyPolicy {
        policy: &student.policy,
    };
    let mean = evaluate_hard(&mut greedy, &cfg.env, eval_seed, 0, episodes)?;
    println!("mean hard-environment return over {episodes} episodes: {mean:.6}");
    Ok(())
}

fn sweep(configs_dir: &Path, out: &Path) -> Result<()> {
    let mut entries: Vec<PathBuf> = fs::read_dir(configs_dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|e| e == "cfg").unwrap_or(false))
        .collect();
    entries.sort();
    if entries.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "no .cfg files in {}",
            configs_dir.display()
        )));
    }
    for path in entries {
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("run")
            .to_string();
        let run_out = out.join(&stem);
        println!("sweep: running {stem}");
        train(&path, None, &run_out)?;
    }
    Ok(())
}

fn inspect(replay_path: &Path) -> Result<()> {
    let text = fs::read_to_string(replay_path)?;
    let replay = Replay::from_text(&text)?;
    let params = crate::env::sim::EnvParams {
        episode_length: replay.actions.len().max(1),
        stochastic: replay.stochastic_coin.is_some(),
    };
    // Reset never consumes randomness for pinned coins; feed it a throwaway
    // stream and overwrite the flag with the recorded coin.
    let mut rng = child_rng(0, Stream::Rollout, 0);
    let mut state = reset(&replay.spawn, &params, &mut rng);
    state.reward_flag = replay.stochastic_coin.unwrap_or(true);

    let difficulty = crate::env::spawn::classify_difficulty(&replay.layout, &replay.spawn);
    println!(
        "{}x{} maze, {} rooms, difficulty: {}",
        replay.layout.height(),
        replay.layout.width(),
        replay.layout.room_count(),
        difficulty.label()
    );
    println!("t=0 (start)");
    print!("{}", render_ascii(&replay.layout, &state));
    let mut total = 0.0;
    for (t, &action) in replay.actions.iter().enumerate() {
        let (next, reward) = step(&state, &replay.layout, &params, action)?;
        total += reward;
        state = next;
        println!(
            "t={} action={} reward={} total={}",
            t + 1,
            action.label(),
            reward,
            total
        );
        print!("{}", render_ascii(&replay.layout, &state));
    }
    println!("episode return: {total}");
    Ok(())
}
