//! `slowvary`: simulate and analyze slowly-varying two-armed bandits.
//!
//! Subcommands: `validate` an instance file, `gen`erate one from a config,
//! dump a `gap-profile`, `run` an experiment, `sweep` a drift-limit ladder,
//! print theoretical `bounds`, and `lb-verify` the lower-bound machinery.

mod config;
mod exec;
mod files;

use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "slowvary", version, about = "Slowly-varying bandit simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance file against its declared drift limit.
    Validate {
        /// Instance JSON file.
        instance: PathBuf,
    },
    /// Generate the config's instance and write it as instance.json.
    Gen {
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Emit the detectable-gap profile of an instance as CSV.
    GapProfile {
        /// Instance JSON file.
        instance: PathBuf,
        /// Output directory (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every configured policy and write summary/run/episode CSVs.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config's output_dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Base seed (overrides the config).
        #[arg(long)]
        seed: Option<u64>,
        /// Number of runs (overrides the config).
        #[arg(long)]
        runs: Option<usize>,
        /// Keep every n-th output row (overrides the config).
        #[arg(long)]
        decimate: Option<usize>,
    },
    /// Re-run the config across a list of drift limits.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated drift limits.
        #[arg(long, value_delimiter = ',', required = true)]
        deltas: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        decimate: Option<usize>,
    },
    /// Print the bound constants and scale formulas for (T, delta) or an
    /// instance file.
    Bounds {
        /// Instance JSON file (supplies T and delta, enables the
        /// instance-dependent bound).
        instance: Option<PathBuf>,
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long)]
        delta: Option<f64>,
        /// Also write bounds.csv into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the lower-bound block construction empirically.
    LbVerify {
        /// Block length (and horizon) of the tent instance.
        #[arg(long, default_value_t = 64)]
        m: usize,
        #[arg(long, default_value_t = 10_000)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write lb_verify.csv into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(
    path: &Path,
    seed: Option<u64>,
    runs: Option<usize>,
    decimate: Option<usize>,
) -> Result<(ExperimentConfig, PathBuf)> {
    let mut config = ExperimentConfig::load(path)?;
    if let Some(seed) = seed {
        config.base_seed = seed;
    }
    if let Some(runs) = runs {
        config.n_runs = runs;
    }
    if let Some(decimate) = decimate {
        config.decimation = decimate;
    }
    let base_dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    Ok((config, base_dir))
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    exec::apply_thread_env()?;
    match cli.command {
        Command::Validate { instance } => exec::cmd_validate(&instance),
        Command::Gen { config, out } => {
            let (config, base_dir) = load_config(&config, None, None, None)?;
            exec::cmd_gen(&config, &base_dir, &out)
        }
        Command::GapProfile { instance, out } => exec::cmd_gap_profile(&instance, out.as_deref()),
        Command::Run {
            config,
            out,
            seed,
            runs,
            decimate,
        } => {
            let (config, base_dir) = load_config(&config, seed, runs, decimate)?;
            let out_dir = exec::resolve_out_dir(out, &config);
            exec::cmd_run(&config, &base_dir, &out_dir)
        }
        Command::Sweep {
            config,
            deltas,
            out,
            seed,
            runs,
            decimate,
        } => {
            let (config, _) = load_config(&config, seed, runs, decimate)?;
            let out_dir = exec::resolve_out_dir(out, &config);
            exec::cmd_sweep(&config, &out_dir, &deltas)
        }
        Command::Bounds {
            instance,
            horizon,
            delta,
            out,
        } => exec::cmd_bounds(instance.as_deref(), horizon, delta, out.as_deref()),
        Command::LbVerify { m, runs, seed, out } => {
            exec::cmd_lb_verify(m, runs, seed, out.as_deref())
        }
    }
}
