//! `spikeconn` command-line interface: generate networks, simulate them,
//! estimate and threshold connectivity, evaluate against ground truth and
//! benchmark the estimators.

mod commands;
mod config;
mod error;
mod manifest;
mod pipeline;
mod stages;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::{
    BenchArgs, DynamicsArgs, EstimateArgs, EvaluateArgs, GenerateArgs, GraphArgs, SimulateArgs, ThresholdArgs,
};

#[derive(Debug, Parser)]
#[command(name = "spikeconn", version, about = "Spiking network simulation and connectivity estimation from spike trains")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
#[command(next_help_heading = "Global options")]
pub struct GlobalArgs {
    /// Master seed; overrides the seed of --config
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads (0 = one per core); results do not depend on it
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Output directory; nothing is written outside it [default: config `out`, else "out"]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Pipeline config (JSON); stage sections also seed subcommand defaults
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Log only warnings and errors
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a ground-truth network (network.json)
    Generate(GenerateArgs),
    /// Simulate a network and record a channel subset (spikes.sdf.json, recording.json)
    Simulate(SimulateArgs),
    /// Estimate connectivity matrices (cm_<method>.csv)
    Estimate(EstimateArgs),
    /// Threshold a connectivity matrix (tcm.csv)
    Threshold(ThresholdArgs),
    /// ROC, TPR at a target FPR and confusion matrix against ground truth (report.json)
    Evaluate(EvaluateArgs),
    /// Mean path length, clustering and small-world-ness (graph.json)
    Graph(GraphArgs),
    /// Classify effect changes between two thresholded snapshots (dynamics.json)
    Dynamics(DynamicsArgs),
    /// Time the estimators over channel counts and durations (timing.csv)
    Bench(BenchArgs),
    /// Run every stage of --config and write manifest.json
    Pipeline,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.global.quiet { log::LevelFilter::Warn } else { log::LevelFilter::Info };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.global.threads).build_global() {
        log::warn!("thread pool already initialised: {e}");
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
