//! `clicklabel`: click-based pseudo-labeling for LiDAR sequences.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use clicklabel_core::data::Sparsity;
use clicklabel_core::Error;

use crate::config::PipelineConfig;

#[derive(Parser, Debug)]
#[command(
    name = "clicklabel",
    version,
    about = "Click-to-label pipeline for LiDAR point cloud sequences"
)]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every randomized step (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; output never depends on this.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Log more (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a synthetic dataset from a scene spec.
    Synth(SynthArgs),
    /// Simulate coarse clicks on a dataset's ground truth.
    Clicks(ClicksArgs),
    /// Turn clicks into box and mask pseudo-labels.
    Genlabels(GenlabelsArgs),
    /// Produce stand-in detector output from ground truth, for demos.
    Simdet(SimdetArgs),
    /// Upgrade and expand labels with detector predictions.
    Refine(RefineArgs),
    /// Score labels against ground truth.
    Eval(EvalArgs),
    /// Evaluate the mixed-supervision loss of predictions against labels.
    Loss(LossArgs),
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Scene spec (JSON); the bundled demo scene when omitted.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Output dataset directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SparsityArg {
    OnePerFrame,
    AllInstances,
}

impl From<SparsityArg> for Sparsity {
    fn from(s: SparsityArg) -> Self {
        match s {
            SparsityArg::OnePerFrame => Sparsity::OnePerFrame,
            SparsityArg::AllInstances => Sparsity::AllInstances,
        }
    }
}

#[derive(Args, Debug)]
pub struct ClicksArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, value_enum)]
    pub sparsity: Option<SparsityArg>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct GenlabelsArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub clicks: PathBuf,
    /// Label file (JSON lines).
    #[arg(long)]
    pub out: PathBuf,
    /// Report file; defaults to the label file with a `.report.json` extension.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimdetArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Augmentation spec (JSON) applied to the second prediction set.
    #[arg(long)]
    pub augspec: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub out_augmented: PathBuf,
}

#[derive(Args, Debug)]
pub struct RefineArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub predictions: PathBuf,
    /// Predictions on the augmented scene, in augmented coordinates.
    #[arg(long)]
    pub augmented: PathBuf,
    #[arg(long)]
    pub augspec: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub labels: PathBuf,
    /// Ground-truth file; taken from the dataset manifest when omitted.
    #[arg(long, required_unless_present = "dataset")]
    pub gt: Option<PathBuf>,
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Comma-separated BEV IoU thresholds.
    #[arg(long, value_delimiter = ',')]
    pub thresholds: Option<Vec<f64>>,
    /// JSON report file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LossArgs {
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub predictions: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// JSON output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Why a command failed, mapped to the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad or unreadable input: exit 1.
    Input(String),
    /// A broken internal invariant: exit 2.
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if cli.workers.is_some() {
        cfg.workers = cli.workers;
    }
    cfg.validate()?;
    if let Some(n) = cfg.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Invariant(format!("cannot start worker pool: {e}")))?;
    }
    match cli.command {
        Command::Synth(a) => commands::synth(&a, &cfg),
        Command::Clicks(a) => commands::clicks(&a, &cfg),
        Command::Genlabels(a) => commands::genlabels(&a, &cfg),
        Command::Simdet(a) => commands::simdet(&a, &cfg),
        Command::Refine(a) => commands::refine(&a, &cfg),
        Command::Eval(a) => commands::eval(&a, &cfg),
        Command::Loss(a) => commands::loss(&a, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failure::Input(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Ok(Err(Failure::Invariant(msg))) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
        Err(_) => ExitCode::from(2),
    }
}
