use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use circle_gather::angles::Angle;
use circle_gather::oracle::Class;
use circle_gather::protocol::ProtocolKind;

#[derive(Debug, Parser)]
#[command(name = "circle-gather", version, about = "Luminous robots on a circle: simulate, verify, generate, serve")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Run one simulation to completion.
    Run(RunArgs),
    /// Check the leadership properties and the protocol claims.
    Verify(VerifyArgs),
    /// Generate asymmetric multiplicity-free start configurations.
    Gen(GenArgs),
    /// Serve the step protocol as newline-delimited JSON over TCP.
    Serve(ServeArgs),
}

/// A run configuration file, with flags taking precedence over its fields.
#[derive(Debug, Clone, Args)]
pub struct RunSource {
    /// Run configuration JSON.
    pub run_config: Option<PathBuf>,
    #[arg(long)]
    pub protocol: Option<ProtocolKind>,
    /// Start configuration file: {"robots": [{"pos": "1/5"}, ...]}.
    #[arg(long, conflicts_with = "positions")]
    pub config: Option<PathBuf>,
    /// Start positions inline, e.g. "0,1/5,1/2".
    #[arg(long)]
    pub positions: Option<String>,
    /// A built-in adversary name, or @FILE holding an adversary spec
    /// (for instance a scripted command list).
    #[arg(long)]
    pub adversary: Option<String>,
    #[arg(long)]
    pub delta: Option<Angle>,
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub source: RunSource,
    /// Write the JSONL trace here.
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub propositions: bool,
    /// Formation counts per configuration class.
    #[arg(long)]
    pub lemmas: bool,
    #[arg(long)]
    pub liveness: bool,
    #[arg(long)]
    pub separation: bool,
    #[arg(long)]
    pub determinism: bool,
    #[arg(long)]
    pub all: bool,
    /// Sweep every configuration of `--n` robots on grids up to `--den`
    /// instead of sampling.
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Largest denominator; 12 for sweeps, 120 for sampling.
    #[arg(long)]
    pub den: Option<i64>,
    /// Instances per sampled check.
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Restrict `--lemmas` to one class.
    #[arg(long)]
    pub class: Option<Class>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value = "1/120")]
    pub delta: Angle,
    /// Classifier used by `--propositions`; anything but `faithful` is a
    /// deliberately broken one.
    #[arg(long, default_value = "faithful")]
    pub variant: String,
    /// Also check that every broken classifier is caught.
    #[arg(long)]
    pub mutants: bool,
    /// Counterexamples are written here as run configurations.
    #[arg(long, default_value = "counterexamples")]
    pub out: PathBuf,
    /// Write all reports as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    /// Largest denominator of a position.
    #[arg(long, default_value_t = 24)]
    pub den: i64,
    #[arg(long)]
    pub class: Option<Class>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Write `instance-<k>.json` files here instead of printing JSON lines.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub source: RunSource,
    #[arg(long, default_value = "127.0.0.1:7878")]
    pub bind: String,
}
