//! Command-line arguments. Flags win over `POTTS_*` environment variables,
//! which win over the defaults.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::point::{BranchArg, Format, ThetaSpec};

#[derive(Debug, Clone, Parser)]
#[command(name = "potts-tisgm", version, about = "Classify, scan and simulate Potts TISGMs on Cayley trees")]
pub struct Cli {
    /// Worker threads; 0 lets the pool pick.
    #[arg(long, global = true, env = "POTTS_WORKERS", default_value_t = 0)]
    pub workers: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Verdict for one measure.
    Classify(ClassifyArgs),
    /// Every measure along a temperature grid.
    Scan(ScanArgs),
    /// Reconstruction probe on finite trees.
    Simulate(SimulateArgs),
    /// Number of TISGMs at one temperature.
    Counts(CountsArgs),
    /// Critical temperatures of each block size.
    Thresholds(ThresholdsArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Model {
    /// Number of spin values.
    #[arg(long, env = "POTTS_Q")]
    pub q: usize,

    /// Tree order: every vertex has k successors.
    #[arg(long, env = "POTTS_K", default_value_t = 2)]
    pub k: usize,
}

#[derive(Debug, Clone, Args)]
pub struct Measure {
    /// A number, `fold:M` or `critical`.
    #[arg(long, env = "POTTS_THETA")]
    pub theta: ThetaSpec,

    /// Block size.
    #[arg(long, env = "POTTS_M", default_value_t = 1)]
    pub m: usize,

    #[arg(long, env = "POTTS_BRANCH", value_enum, default_value = "z1")]
    pub branch: BranchArg,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Output file; stdout when absent.
    #[arg(long, env = "POTTS_OUT")]
    pub out: Option<PathBuf>,

    #[arg(long, env = "POTTS_FORMAT", value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub model: Model,
    #[command(flatten)]
    pub measure: Measure,
    /// Use the additive bound on gamma even above one.
    #[arg(long, env = "POTTS_PAPER_EXACT")]
    pub paper_exact: bool,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub model: Model,
    #[arg(long, env = "POTTS_THETA_MIN")]
    pub theta_min: f64,
    #[arg(long, env = "POTTS_THETA_MAX")]
    pub theta_max: f64,
    /// Grid intervals; the grid has steps + 1 points.
    #[arg(long, env = "POTTS_STEPS", default_value_t = 1000)]
    pub steps: usize,
    /// Only this block size.
    #[arg(long, env = "POTTS_M")]
    pub m: Option<usize>,
    /// Also emit m > q/2 (the same measures with the classes swapped).
    #[arg(long)]
    pub all_blocks: bool,
    /// Leave out the threshold rows.
    #[arg(long)]
    pub no_markers: bool,
    #[arg(long, env = "POTTS_PAPER_EXACT")]
    pub paper_exact: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    LeafTv,
    Majority,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PriorArg {
    Stationary,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Exact,
    Mc,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: Model,
    #[command(flatten)]
    pub measure: Measure,
    #[arg(long, env = "POTTS_DEPTH", default_value_t = 8)]
    pub depth: usize,
    /// Samples per root spin.
    #[arg(long, env = "POTTS_SAMPLES", default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, env = "POTTS_SEED", default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "leaf-tv")]
    pub estimator: EstimatorArg,
    #[arg(long, value_enum, default_value = "stationary")]
    pub root_prior: PriorArg,
    /// Only compare this root spin (1..=q) with the others; overrides --root-prior.
    #[arg(long)]
    pub root_spin: Option<usize>,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: MethodArg,
    /// Cap on depth * k^depth.
    #[arg(long, env = "POTTS_NODE_BUDGET")]
    pub node_budget: Option<u64>,
    /// Cap on the multisets the exact recursion enumerates per level.
    #[arg(long, env = "POTTS_EXACT_BUDGET")]
    pub exact_budget: Option<u128>,
    /// Bootstrap resamples for the standard error.
    #[arg(long, default_value_t = 200)]
    pub bootstrap: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct CountsArgs {
    #[command(flatten)]
    pub model: Model,
    /// A number, `fold:M` or `critical`.
    #[arg(long, env = "POTTS_THETA")]
    pub theta: ThetaSpec,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ThresholdsArgs {
    #[command(flatten)]
    pub model: Model,
    /// Only this block size; every m <= q/2 otherwise.
    #[arg(long, env = "POTTS_M")]
    pub m: Option<usize>,
    #[arg(long)]
    pub json: bool,
}
