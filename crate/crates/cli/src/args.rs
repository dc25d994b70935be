use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "qamp",
    version,
    about = "Seeded amplitude amplification and estimation experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find a good element with no knowledge of t (QSearch).
    Search(SearchArgs),
    /// Amplify with known a: ⌊π/(4θ_a)⌋ iterations, then measure.
    Amplify(AmplifyArgs),
    /// Exact amplification for known a.
    Derandomize(DerandomizeArgs),
    /// Estimate a with modulus M.
    Estimate(EstimateArgs),
    /// Count(f, M); M defaults to ⌈√N⌉.
    Count(CountArgs),
    /// Count with relative accuracy ε.
    ApproxCount(ApproxCountArgs),
    /// Count exactly with probability at least 2/3.
    ExactCount(ExactCountArgs),
    /// Decide between t = 0 and t = t0.
    Decide(DecideArgs),
    /// Amplitude amplification over the seeds of a guessing heuristic.
    Heuristic(HeuristicArgs),
    /// Measured query costs next to the quantum and classical scales.
    Table(TableArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineArg {
    Exact,
    Analytic,
}

impl From<EngineArg> for qamp::Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Exact => qamp::Engine::Exact,
            EngineArg::Analytic => qamp::Engine::Analytic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Include per-trial wall time (makes reports run-dependent).
    #[arg(long)]
    pub timing: bool,
}

/// Oracle source and trial settings shared by every experiment.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Domain size of a generated oracle.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of planted solutions of a generated oracle.
    #[arg(long)]
    pub t: Option<usize>,
    /// Load the oracle from a truth-table file instead.
    #[arg(long)]
    pub truth_table: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    #[arg(long, value_enum, default_value_t = EngineArg::Analytic)]
    pub engine: EngineArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SearchArgs {
    #[command(flatten)]
    pub common: Common,
    /// Growth factor of the iteration bound, 1 < c < 2.
    #[arg(long, default_value_t = 1.5)]
    pub c: f64,
    /// Give up after this many queries.
    #[arg(long)]
    pub cap: Option<u64>,
    #[command(flatten)]
    #[serde(skip)]
    pub output: Output,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AmplifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Known success probability; defaults to t/N.
    #[arg(long)]
    pub a: Option<f64>,
    #[command(flatten)]
    #[serde(skip)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Phase,
    Rescale,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DerandomizeArgs {
    #[command(flatten)]
    pub common: Common,
    /// Known success probability; defaults to t/N.
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long, value_enum, default_value_t = MethodArg::Phase)]
    pub method: MethodArg,
    #[command(flatten)]
    #[serde(skip)]
    pub output: Output,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Estimate a two-outcome preparation with this a instead of an oracle.
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub m: usize,
    /// Confidence parameter of the reported error bound.
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[command(flatten)]
    #[serde(skip)]
    pub output: Output,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CountArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub m: Option<u64>,
    /// Confidence parameter of the reported error bound.
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[command(flatten)]
    #[serde(skip)]
    pub output: Output,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ApproxCountArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub eps: f64,
    /// Use the optimal counter built from the exact counter's ideas.
    #[arg(long)]
    pub optimal: bool,
    /// Seed the rough estimate from a capped search instead of doubling.
    #[arg(long, conflicts_with = "optimal")]
    pub qsearch_seed: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub output: Output,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExactCountArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(skip)]
    pub output: Output,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DecideArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub t0: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: Output,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HeuristicArgs {
    #[command(flatten)]
    pub common: Common,
    /// Instance family: planted or identity.
    #[arg(long, default_value = "planted")]
    pub family: String,
    /// Instances in the family; trial i runs instance i mod this.
    #[arg(long, default_value_t = 20)]
    pub instances: usize,
    /// Fold the heuristic into the preparation instead of the oracle.
    #[arg(long)]
    pub embedded: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub output: Output,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TableArgs {
    #[arg(long, default_value_t = 256)]
    pub n: usize,
    /// Solution counts for the search and counting rows.
    #[arg(long, value_delimiter = ',', default_value = "1,4,16")]
    pub t: Vec<usize>,
    /// Promised count of the decision row.
    #[arg(long, default_value_t = 4)]
    pub t0: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,0.5,0.25")]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub trials: u64,
    #[arg(long, value_enum, default_value_t = EngineArg::Analytic)]
    pub engine: EngineArg,
    #[command(flatten)]
    #[serde(skip)]
    pub output: Output,
}
