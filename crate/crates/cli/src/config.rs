use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cmcf_core::colgen::ColgenOptions;
use cmcf_core::sndlib::CostKind;

#[derive(Debug, Parser)]
#[command(name = "cmcf", version, about = "Convex multi-commodity flow solvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Turn an SNDlib native file into a scaled instance.
    Prepare(PrepareArgs),
    /// Run one solver on one instance.
    Solve(SolveArgs),
    /// Run several solvers on several instances and write CSV tables.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CostArg {
    Linear,
    Quadratic,
    Kleinrock,
}

impl From<CostArg> for CostKind {
    fn from(c: CostArg) -> Self {
        match c {
            CostArg::Linear => CostKind::Linear,
            CostArg::Quadratic => CostKind::Quadratic,
            CostArg::Kleinrock => CostKind::Kleinrock,
        }
    }
}

#[derive(Debug, Args)]
pub struct PrepareArgs {
    /// SNDlib native-format file.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub cost: CostArg,
    /// Output directory for `<name>.json` and `<name>.report.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Solver {
    Inner,
    TightInner,
    Pattern,
    BnpTight,
    BnpPattern,
    Greedy,
    Flowdev,
}

impl Solver {
    pub const ALL: [Solver; 7] = [
        Self::Inner,
        Self::TightInner,
        Self::Pattern,
        Self::BnpTight,
        Self::BnpPattern,
        Self::Greedy,
        Self::Flowdev,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Inner => "inner",
            Self::TightInner => "tight-inner",
            Self::Pattern => "pattern",
            Self::BnpTight => "bnp-tight",
            Self::BnpPattern => "bnp-pattern",
            Self::Greedy => "greedy",
            Self::Flowdev => "flowdev",
        }
    }
}

impl FromStr for Solver {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s.trim())
            .ok_or_else(|| format!("unknown solver '{s}'"))
    }
}

/// Settings shared by `solve` and `bench`.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Relative gap at which branch-and-price stops, in (0, 1].
    #[arg(long, default_value_t = 0.001, value_parser = parse_gap)]
    pub gap: f64,
    /// Wall-clock limit in seconds.
    #[arg(long = "time-limit")]
    pub time_limit: Option<f64>,
    #[arg(long = "node-limit")]
    pub node_limit: Option<usize>,
    /// Seed of the greedy order generator.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Greedy starts, also used for the branch-and-price incumbent.
    #[arg(long, default_value_t = 16)]
    pub starts: usize,
    /// Relative pricing tolerance.
    #[arg(long = "price-tol", default_value_t = 1e-7)]
    pub price_tol: f64,
    /// Column generation iteration cap.
    #[arg(long = "max-iterations", default_value_t = 10_000)]
    pub max_iterations: usize,
    /// Relative Frank-Wolfe gap for `flowdev`.
    #[arg(long = "fw-tol", default_value_t = 1e-4)]
    pub fw_tol: f64,
    #[arg(long = "fw-iterations", default_value_t = 20_000)]
    pub fw_iterations: usize,
}

impl RunConfig {
    pub fn time_limit(&self) -> Option<Duration> {
        self.time_limit.map(Duration::from_secs_f64)
    }

    pub fn colgen(&self) -> ColgenOptions {
        ColgenOptions { price_tol: self.price_tol, max_iterations: self.max_iterations, ..ColgenOptions::default() }
    }
}

fn parse_gap(s: &str) -> Result<f64, String> {
    let g: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if g > 0.0 && g <= 1.0 {
        Ok(g)
    } else {
        Err(format!("gap must lie in (0, 1], got {g}"))
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Instance JSON written by `prepare`.
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub solver: Solver,
    #[command(flatten)]
    pub run: RunConfig,
    /// Output directory for `<instance>.<solver>.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Glob matching instance JSON files.
    #[arg(long)]
    pub instances: String,
    /// Comma-separated solver names.
    #[arg(long, value_delimiter = ',', required = true)]
    pub solvers: Vec<Solver>,
    #[command(flatten)]
    pub run: RunConfig,
    /// Output directory for `bench.csv` and `profile.csv`.
    #[arg(long)]
    pub out: PathBuf,
    /// Concurrent runs.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}
