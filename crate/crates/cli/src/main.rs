//! `chainsim`: batch runner for formal-chain experiments.
//!
//! Exit codes: 0 success, 1 other failure, 2 config or parse error,
//! 3 boundary mismatch, 4 numeric failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chainsim_core::Error;

#[derive(Parser, Debug)]
#[command(name = "chainsim", version, about = "Formal chains of combinatorial manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Collect the self-pairing of a superposition of kets.
    Pair(PairArgs),
    /// Emit the collected handle series as CSV.
    Series(SeriesArgs),
    /// Grow one Lorentzian layer over a closed space and double it.
    Grow(GrowArgs),
    /// Run the Metropolis sampler over formal chains.
    Sample(SampleArgs),
    /// Spectral gap of a neighbour graph.
    Gap(GapArgs),
    /// Evolve the two-particle molecule and track the erased wavefunction.
    Twofield(TwofieldArgs),
    /// Positivity checks: Cauchy-Schwarz orders and light-like search.
    Positivity(PositivityArgs),
}

/// Config file plus `key=value` overrides.
#[derive(Args, Debug, Clone, Default)]
pub struct ConfigArgs {
    /// Flat `key = value` config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override one config key, e.g. `--set Lambda.2=0.1`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Example {
    /// One arc with 0..3 free circles; |Y|² = 7/4.
    #[value(name = "signed-arcs", alias = "freedman-3.1")]
    SignedArcs,
    /// arc₁ − arc₂, cancelled by two fluctuations.
    #[value(name = "two-arc-cancellation", alias = "cancellation-3.2")]
    TwoArcCancellation,
}

#[derive(Args, Debug)]
pub struct PairArgs {
    #[arg(long, conflicts_with = "kets")]
    pub example: Option<Example>,
    /// JSON superposition `{"terms": [{"key", "re", "im"}]}` of matching kets
    /// such as `arcs[0-1,2-3]+0`, or of mock ids with `--mock`.
    #[arg(long)]
    pub kets: Option<PathBuf>,
    /// Mock gluing table `{"kets": [...], "glue": {"A|B": "W"}}`.
    #[arg(long, requires = "kets")]
    pub mock: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficients {
    /// `c_n = 1/(n+1)`.
    Harmonic,
    /// `c_0 = 1`, all others 0.
    Delta,
}

#[derive(Args, Debug)]
pub struct SeriesArgs {
    #[arg(long, default_value_t = 10)]
    pub g_max: usize,
    #[arg(long, value_enum, default_value_t = Coefficients::Harmonic)]
    pub coefficients: Coefficients,
    /// Exact rational coefficients and sums instead of floats.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Args, Debug)]
pub struct GrowArgs {
    #[arg(long)]
    pub seed: u64,
    /// Grow over this many positive points.
    #[arg(long, conflicts_with_all = ["circle", "input"])]
    pub points: Option<usize>,
    /// Grow over a circle with this many edges.
    #[arg(long, conflicts_with = "input")]
    pub circle: Option<usize>,
    /// Triangulation text file of a closed Euclidean space.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub cfg: ConfigArgs,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    /// Master seed; may instead come from the config key `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub chains: Option<usize>,
    #[arg(long)]
    pub sweeps: Option<usize>,
    #[arg(long)]
    pub moves_per_sweep: Option<usize>,
    /// Skip the mock stage; growth stops at `max_dimension`.
    #[arg(long)]
    pub no_mock: bool,
    /// Write the per-sweep action trace as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[command(flatten)]
    pub cfg: ConfigArgs,
}

#[derive(Args, Debug)]
pub struct GapArgs {
    /// `path5`, `cycle4`, `star3`, `complete4`, `circles3..7`, `sphere6`.
    #[arg(long)]
    pub graph: String,
    #[arg(long, default_value_t = 200)]
    pub cap: usize,
}

#[derive(Args, Debug)]
pub struct TwofieldArgs {
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Points per axis (power of two).
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
    #[arg(long, default_value_t = 8.0)]
    pub half_width: f64,
    /// Steps between CSV rows.
    #[arg(long, default_value_t = 100)]
    pub stride: usize,
    /// Centre of both initial Gaussians.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub center: f64,
    /// Distance between the two initial Gaussians.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub separation: f64,
    /// Depth of the Gaussian well `V(x₁ − x₂)`.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub depth: f64,
    #[arg(long, default_value_t = 1.0)]
    pub width: f64,
}

#[derive(Args, Debug)]
pub struct PositivityArgs {
    #[arg(long)]
    pub seed: u64,
    /// Boundary points of the matching kets (even, at most 6).
    #[arg(long, default_value_t = 6)]
    pub points: u32,
    /// Also allow up to this many free circles per ket.
    #[arg(long, default_value_t = 0)]
    pub free: u32,
    /// Random ket families to search.
    #[arg(long, default_value_t = 20)]
    pub families: usize,
    #[arg(long, default_value_t = 6)]
    pub max_kets: usize,
    #[arg(long, default_value_t = 200)]
    pub restarts: usize,
    #[arg(long, default_value_t = 500)]
    pub steps: usize,
    /// Residual a positive family must exceed.
    #[arg(long, default_value_t = 0.05)]
    pub floor: f64,
    /// Mock gluing table to search as well; `mazur` for the built-in one.
    #[arg(long)]
    pub mock: Option<String>,
}

/// Failures with their exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("numeric check failed: {0}")]
    Numeric(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Core(Error::Parse { .. } | Error::Param(_)) | Self::Usage(_) | Self::Io { .. } => 2,
            Self::Core(Error::Boundary(_)) => 3,
            Self::Numeric(_) | Self::Core(Error::Integrator(_)) => 4,
            Self::Core(_) => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match cli.command {
        Command::Pair(a) => commands::pair(&a),
        Command::Series(a) => commands::series(&a),
        Command::Grow(a) => commands::grow(&a),
        Command::Sample(a) => commands::sample(&a),
        Command::Gap(a) => commands::gap(&a),
        Command::Twofield(a) => commands::twofield(&a),
        Command::Positivity(a) => commands::positivity(&a),
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
