mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Matrix exponentials as Cayley-Hamilton polynomials, trace invariants,
/// simplex eigenvalue geometry and spin checks.
#[derive(Debug, Parser)]
#[command(name = "cayley-expm", version)]
pub struct Cli {
    /// Seed for every randomized subcommand.
    #[arg(long, global = true, env = "CAYLEY_EXPM_SEED", default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exponentiate a matrix, exp(itM).
    Expm(ExpmArgs),
    /// Power sums, symmetric invariants and characteristic polynomial.
    Invariants(MatrixInput),
    /// Convert between SU(3..5) angles and traceless spectra.
    Roots(RootsArgs),
    /// Spin-j generator along an axis, its exponential and character.
    Spin(SpinArgs),
    /// Time the exponential routes on seeded random generators.
    Bench(BenchArgs),
    /// Run the property suites at reduced sample counts.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct MatrixSource {
    /// Matrix JSON file, or `-` for standard input.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Inline matrix JSON: {"n": .., "re": [[..]], "im": [[..]]}.
    #[arg(long)]
    pub matrix: Option<String>,
}

#[derive(Debug, Args)]
pub struct MatrixInput {
    #[command(flatten)]
    pub source: MatrixSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Ch,
    Explicit,
    Oracle,
}

#[derive(Debug, Args)]
pub struct ExpmArgs {
    #[command(flatten)]
    pub source: MatrixSource,
    #[arg(long, allow_hyphen_values = true)]
    pub t: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Ch)]
    pub method: MethodArg,
    /// Report the max-norm deviation from the Taylor reference.
    #[arg(long)]
    pub compare: bool,
    /// Exit with status 2 if the deviation from the reference exceeds this.
    #[arg(long)]
    pub assert_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RootsArgs {
    #[arg(long)]
    pub n: usize,
    /// Comma-separated angles: θ (N=3), θ,φ (N=4), ψ,θ,φ (N=5).
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        conflicts_with = "spectrum",
        required_unless_present = "spectrum"
    )]
    pub angles: Option<Vec<f64>>,
    /// Radius r = √tr H², used with --angles.
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    /// Comma-separated traceless eigenvalues in parameterization order.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub spectrum: Option<Vec<f64>>,
    /// Write simplex vertices and the axis as CSV to this path.
    #[arg(long)]
    pub emit_geometry: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpinArgs {
    /// Spin as `3/2`, `1.5` or `2`.
    #[arg(long)]
    pub j: String,
    /// Comma-separated unit axis.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0,0,1")]
    pub axis: Vec<f64>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated dimensions in 2..12.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6,7,8")]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub batch: usize,
    /// Repetitions; the best time is reported.
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    /// Run only this suite.
    #[arg(long)]
    pub suite: Option<String>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
