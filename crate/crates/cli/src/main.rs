use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod report;

#[derive(Parser, Debug)]
#[command(name = "ramcx", version, about = "Build and check explicit Ramanujan complexes")]
struct Cli {
    /// Worker threads for matrix-vector products (1 keeps runs bit-reproducible).
    #[arg(long, default_value_t = 1, global = true)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cartwright-Steger generators and their cardinalities.
    Generators(GeneratorsArgs),
    /// Congruence quotient: group table, edge list and Cayley complex files.
    Build(BuildArgs),
    /// Run checks on a directory written by `build`.
    Analyze(AnalyzeArgs),
    /// Ball in the building around the standard vertex, with local checks.
    Ball(BallArgs),
    /// Tables of the closed-form bounds.
    Bounds(BoundsArgs),
}

#[derive(Args, Debug)]
pub struct GeneratorsArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub d: usize,
    /// Write the generator matrices here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub d: usize,
    /// Degree of the congruence polynomial.
    #[arg(long)]
    pub e: u32,
    /// Requested partite index (a divisor of d).
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    /// Use this congruence polynomial (coefficients low degree first) instead of searching.
    #[arg(long)]
    pub poly: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Largest group that will be enumerated.
    #[arg(long, default_value_t = ramcx::quotient::DEFAULT_GROUP_BUDGET)]
    pub budget: usize,
    /// Enumerate even when the predicted order exceeds the budget.
    #[arg(long)]
    pub force: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    Spectra,
    Mixing,
    Color,
    Radius,
    Diameter,
    All,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Directory written by `build`.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    pub checks: Vec<Check>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Sampled subset families per mixing check.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Graphs up to this many vertices get a full dense spectrum.
    #[arg(long, default_value_t = 2000)]
    pub dense_threshold: usize,
    /// Search-node budget for exact colouring.
    #[arg(long, default_value_t = 50_000_000)]
    pub color_budget: u64,
    /// Radius of the building ball used as the reference for d >= 3.
    #[arg(long, default_value_t = 2)]
    pub ball_radius: usize,
    /// Write the report here as well as to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the dense spectrum as CSV here (when one is computed).
    #[arg(long)]
    pub spectrum_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BallArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 2)]
    pub radius: usize,
    #[arg(long, default_value_t = 2_000_000)]
    pub max_vertices: usize,
    /// Write the ball (vertices, then facets) here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[arg(long, value_delimiter = ',', default_value = "3,5,7,9,25,81")]
    pub q: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    pub d: Vec<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads.max(1)).build_global() {
        log::warn!("thread pool already initialised: {e}");
    }
    let out = match cli.command {
        Command::Generators(a) => commands::generators(&a),
        Command::Build(a) => commands::build(&a),
        Command::Analyze(a) => commands::analyze(&a),
        Command::Ball(a) => commands::ball(&a),
        Command::Bounds(a) => commands::bounds(&a),
    };
    match out {
        Ok(rep) => {
            print!("{}", rep.text());
            if rep.failures() > 0 {
                eprintln!("{} check(s) failed", rep.failures());
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
