//! `tardy`: solve, generate, cross-check and benchmark instances of the
//! on-time-work maximization problem.
//!
//! Exit codes: 0 success, 1 I/O error, 2 parse or usage error, 3 capacity
//! error (instance too large for the configured universe limit), 4
//! differential check failure.

mod bench;
mod check;
mod report;
mod solve_cmd;

use clap::{Parser, Subcommand};
use tardy::{generate, DeadlineModel, GenConfig};

/// Environment variable consulted when `--seed` is omitted.
pub const SEED_ENV: &str = "TARDY_SEED";

#[derive(Parser)]
#[command(
    name = "tardy",
    version,
    about = "Maximize on-time work on one or more machines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file and report the achievable totals.
    Solve(solve_cmd::SolveArgs),
    /// Generate a random instance on standard output.
    Gen(GenArgs),
    /// Differentially test the solvers against each other.
    Check(check::CheckArgs),
    /// Measure solver scaling and emit a CSV table.
    Bench(bench::BenchArgs),
}

#[derive(clap::Args)]
pub struct GenArgs {
    /// RNG seed; falls back to TARDY_SEED, then to entropy.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of jobs.
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Largest processing time.
    #[arg(long, default_value_t = 100)]
    pmax: u64,
    /// Due-date model: uniform, tight or subset-sum.
    #[arg(long, default_value = "uniform")]
    deadline_model: String,
    /// Machine count.
    #[arg(long, default_value_t = 1)]
    m: u32,
}

/// An error carrying its process exit code.
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> CliError {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> CliError {
        CliError::new(2, message)
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> CliError {
        CliError::new(1, err.to_string())
    }
}

impl From<tardy::Error> for CliError {
    fn from(err: tardy::Error) -> CliError {
        let code = match err {
            tardy::Error::Parse { .. } => 2,
            tardy::Error::Capacity { .. } => 3,
            _ => 2,
        };
        CliError::new(code, err.to_string())
    }
}

/// Seed resolution: flag, then environment, then entropy.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(raw) => raw
            .parse()
            .map_err(|_| CliError::usage(format!("{SEED_ENV} must be an unsigned integer, got {raw:?}"))),
        Err(_) => Ok(rand_seed()),
    }
}

fn rand_seed() -> u64 {
    use std::time::{SystemTime, UNIX_EPOCH};
    let nanos = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0);
    nanos ^ (std::process::id() as u64) << 32
}

fn run_gen(args: &GenArgs) -> Result<(), CliError> {
    let model: DeadlineModel = args
        .deadline_model
        .parse()
        .map_err(CliError::usage)?;
    if args.pmax == 0 {
        return Err(CliError::usage("--pmax must be positive"));
    }
    if args.m == 0 {
        return Err(CliError::usage("--m must be positive"));
    }
    let seed = resolve_seed(args.seed)?;
    let instance = generate(&GenConfig {
        seed,
        jobs: args.n,
        max_processing: args.pmax,
        model,
        machines: args.m,
    });
    print!("# seed {seed} model {model}\n{instance}");
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Solve(args) => solve_cmd::run(args),
        Command::Gen(args) => run_gen(args),
        Command::Check(args) => check::run(args),
        Command::Bench(args) => bench::run(args),
    };
    if let Err(err) = outcome {
        eprintln!("error: {}", err.message);
        std::process::exit(err.code);
    }
}
