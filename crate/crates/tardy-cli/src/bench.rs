//! Scaling benchmark: solve generated instances of increasing total
//! processing time and report median wall-clock per algorithm as CSV.
//! Generation happens outside the timed region.

use std::time::Instant;

use tardy::gen::generate_with_total;
use tardy::{lawler_moore, solve, DeadlineModel, Instance};

use crate::{resolve_seed, CliError};

#[derive(clap::Args)]
pub struct BenchArgs {
    /// Ascending comma-separated totals (P values) to benchmark.
    #[arg(long, default_value = "100000,200000,400000")]
    sizes: String,
    /// Runs per measurement; the median is reported.
    #[arg(long, default_value_t = 5)]
    reps: usize,
    /// Comma-separated algorithms: fast, lm.
    #[arg(long, default_value = "fast")]
    algo_set: String,
    /// Job count; defaults to P/10 per size.
    #[arg(long)]
    n: Option<usize>,
    /// RNG seed; falls back to TARDY_SEED, then to entropy.
    #[arg(long)]
    seed: Option<u64>,
}

fn median_ms(mut samples: Vec<f64>) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    samples[samples.len() / 2]
}

fn run_algo(algo: &str, instance: &Instance, reps: usize) -> Result<(f64, u64), CliError> {
    let mut times = Vec::with_capacity(reps);
    let mut insertions = 0;
    for _ in 0..reps {
        let start = Instant::now();
        insertions = match algo {
            "fast" => solve(instance)?.insertions_observed,
            "lm" => lawler_moore(instance).insertions_observed,
            other => {
                return Err(CliError::usage(format!(
                    "unknown algorithm {other:?} in --algo-set (expected fast or lm)"
                )))
            }
        };
        times.push(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok((median_ms(times), insertions))
}

pub fn run(args: &BenchArgs) -> Result<(), CliError> {
    let sizes: Vec<u64> = args
        .sizes
        .split(',')
        .map(|part| {
            part.trim()
                .parse()
                .map_err(|_| CliError::usage(format!("invalid size {part:?}")))
        })
        .collect::<Result<_, _>>()?;
    if sizes.is_empty() {
        return Err(CliError::usage("--sizes must list at least one total"));
    }
    if !sizes.windows(2).all(|w| w[0] < w[1]) {
        return Err(CliError::usage("--sizes must be strictly ascending"));
    }
    if args.reps == 0 {
        return Err(CliError::usage("--reps must be positive"));
    }
    let algos: Vec<&str> = args.algo_set.split(',').map(str::trim).collect();
    let seed = resolve_seed(args.seed)?;

    println!("algo,P,n,median_ms,insertions_observed");
    for &total in &sizes {
        let jobs = args.n.unwrap_or((total / 10).max(1) as usize);
        if (jobs as u64) > total {
            return Err(CliError::usage(format!(
                "{jobs} jobs cannot fit a total of {total}"
            )));
        }
        let instance = generate_with_total(seed ^ total, jobs, total, DeadlineModel::Uniform, 1);
        for algo in &algos {
            let (ms, insertions) = run_algo(algo, &instance, args.reps)?;
            println!("{algo},{total},{jobs},{ms:.3},{insertions}");
        }
    }
    Ok(())
}
