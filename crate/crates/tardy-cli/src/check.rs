//! Randomized differential testing: the output-sensitive solver against the
//! flat dynamic program and, where affordable, the brute force, plus the
//! insertion-bound and reconstruction invariants. On failure the offending
//! instance is shrunk by greedy job removal and printed for reproduction.

use tardy::{
    brute_force, brute_force_multi, generate, lawler_moore, lawler_moore_multi, reconstruct,
    reconstruct_multi, solve, solve_multi, DeadlineModel, GenConfig, Instance,
};

use crate::{resolve_seed, CliError};

#[derive(clap::Args)]
pub struct CheckArgs {
    /// Number of random instances to test.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Largest job count per instance.
    #[arg(long, default_value_t = 12)]
    n_max: usize,
    /// Largest processing time.
    #[arg(long, default_value_t = 8)]
    p_max: u64,
    /// Machine count.
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// RNG seed; falls back to TARDY_SEED, then to entropy.
    #[arg(long)]
    seed: Option<u64>,
    /// Corrupt the fast solver's answer to demonstrate the harness catches
    /// disagreements.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

const MODELS: [DeadlineModel; 3] = [
    DeadlineModel::Uniform,
    DeadlineModel::Tight,
    DeadlineModel::SubsetSum,
];

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs every cross-check on one instance; `None` means all agreed.
fn failure(instance: &Instance, inject_fault: bool) -> Option<String> {
    let single = instance.machines == 1;
    if single {
        let mut fast = match solve(instance) {
            Ok(r) => r,
            Err(err) => return Some(format!("fast solver failed: {err}")),
        };
        if inject_fault {
            fast.opt ^= 1;
        }
        let baseline = lawler_moore(instance);
        if fast.opt != baseline.opt {
            return Some(format!("opt mismatch: fast {} vs lm {}", fast.opt, baseline.opt));
        }
        if fast.totals != baseline.totals {
            return Some("achievable-total sets differ between fast and lm".into());
        }
        if fast.insertions_observed != baseline.insertions_observed {
            return Some(format!(
                "insertion counts differ: fast {} vs lm {}",
                fast.insertions_observed, baseline.insertions_observed
            ));
        }
        if fast.insertions_observed > fast.insertion_bound() {
            return Some(format!(
                "insertions {} exceed the bound {}",
                fast.insertions_observed,
                fast.insertion_bound()
            ));
        }
        if instance.job_count() <= 16 {
            match brute_force(instance) {
                Ok(exact) if exact != fast.opt => {
                    return Some(format!("opt mismatch: fast {} vs brute {exact}", fast.opt));
                }
                _ => {}
            }
        }
        match reconstruct(&fast, instance, fast.opt) {
            Ok(schedule) => {
                if let Err(err) = schedule.validate(instance) {
                    return Some(format!("reconstructed schedule invalid: {err}"));
                }
            }
            Err(err) => return Some(format!("reconstruction failed: {err}")),
        }
    } else {
        let mut fast = match solve_multi(instance) {
            Ok(r) => r,
            Err(err) => return Some(format!("fast solver failed: {err}")),
        };
        if inject_fault {
            fast.opt ^= 1;
        }
        let baseline = match lawler_moore_multi(instance) {
            Ok(r) => r,
            Err(err) => return Some(format!("baseline failed: {err}")),
        };
        if fast.opt != baseline.opt {
            return Some(format!("opt mismatch: fast {} vs lm {}", fast.opt, baseline.opt));
        }
        if fast.totals != baseline.totals {
            return Some("achievable-vector sets differ between fast and lm".into());
        }
        if fast.insertions_observed as u128 > fast.insertion_bound() {
            return Some(format!(
                "insertions {} exceed the bound {}",
                fast.insertions_observed,
                fast.insertion_bound()
            ));
        }
        let space = (instance.machines as u128 + 1).pow(instance.job_count() as u32);
        if space <= 1_000_000 {
            match brute_force_multi(instance) {
                Ok(exact) if exact != fast.opt => {
                    return Some(format!("opt mismatch: fast {} vs brute {exact}", fast.opt));
                }
                _ => {}
            }
        }
        let opt_vector = fast.opt_vector.clone();
        match reconstruct_multi(&fast, instance, &opt_vector) {
            Ok(schedule) => {
                if let Err(err) = schedule.validate(instance) {
                    return Some(format!("reconstructed schedule invalid: {err}"));
                }
            }
            Err(err) => return Some(format!("reconstruction failed: {err}")),
        }
    }
    None
}

/// Greedy shrink: repeatedly drop any single job that keeps the check
/// failing.
fn shrink(instance: &Instance, inject_fault: bool) -> Instance {
    let mut current = instance.clone();
    'outer: loop {
        for skip in 0..current.jobs.len() {
            let mut pairs: Vec<(u64, u64)> = Vec::with_capacity(current.jobs.len() - 1);
            for (i, job) in current.jobs.iter().enumerate() {
                if i != skip {
                    pairs.push((job.processing, job.due));
                }
            }
            let candidate = Instance::new(current.machines, &pairs);
            if failure(&candidate, inject_fault).is_some() {
                current = candidate;
                continue 'outer;
            }
        }
        return current;
    }
}

pub fn run(args: &CheckArgs) -> Result<(), CliError> {
    if args.m == 0 {
        return Err(CliError::usage("--m must be positive"));
    }
    if args.p_max == 0 {
        return Err(CliError::usage("--p-max must be positive"));
    }
    let seed = resolve_seed(args.seed)?;
    let mut state = seed;
    for trial in 0..args.trials {
        let instance = generate(&GenConfig {
            seed: splitmix(&mut state),
            jobs: (splitmix(&mut state) % (args.n_max as u64 + 1)) as usize,
            max_processing: args.p_max,
            model: MODELS[trial % MODELS.len()],
            machines: args.m,
        });
        if let Some(reason) = failure(&instance, args.inject_fault) {
            let minimal = shrink(&instance, args.inject_fault);
            let reason = failure(&minimal, args.inject_fault).unwrap_or(reason);
            eprintln!("check failed at trial {trial} (seed {seed}): {reason}");
            eprintln!("minimal failing instance:");
            eprint!("{minimal}");
            return Err(CliError::new(4, "solvers disagreed"));
        }
    }
    println!(
        "check passed: {} trials (m={}, n<={}, p<={}, seed {seed})",
        args.trials, args.m, args.n_max, args.p_max
    );
    Ok(())
}
