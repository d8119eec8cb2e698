//! Deterministic random instance generation.
//!
//! Three deadline models:
//!
//! - `uniform`: due dates drawn uniformly from `[1, P]`.
//! - `tight`: each due date sits just below the prefix sum of processing
//!   times, so almost every step both inserts and deletes totals. This is
//!   the adversarial family for the insertion counter.
//! - `subset-sum`: every job shares the due date `P`; nothing is ever
//!   deleted and the achievable totals are exactly the subset sums.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeadlineModel {
    Uniform,
    Tight,
    SubsetSum,
}

impl fmt::Display for DeadlineModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeadlineModel::Uniform => "uniform",
            DeadlineModel::Tight => "tight",
            DeadlineModel::SubsetSum => "subset-sum",
        })
    }
}

impl FromStr for DeadlineModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "uniform" => Ok(DeadlineModel::Uniform),
            "tight" => Ok(DeadlineModel::Tight),
            "subset-sum" => Ok(DeadlineModel::SubsetSum),
            other => Err(format!(
                "unknown deadline model {other:?} (expected uniform, tight or subset-sum)"
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub seed: u64,
    pub jobs: usize,
    pub max_processing: u64,
    pub model: DeadlineModel,
    pub machines: u32,
}

/// Generates an instance; identical configs produce identical instances.
pub fn generate(config: &GenConfig) -> Instance {
    assert!(config.max_processing >= 1, "max processing time must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let processing: Vec<u64> = (0..config.jobs)
        .map(|_| rng.random_range(1..=config.max_processing))
        .collect();
    with_deadlines(processing, config.model, config.machines, &mut rng)
}

/// Generates an instance with an exact total processing time, for scaling
/// measurements. Requires `total >= jobs` so every job stays positive.
pub fn generate_with_total(
    seed: u64,
    jobs: usize,
    total: u64,
    model: DeadlineModel,
    machines: u32,
) -> Instance {
    assert!(jobs >= 1, "need at least one job");
    assert!(total >= jobs as u64, "total {total} cannot cover {jobs} unit jobs");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<u64> = (0..jobs).map(|_| rng.random_range(1..1u64 << 30)).collect();
    let weight_sum: u128 = weights.iter().map(|&w| w as u128).sum();
    let spare = total - jobs as u64;
    let mut processing: Vec<u64> = weights
        .iter()
        .map(|&w| 1 + (spare as u128 * w as u128 / weight_sum) as u64)
        .collect();
    let mut leftover = total - processing.iter().sum::<u64>();
    for p in processing.iter_mut() {
        if leftover == 0 {
            break;
        }
        *p += 1;
        leftover -= 1;
    }
    with_deadlines(processing, model, machines, &mut rng)
}

fn with_deadlines(
    processing: Vec<u64>,
    model: DeadlineModel,
    machines: u32,
    rng: &mut ChaCha8Rng,
) -> Instance {
    let total: u64 = processing.iter().sum();
    let mut prefix = 0u64;
    let pairs: Vec<(u64, u64)> = processing
        .into_iter()
        .map(|p| {
            prefix += p;
            let due = match model {
                DeadlineModel::Uniform => rng.random_range(1..=total.max(1)),
                DeadlineModel::Tight => prefix - rng.random_range(0..p),
                DeadlineModel::SubsetSum => total,
            };
            (p, due)
        })
        .collect();
    Instance::new(machines, &pairs)
}
