//! Single-machine solvers: maximize the total processing time of jobs that
//! finish by their due dates.
//!
//! Three routes to the same answer:
//!
//! - [`solve`]: maintains the set of achievable totals in a [`SumCapSet`],
//!   paying per insertion rather than per possible total. The total number
//!   of insertions over a whole run is at most `2P + 1` (P = total
//!   processing time), which the solver instruments and tests enforce.
//! - [`lawler_moore`]: the classical O(nP) dynamic program over a flat
//!   boolean array, used as a polynomial-time oracle.
//! - [`brute_force`]: literal enumeration of all job subsets with an
//!   earliest-due-date feasibility check, for small instances only.
//!
//! All three work on the jobs in earliest-due-date order; a subset of jobs
//! is feasible exactly when its due-date-ordered prefix sums respect every
//! due date. [`reconstruct`] turns any achievable total into a concrete
//! [`Schedule`] by walking the provenance trail backwards.

use std::sync::Arc;

use crate::error::Error;
use crate::fingerprint::FingerprintParams;
use crate::instance::{Instance, Job, Schedule, ScheduledJob};
use crate::sumcap::SumCapSet;

/// Largest job count accepted by [`brute_force`].
pub const BRUTE_FORCE_MAX_JOBS: usize = 20;

/// For each achievable total (or flattened total vector), the step and
/// machine of its first surviving insertion.
#[derive(Debug, Clone)]
pub struct Provenance {
    first_job: Vec<u32>,
    machine: Vec<u8>,
}

const UNSET: u32 = u32::MAX;

impl Provenance {
    pub(crate) fn new(len: u64) -> Provenance {
        Provenance {
            first_job: vec![UNSET; len as usize],
            machine: vec![0; len as usize],
        }
    }

    pub(crate) fn record(&mut self, index: u64, job: usize, machine: u32) {
        debug_assert_eq!(self.first_job[index as usize], UNSET);
        // The universe guard caps the machine count at 31, so u8 is ample.
        debug_assert!(machine <= u8::MAX as u32);
        self.first_job[index as usize] = job as u32;
        self.machine[index as usize] = machine as u8;
    }

    /// Step (position in due-date order) and machine that first made
    /// `index` achievable, or `None` if it never became achievable.
    pub fn get(&self, index: u64) -> Option<(usize, u32)> {
        match self.first_job.get(index as usize) {
            Some(&job) if job != UNSET => Some((job as usize, self.machine[index as usize] as u32)),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.first_job.len()
    }

    pub fn is_empty(&self) -> bool {
        self.first_job.is_empty()
    }
}

/// Outcome of a single-machine solve.
#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Largest achievable total.
    pub opt: u64,
    /// Every achievable total, ascending. Always contains 0.
    pub totals: Vec<u64>,
    /// Elements inserted across all sum steps, counted before capping.
    pub insertions_observed: u64,
    /// Total processing time of the instance.
    pub total_processing: u64,
    /// Trace-back table for [`reconstruct`].
    pub provenance: Provenance,
}

impl SolveResult {
    /// The proven ceiling on `insertions_observed`: `2P + 1`.
    pub fn insertion_bound(&self) -> u64 {
        2 * self.total_processing + 1
    }
}

/// Jobs sorted by nondecreasing due date, ties broken by input position.
pub fn edd_sort(instance: &Instance) -> Instance {
    let mut jobs = instance.jobs.clone();
    jobs.sort_by_key(|job| (job.due, job.id));
    Instance {
        jobs,
        machines: instance.machines,
    }
}

/// Due-date-ordered jobs with positive processing time. Zero-time jobs never
/// affect any completion time and are always schedulable, so the dynamic
/// programs skip them; [`reconstruct`] adds them back.
pub(crate) fn positive_jobs_edd(instance: &Instance) -> Vec<Job> {
    let mut jobs: Vec<Job> = instance
        .jobs
        .iter()
        .copied()
        .filter(|job| job.processing > 0)
        .collect();
    jobs.sort_by_key(|job| (job.due, job.id));
    jobs
}

/// Solves with the process-wide default fingerprint parameters.
pub fn solve(instance: &Instance) -> Result<SolveResult, Error> {
    solve_with_params(instance, FingerprintParams::global())
}

/// Output-sensitive single-machine solve.
///
/// Starting from the set `{0}`, each job in due-date order first extends
/// the achievable totals by its processing time (sum), then removes totals
/// above its due date (cap). Due dates are clamped to the instance total
/// up front; totals never exceed it, so the clamp changes nothing except
/// keeping every shift inside the universe.
pub fn solve_with_params(
    instance: &Instance,
    params: &Arc<FingerprintParams>,
) -> Result<SolveResult, Error> {
    assert_eq!(instance.machines, 1, "solve() handles single-machine instances");
    let jobs = positive_jobs_edd(instance);
    let total = instance.total_processing();
    let universe = total + 1;

    let mut set = SumCapSet::new(universe, 1, &[vec![0]], params)?;
    let mut provenance = Provenance::new(universe);
    let mut insertions_observed = 0u64;
    for (step, job) in jobs.iter().enumerate() {
        let diff = set
            .sum_shift(job.processing)
            .expect("achievable totals stay within the universe");
        insertions_observed += diff.len() as u64;
        let cap_bound = job.due.min(total);
        for ins in &diff.inserted {
            if ins.index <= cap_bound {
                provenance.record(ins.index, step, 0);
            }
        }
        set.cap(cap_bound);
    }

    let totals = set.members();
    Ok(SolveResult {
        opt: set.max_total().expect("0 is always achievable"),
        totals,
        insertions_observed,
        total_processing: total,
        provenance,
    })
}

/// The classical O(nP) dynamic program over a flat boolean array. Produces
/// the same totals, insertion count and provenance as [`solve`].
pub fn lawler_moore(instance: &Instance) -> SolveResult {
    assert_eq!(instance.machines, 1, "lawler_moore() handles single-machine instances");
    let jobs = positive_jobs_edd(instance);
    let total = instance.total_processing();
    let universe = total + 1;

    let mut achievable = vec![false; universe as usize];
    achievable[0] = true;
    let mut provenance = Provenance::new(universe);
    let mut insertions_observed = 0u64;
    let mut reach = 0u64; // upper bound on the largest achievable total
    for (step, job) in jobs.iter().enumerate() {
        let p = job.processing;
        let cap_bound = job.due.min(total);
        let hi = (reach + p).min(total);
        for s in (p..=hi).rev() {
            if achievable[(s - p) as usize] && !achievable[s as usize] {
                achievable[s as usize] = true;
                insertions_observed += 1;
                if s <= cap_bound {
                    provenance.record(s, step, 0);
                }
            }
        }
        for s in cap_bound + 1..=hi {
            achievable[s as usize] = false;
        }
        reach = hi.min(cap_bound);
    }

    let totals: Vec<u64> = (0..universe).filter(|&s| achievable[s as usize]).collect();
    SolveResult {
        opt: *totals.last().unwrap(),
        totals,
        insertions_observed,
        total_processing: total,
        provenance,
    }
}

/// Exact optimum by enumerating all `2^n` job subsets, checking each with
/// the due-date-ordered prefix-sum test. Refused above
/// [`BRUTE_FORCE_MAX_JOBS`] jobs.
pub fn brute_force(instance: &Instance) -> Result<u64, Error> {
    assert_eq!(instance.machines, 1, "brute_force() handles single-machine instances");
    let n = instance.jobs.len();
    if n > BRUTE_FORCE_MAX_JOBS {
        return Err(Error::SearchSpaceTooLarge {
            space: 1u128 << n,
            limit: 1u128 << BRUTE_FORCE_MAX_JOBS,
        });
    }
    let sorted = edd_sort(instance);
    let mut best = 0u64;
    for mask in 0u32..1 << n {
        let mut completion = 0u64;
        let mut feasible = true;
        for (j, job) in sorted.jobs.iter().enumerate() {
            if mask >> j & 1 == 1 {
                completion += job.processing;
                if completion > job.due {
                    feasible = false;
                    break;
                }
            }
        }
        if feasible {
            best = best.max(completion);
        }
    }
    Ok(best)
}

/// Builds a feasible schedule with total exactly `target` by tracing the
/// provenance table backwards: repeatedly take the job that first made the
/// running total achievable and subtract its processing time.
pub fn reconstruct(
    result: &SolveResult,
    instance: &Instance,
    target: u64,
) -> Result<Schedule, Error> {
    let jobs = positive_jobs_edd(instance);
    if target > result.total_processing {
        return Err(Error::TargetNotAchievable {
            target: target.to_string(),
        });
    }
    let mut chosen: Vec<Job> = Vec::new();
    let mut remaining = target;
    let mut prev_step = usize::MAX;
    while remaining > 0 {
        let Some((step, _)) = result.provenance.get(remaining) else {
            return Err(Error::TargetNotAchievable {
                target: target.to_string(),
            });
        };
        assert!(
            step < prev_step && step < jobs.len(),
            "provenance does not match this instance"
        );
        prev_step = step;
        chosen.push(jobs[step]);
        remaining -= jobs[step].processing;
    }
    // Zero-time jobs are free: always scheduled, always on time.
    chosen.extend(instance.jobs.iter().copied().filter(|j| j.processing == 0));
    chosen.sort_by_key(|job| (job.due, job.id));

    let mut completion = 0u64;
    let entries: Vec<ScheduledJob> = chosen
        .iter()
        .map(|job| {
            completion += job.processing;
            ScheduledJob {
                job: job.id,
                machine: 0,
                completion,
            }
        })
        .collect();
    Ok(Schedule {
        entries,
        total: target,
        tardy_cost: result.total_processing - target,
    })
}
