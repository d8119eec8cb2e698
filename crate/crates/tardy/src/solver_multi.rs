//! Solvers for `m` identical machines.
//!
//! Achievable states become load vectors: coordinate `i` is the total
//! processing time assigned to machine `i`. Each job in due-date order
//! either stays unscheduled or lands on one machine (sum with the unit
//! shifts `p*e_0 .. p*e_(m-1)`), and every coordinate must stay within the
//! current due date (cap). The flattened vector set lives in the same
//! [`SumCapSet`] as the single-machine solver; total insertions over a run
//! are bounded by `(m+1) * (P+1)^m`.

use std::sync::Arc;

use crate::error::Error;
use crate::fingerprint::FingerprintParams;
use crate::instance::{Instance, Job, Schedule, ScheduledJob};
use crate::solver::{positive_jobs_edd, solve_with_params, Provenance};
use crate::sumcap::{SumCapSet, DEFAULT_UNIVERSE_LIMIT};

/// Largest assignment count `(m+1)^n` accepted by [`brute_force_multi`].
pub const BRUTE_FORCE_MAX_ASSIGNMENTS: u128 = 1_000_000;

/// Outcome of an m-machine solve.
#[derive(Debug, Clone)]
pub struct MultiSolveResult {
    /// Largest achievable coordinate sum.
    pub opt: u64,
    /// A load vector attaining `opt`.
    pub opt_vector: Vec<u64>,
    /// Flattened indices of all achievable load vectors, ascending.
    pub totals: Vec<u64>,
    /// Elements inserted across all sum steps, counted before capping.
    pub insertions_observed: u64,
    /// Total processing time of the instance.
    pub total_processing: u64,
    /// Per-coordinate bound: `total_processing + 1`.
    pub universe: u64,
    pub machines: u32,
    /// Trace-back table for [`reconstruct_multi`].
    pub provenance: Provenance,
}

impl MultiSolveResult {
    /// The proven ceiling on `insertions_observed`: `(m+1) * (P+1)^m`.
    pub fn insertion_bound(&self) -> u128 {
        (self.machines as u128 + 1) * (self.universe as u128).pow(self.machines)
    }

    pub fn flatten(&self, vector: &[u64]) -> u64 {
        assert_eq!(vector.len(), self.machines as usize);
        let mut index = 0u64;
        let mut stride = 1u64;
        for &coord in vector {
            assert!(coord < self.universe, "coordinate {coord} out of range");
            index += coord * stride;
            stride = stride.saturating_mul(self.universe);
        }
        index
    }

    pub fn unflatten(&self, index: u64) -> Vec<u64> {
        let mut rest = index;
        (0..self.machines)
            .map(|_| {
                let coord = rest % self.universe;
                rest /= self.universe;
                coord
            })
            .collect()
    }

    /// All achievable load vectors, in ascending flattened order.
    pub fn total_vectors(&self) -> Vec<Vec<u64>> {
        self.totals.iter().map(|&i| self.unflatten(i)).collect()
    }

    pub fn contains_vector(&self, vector: &[u64]) -> bool {
        self.totals.binary_search(&self.flatten(vector)).is_ok()
    }
}

/// Solves with the process-wide default fingerprint parameters.
pub fn solve_multi(instance: &Instance) -> Result<MultiSolveResult, Error> {
    solve_multi_with_params(instance, FingerprintParams::global())
}

/// Output-sensitive m-machine solve. Single-machine instances delegate to
/// the specialized solver.
pub fn solve_multi_with_params(
    instance: &Instance,
    params: &Arc<FingerprintParams>,
) -> Result<MultiSolveResult, Error> {
    if instance.machines == 1 {
        return solve_with_params(instance, params).map(|r| into_multi(r, instance));
    }
    let machines = instance.machines;
    let jobs = positive_jobs_edd(instance);
    let total = instance.total_processing();
    let universe = total + 1;

    let mut set = SumCapSet::new(universe, machines, &[vec![0; machines as usize]], params)?;
    let mut provenance = Provenance::new(set.rope().len());
    let mut insertions_observed = 0u64;
    for (step, job) in jobs.iter().enumerate() {
        let diff = set
            .sum_unit_shifts(job.processing)
            .expect("machine loads stay within the universe");
        insertions_observed += diff.len() as u64;
        let cap_bound = job.due.min(total);
        for ins in &diff.inserted {
            if within_cap(ins.index, universe, machines, cap_bound) {
                provenance.record(ins.index, step, ins.machine);
            }
        }
        set.cap(cap_bound);
    }

    let totals = set.members();
    let (opt, opt_vector) = best_vector(&totals, universe, machines);
    Ok(MultiSolveResult {
        opt,
        opt_vector,
        totals,
        insertions_observed,
        total_processing: total,
        universe,
        machines,
        provenance,
    })
}

fn into_multi(single: crate::solver::SolveResult, instance: &Instance) -> MultiSolveResult {
    MultiSolveResult {
        opt: single.opt,
        opt_vector: vec![single.opt],
        totals: single.totals,
        insertions_observed: single.insertions_observed,
        total_processing: single.total_processing,
        universe: single.total_processing + 1,
        machines: instance.machines,
        provenance: single.provenance,
    }
}

fn within_cap(index: u64, universe: u64, machines: u32, bound: u64) -> bool {
    let mut rest = index;
    for _ in 0..machines {
        if rest % universe > bound {
            return false;
        }
        rest /= universe;
    }
    true
}

fn best_vector(totals: &[u64], universe: u64, machines: u32) -> (u64, Vec<u64>) {
    let mut best = 0u64;
    let mut best_index = 0u64;
    for &index in totals {
        let mut rest = index;
        let mut sum = 0u64;
        for _ in 0..machines {
            sum += rest % universe;
            rest /= universe;
        }
        if sum > best {
            best = sum;
            best_index = index;
        }
    }
    let mut rest = best_index;
    let vector = (0..machines)
        .map(|_| {
            let c = rest % universe;
            rest /= universe;
            c
        })
        .collect();
    (best, vector)
}

/// The O(nP^m) flat dynamic program, used as the polynomial oracle.
pub fn lawler_moore_multi(instance: &Instance) -> Result<MultiSolveResult, Error> {
    let machines = instance.machines;
    let jobs = positive_jobs_edd(instance);
    let total = instance.total_processing();
    let universe = total + 1;

    let flat: u128 = (universe as u128).saturating_pow(machines);
    if flat > DEFAULT_UNIVERSE_LIMIT as u128 {
        return Err(Error::Capacity {
            needed: flat,
            limit: DEFAULT_UNIVERSE_LIMIT,
        });
    }
    let flat = flat as u64;
    let strides: Vec<u64> = (0..machines)
        .scan(1u64, |acc, _| {
            let s = *acc;
            *acc = acc.saturating_mul(universe);
            Some(s)
        })
        .collect();

    let mut current = vec![false; flat as usize];
    current[0] = true;
    let mut provenance = Provenance::new(flat);
    let mut insertions_observed = 0u64;
    let mut first_machine = vec![0u8; flat as usize];
    for (step, job) in jobs.iter().enumerate() {
        let p = job.processing;
        let cap_bound = job.due.min(total);
        let mut next = current.clone();
        for index in 0..flat {
            if !current[index as usize] {
                continue;
            }
            for (machine, &stride) in strides.iter().enumerate() {
                if index / stride % universe + p < universe {
                    let target = index + p * stride;
                    if !next[target as usize] {
                        next[target as usize] = true;
                        first_machine[target as usize] = machine as u8;
                    }
                }
            }
        }
        for index in 0..flat {
            if next[index as usize] && !current[index as usize] {
                insertions_observed += 1;
                if within_cap(index, universe, machines, cap_bound) {
                    provenance.record(index, step, first_machine[index as usize] as u32);
                } else {
                    next[index as usize] = false;
                }
            } else if next[index as usize] && !within_cap(index, universe, machines, cap_bound) {
                next[index as usize] = false;
            }
        }
        current = next;
    }

    let totals: Vec<u64> = (0..flat).filter(|&i| current[i as usize]).collect();
    let (opt, opt_vector) = best_vector(&totals, universe, machines);
    Ok(MultiSolveResult {
        opt,
        opt_vector,
        totals,
        insertions_observed,
        total_processing: total,
        universe,
        machines,
        provenance,
    })
}

/// Exact optimum by enumerating every assignment of each job to a machine
/// or to "skip", with per-machine due-date-ordered prefix checks. Refused
/// when `(machines+1)^n` exceeds [`BRUTE_FORCE_MAX_ASSIGNMENTS`].
pub fn brute_force_multi(instance: &Instance) -> Result<u64, Error> {
    let machines = instance.machines;
    let sorted = crate::solver::edd_sort(instance);
    let n = sorted.jobs.len();
    let space = (machines as u128 + 1)
        .checked_pow(n as u32)
        .unwrap_or(u128::MAX);
    if space > BRUTE_FORCE_MAX_ASSIGNMENTS {
        return Err(Error::SearchSpaceTooLarge {
            space,
            limit: BRUTE_FORCE_MAX_ASSIGNMENTS,
        });
    }

    fn explore(jobs: &[Job], loads: &mut Vec<u64>, scheduled: u64, best: &mut u64) {
        let Some((job, rest)) = jobs.split_first() else {
            *best = (*best).max(scheduled);
            return;
        };
        // Skip the job.
        explore(rest, loads, scheduled, best);
        for m in 0..loads.len() {
            let completion = loads[m] + job.processing;
            if completion <= job.due {
                loads[m] = completion;
                explore(rest, loads, scheduled + job.processing, best);
                loads[m] -= job.processing;
            }
        }
    }

    let mut best = 0u64;
    let mut loads = vec![0u64; machines as usize];
    explore(&sorted.jobs, &mut loads, 0, &mut best);
    Ok(best)
}

/// Builds a feasible schedule whose per-machine totals equal
/// `target_vector`, tracing provenance backwards one job at a time.
pub fn reconstruct_multi(
    result: &MultiSolveResult,
    instance: &Instance,
    target_vector: &[u64],
) -> Result<Schedule, Error> {
    assert_eq!(
        target_vector.len(),
        result.machines as usize,
        "target vector must have one coordinate per machine"
    );
    let describe = || {
        let parts: Vec<String> = target_vector.iter().map(u64::to_string).collect();
        parts.join(",")
    };
    if target_vector.iter().any(|&c| c > result.total_processing) {
        return Err(Error::TargetNotAchievable { target: describe() });
    }
    let jobs = positive_jobs_edd(instance);
    let mut index = result.flatten(target_vector);
    let mut per_machine: Vec<Vec<Job>> = vec![Vec::new(); result.machines as usize];
    let mut prev_step = usize::MAX;
    while index != 0 {
        let Some((step, machine)) = result.provenance.get(index) else {
            return Err(Error::TargetNotAchievable { target: describe() });
        };
        assert!(
            step < prev_step && step < jobs.len(),
            "provenance does not match this instance"
        );
        prev_step = step;
        let job = jobs[step];
        per_machine[machine as usize].push(job);
        let stride = (0..machine).fold(1u64, |acc, _| acc * result.universe);
        index -= job.processing * stride;
    }
    // Trace-back visits jobs in decreasing due-date order.
    for list in &mut per_machine {
        list.reverse();
    }
    // Zero-time jobs are free; run them all on machine 0 in due-date order.
    per_machine[0].extend(instance.jobs.iter().copied().filter(|j| j.processing == 0));
    per_machine[0].sort_by_key(|job| (job.due, job.id));

    let mut entries = Vec::new();
    for (machine, list) in per_machine.iter().enumerate() {
        let mut completion = 0u64;
        for job in list {
            completion += job.processing;
            entries.push(ScheduledJob {
                job: job.id,
                machine: machine as u32,
                completion,
            });
        }
    }
    let total: u64 = target_vector.iter().sum();
    Ok(Schedule {
        entries,
        total,
        tardy_cost: result.total_processing - total,
    })
}
