//! Problem instances, schedules, and the plain-text instance format.
//!
//! An instance file starts with a header line `m n` (machine count and job
//! count), followed by `n` lines `p d` with one job's processing time and
//! due date. Everything from `#` to the end of a line is a comment; blank
//! lines are ignored. Serializing then parsing is the identity, and parsing
//! then serializing normalizes comments and whitespace away.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// One job: how long it runs and when it must be finished.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Job {
    pub processing: u64,
    pub due: u64,
    /// Position in the original input, stable under reordering.
    pub id: usize,
}

/// A job list plus the machine count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub jobs: Vec<Job>,
    pub machines: u32,
}

impl Instance {
    /// Builds an instance from `(processing, due)` pairs; ids follow input
    /// order.
    pub fn new(machines: u32, pairs: &[(u64, u64)]) -> Instance {
        assert!(machines >= 1, "machine count must be positive");
        Instance {
            jobs: pairs
                .iter()
                .enumerate()
                .map(|(id, &(processing, due))| Job { processing, due, id })
                .collect(),
            machines,
        }
    }

    pub fn job_count(&self) -> usize {
        self.jobs.len()
    }

    /// Total processing time over all jobs.
    pub fn total_processing(&self) -> u64 {
        self.jobs.iter().map(|j| j.processing).sum()
    }

    /// One past the largest achievable total: `total_processing() + 1`.
    pub fn universe(&self) -> u64 {
        self.total_processing() + 1
    }
}

impl FromStr for Instance {
    type Err = Error;

    fn from_str(text: &str) -> Result<Instance, Error> {
        let mut lines = text.lines().enumerate().filter_map(|(idx, raw)| {
            let content = raw.split('#').next().unwrap_or("").trim();
            (!content.is_empty()).then_some((idx + 1, content))
        });

        let (header_line, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing header line"))?;
        let mut fields = header.split_whitespace();
        let machines: u32 = parse_field(&mut fields, header_line, "machine count")?;
        let count: usize = parse_field(&mut fields, header_line, "job count")?;
        if fields.next().is_some() {
            return Err(Error::parse(header_line, "trailing data after header"));
        }
        if machines == 0 {
            return Err(Error::parse(header_line, "machine count must be positive"));
        }

        let mut jobs = Vec::with_capacity(count);
        let mut running_total = 0u64;
        for (line, content) in lines {
            if jobs.len() == count {
                return Err(Error::parse(
                    line,
                    format!("more than the declared {count} job lines"),
                ));
            }
            let mut fields = content.split_whitespace();
            let processing: u64 = parse_field(&mut fields, line, "processing time")?;
            let due: u64 = parse_field(&mut fields, line, "due date")?;
            running_total = running_total.checked_add(processing).ok_or_else(|| {
                Error::parse(line, "total processing time exceeds the 64-bit range")
            })?;
            if fields.next().is_some() {
                return Err(Error::parse(line, "trailing data after job line"));
            }
            if processing == 0 {
                return Err(Error::parse(line, "processing time must be positive"));
            }
            if due == 0 {
                return Err(Error::parse(line, "due date must be positive"));
            }
            jobs.push(Job {
                processing,
                due,
                id: jobs.len(),
            });
        }
        if jobs.len() != count {
            return Err(Error::parse(
                text.lines().count(),
                format!("header declares {count} jobs, found {}", jobs.len()),
            ));
        }
        Ok(Instance { jobs, machines })
    }
}

fn parse_field<T: FromStr>(
    fields: &mut std::str::SplitWhitespace<'_>,
    line: usize,
    what: &str,
) -> Result<T, Error> {
    let raw = fields
        .next()
        .ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    raw.parse()
        .map_err(|_| Error::parse(line, format!("invalid {what}: {raw:?}")))
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.machines, self.jobs.len())?;
        for job in &self.jobs {
            writeln!(f, "{} {}", job.processing, job.due)?;
        }
        Ok(())
    }
}

/// One scheduled job: which machine runs it and when it finishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduledJob {
    pub job: usize,
    pub machine: u32,
    pub completion: u64,
}

/// A feasible selection of jobs with machine assignments and completion
/// times. Jobs not listed are tardy; their processing time is the cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub entries: Vec<ScheduledJob>,
    pub total: u64,
    pub tardy_cost: u64,
}

impl Schedule {
    /// Checks every schedule invariant against the instance:
    /// ids valid and distinct, machines in range, due dates nondecreasing
    /// per machine, completion times consistent with processing times,
    /// every scheduled job on time, and the total/tardy split exact.
    pub fn validate(&self, instance: &Instance) -> Result<(), String> {
        let mut seen = vec![false; instance.jobs.len()];
        let mut machine_state: Vec<Option<(u64, u64)>> =
            vec![None; instance.machines as usize];
        let mut total = 0u64;
        for entry in &self.entries {
            let job = instance
                .jobs
                .get(entry.job)
                .ok_or_else(|| format!("unknown job id {}", entry.job))?;
            if seen[entry.job] {
                return Err(format!("job {} scheduled twice", entry.job));
            }
            seen[entry.job] = true;
            if entry.machine >= instance.machines {
                return Err(format!(
                    "machine {} out of range for {} machines",
                    entry.machine, instance.machines
                ));
            }
            let state = &mut machine_state[entry.machine as usize];
            let (prev_completion, prev_due) = state.unwrap_or((0, 0));
            if job.due < prev_due {
                return Err(format!(
                    "job {} breaks due-date order on machine {}",
                    entry.job, entry.machine
                ));
            }
            let expected = prev_completion + job.processing;
            if entry.completion != expected {
                return Err(format!(
                    "job {} completes at {} but {} was expected",
                    entry.job, entry.completion, expected
                ));
            }
            if entry.completion > job.due {
                return Err(format!(
                    "job {} finishes at {} past its due date {}",
                    entry.job, entry.completion, job.due
                ));
            }
            *state = Some((entry.completion, job.due));
            total += job.processing;
        }
        if total != self.total {
            return Err(format!("total {} but entries sum to {total}", self.total));
        }
        let all = instance.total_processing();
        if self.total + self.tardy_cost != all {
            return Err(format!(
                "total {} + tardy {} does not cover the instance total {all}",
                self.total, self.tardy_cost
            ));
        }
        Ok(())
    }

    /// Per-machine totals (the load vector this schedule achieves).
    pub fn machine_totals(&self, instance: &Instance) -> Vec<u64> {
        let mut totals = vec![0u64; instance.machines as usize];
        for entry in &self.entries {
            totals[entry.machine as usize] += instance.jobs[entry.job].processing;
        }
        totals
    }
}
