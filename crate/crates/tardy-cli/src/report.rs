//! Solve report: one `key value` line per field, or a single JSON object
//! with `--json`. Integer fields are always exact.

use serde::Serialize;
use tardy::Schedule;

#[derive(Serialize)]
pub struct Report {
    pub algo: String,
    pub machines: u32,
    pub jobs: usize,
    pub total_processing: u64,
    pub opt: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opt_vector: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub totals_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub insertions_observed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub insertion_bound: Option<u128>,
    pub parse_ms: f64,
    pub solve_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reconstruct_ms: Option<f64>,
    /// One load vector per achievable total; single-machine vectors have
    /// one coordinate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub totals: Option<Vec<Vec<u64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleReport>,
}

#[derive(Serialize)]
pub struct ScheduleReport {
    pub target: Vec<u64>,
    pub total: u64,
    pub tardy_cost: u64,
    pub entries: Vec<EntryReport>,
}

#[derive(Serialize)]
pub struct EntryReport {
    pub job: usize,
    pub machine: u32,
    pub completion: u64,
}

impl ScheduleReport {
    pub fn new(target: Vec<u64>, schedule: &Schedule) -> ScheduleReport {
        ScheduleReport {
            target,
            total: schedule.total,
            tardy_cost: schedule.tardy_cost,
            entries: schedule
                .entries
                .iter()
                .map(|e| EntryReport {
                    job: e.job,
                    machine: e.machine,
                    completion: e.completion,
                })
                .collect(),
        }
    }
}

fn join(vector: &[u64]) -> String {
    let parts: Vec<String> = vector.iter().map(u64::to_string).collect();
    parts.join(",")
}

impl Report {
    pub fn print(&self, json: bool) {
        if json {
            println!("{}", serde_json::to_string(self).expect("report serializes"));
            return;
        }
        println!("algo {}", self.algo);
        println!("machines {}", self.machines);
        println!("jobs {}", self.jobs);
        println!("total_processing {}", self.total_processing);
        println!("opt {}", self.opt);
        if let Some(v) = &self.opt_vector {
            println!("opt_vector {}", join(v));
        }
        if let Some(c) = self.totals_count {
            println!("totals_count {c}");
        }
        if let Some(i) = self.insertions_observed {
            println!("insertions_observed {i}");
        }
        if let Some(b) = self.insertion_bound {
            println!("insertion_bound {b}");
        }
        println!("parse_ms {:.6}", self.parse_ms);
        println!("solve_ms {:.6}", self.solve_ms);
        if let Some(ms) = self.reconstruct_ms {
            println!("reconstruct_ms {ms:.6}");
        }
        if let Some(totals) = &self.totals {
            let parts: Vec<String> = totals.iter().map(|v| join(v)).collect();
            println!("totals {}", parts.join(" "));
        }
        if let Some(schedule) = &self.schedule {
            println!("schedule_target {}", join(&schedule.target));
            println!("schedule_total {}", schedule.total);
            println!("tardy_cost {}", schedule.tardy_cost);
            for entry in &schedule.entries {
                println!("scheduled {} {} {}", entry.job, entry.machine, entry.completion);
            }
        }
    }
}
