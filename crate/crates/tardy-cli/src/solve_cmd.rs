use std::path::PathBuf;
use std::time::Instant;

use tardy::{
    brute_force, brute_force_multi, lawler_moore, lawler_moore_multi, reconstruct,
    reconstruct_multi, solve, solve_multi, Instance,
};

use crate::report::{Report, ScheduleReport};
use crate::CliError;

#[derive(clap::Args)]
pub struct SolveArgs {
    /// Instance file.
    path: PathBuf,
    /// Solver: fast, lm or brute.
    #[arg(long, default_value = "fast")]
    algo: String,
    /// Reconstruct a schedule; give a total (comma-separated per machine
    /// when m > 1) or omit the value to use the optimum.
    #[arg(long, num_args = 0..=1, default_missing_value = "opt")]
    schedule: Option<String>,
    /// Include the full list of achievable totals in the report.
    #[arg(long)]
    emit_totals: bool,
    /// Emit one JSON object instead of key-value lines.
    #[arg(long)]
    json: bool,
}

fn parse_target(raw: &str, opt_vector: &[u64]) -> Result<Vec<u64>, CliError> {
    if raw == "opt" {
        return Ok(opt_vector.to_vec());
    }
    raw.split(',')
        .map(|part| {
            part.trim()
                .parse()
                .map_err(|_| CliError::usage(format!("invalid schedule target {raw:?}")))
        })
        .collect()
}

pub fn run(args: &SolveArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.path)?;
    let parse_start = Instant::now();
    let instance: Instance = text.parse().map_err(CliError::from)?;
    let parse_ms = parse_start.elapsed().as_secs_f64() * 1e3;

    let mut report = Report {
        algo: args.algo.clone(),
        machines: instance.machines,
        jobs: instance.job_count(),
        total_processing: instance.total_processing(),
        opt: 0,
        opt_vector: None,
        totals_count: None,
        insertions_observed: None,
        insertion_bound: None,
        parse_ms,
        solve_ms: 0.0,
        reconstruct_ms: None,
        totals: None,
        schedule: None,
    };

    let single = instance.machines == 1;
    let solve_start = Instant::now();
    match args.algo.as_str() {
        "brute" => {
            report.opt = if single {
                brute_force(&instance)?
            } else {
                brute_force_multi(&instance)?
            };
            report.solve_ms = solve_start.elapsed().as_secs_f64() * 1e3;
            if args.schedule.is_some() || args.emit_totals {
                return Err(CliError::usage(
                    "--schedule and --emit-totals need --algo fast or lm",
                ));
            }
        }
        algo @ ("fast" | "lm") => {
            if single {
                let result = match algo {
                    "fast" => solve(&instance)?,
                    _ => lawler_moore(&instance),
                };
                report.solve_ms = solve_start.elapsed().as_secs_f64() * 1e3;
                report.opt = result.opt;
                report.totals_count = Some(result.totals.len());
                report.insertions_observed = Some(result.insertions_observed);
                report.insertion_bound = Some(result.insertion_bound() as u128);
                if args.emit_totals {
                    report.totals = Some(result.totals.iter().map(|&t| vec![t]).collect());
                }
                if let Some(raw) = &args.schedule {
                    let target = parse_target(raw, &[result.opt])?;
                    if target.len() != 1 {
                        return Err(CliError::usage(
                            "single-machine schedule target must be one total",
                        ));
                    }
                    let start = Instant::now();
                    let schedule = reconstruct(&result, &instance, target[0])?;
                    report.reconstruct_ms = Some(start.elapsed().as_secs_f64() * 1e3);
                    report.schedule = Some(ScheduleReport::new(target, &schedule));
                }
            } else {
                let result = match algo {
                    "fast" => solve_multi(&instance)?,
                    _ => lawler_moore_multi(&instance)?,
                };
                report.solve_ms = solve_start.elapsed().as_secs_f64() * 1e3;
                report.opt = result.opt;
                report.opt_vector = Some(result.opt_vector.clone());
                report.totals_count = Some(result.totals.len());
                report.insertions_observed = Some(result.insertions_observed);
                report.insertion_bound = Some(result.insertion_bound());
                if args.emit_totals {
                    report.totals = Some(result.total_vectors());
                }
                if let Some(raw) = &args.schedule {
                    let target = parse_target(raw, &result.opt_vector)?;
                    if target.len() != result.machines as usize {
                        return Err(CliError::usage(format!(
                            "schedule target needs {} comma-separated totals",
                            result.machines
                        )));
                    }
                    let start = Instant::now();
                    let schedule = reconstruct_multi(&result, &instance, &target)?;
                    report.reconstruct_ms = Some(start.elapsed().as_secs_f64() * 1e3);
                    report.schedule = Some(ScheduleReport::new(target, &schedule));
                }
            }
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown algorithm {other:?} (expected fast, lm or brute)"
            )));
        }
    }

    report.print(args.json);
    Ok(())
}
