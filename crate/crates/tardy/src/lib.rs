//! Solvers for maximizing on-time work: pick and order jobs so that every
//! chosen job meets its due date and the total processing time of the chosen
//! jobs is as large as possible, on one machine or on `m` identical machines.
//!
//! The fast single-machine solver runs in O(P log^2 P) where P is the total
//! processing time, by maintaining the set of achievable totals as a bit
//! string in a balanced rope ([`bitrope::BitRope`]) and updating it with
//! output-sensitive shift-and-diff sums and cheap caps ([`sumcap::SumCapSet`]).
//! The m-machine generalization runs in O(P^m polylog P). A classical
//! O(nP) dynamic program and an exponential brute force are included as
//! baselines and cross-checking oracles.

pub mod bitrope;
pub mod error;
pub mod fingerprint;
pub mod gen;
pub mod instance;
pub mod solver;
pub mod solver_multi;
pub mod sumcap;

pub use bitrope::BitRope;
pub use error::Error;
pub use fingerprint::FingerprintParams;
pub use gen::{generate, DeadlineModel, GenConfig};
pub use instance::{Instance, Job, Schedule, ScheduledJob};
pub use solver::{brute_force, edd_sort, lawler_moore, reconstruct, solve, SolveResult};
pub use solver_multi::{
    brute_force_multi, lawler_moore_multi, reconstruct_multi, solve_multi, MultiSolveResult,
};
pub use sumcap::{DiffReport, Insertion, SumCapSet};
