//! # taskga-core
//!
//! Scheduling of precedence-constrained task graphs onto `m` identical
//! processors, minimizing makespan (`P | prec | C_max`).
//!
//! The crate is `no_std` and only needs `alloc`. It contains:
//!
//!  1. [`taskgraph`] - the DAG model, validation, task heights, critical path
//!     and a seeded random instance generator.
//!  2. [`schedule`] - the per-processor list encoding ([`Chromosome`]) and its
//!     deterministic evaluation into a [`GanttChart`].
//!  3. [`ga`] - the height-structured genetic algorithm (height-level random
//!     initialization, roulette reproduction with elitism, height-cut
//!     crossover, same-height mutation).
//!  4. [`baseline`] - a list-scheduling heuristic and an exact branch & bound
//!     search over the same encoding, used as an optimality oracle.
//!
//! ## Example
//! ```rust
//! use taskga_core::{ga, GaConfig, TaskGraph};
//!
//! // diamond: 0 -> {1, 2} -> 3
//! let graph = TaskGraph::new(vec![1, 2, 3, 1], vec![(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
//! let result = ga::run(&graph, 2, &GaConfig::default().with_seed(7)).unwrap();
//! assert_eq!(result.best_makespan, 5);
//! ```
#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod baseline;
pub mod ga;
pub mod schedule;
pub mod taskgraph;

pub use baseline::{
    brute_force_optimal, list_schedule, OptimalSchedule, PolicyKind, PriorityPolicy,
};
pub use ga::{GaConfig, GaResult, GenerationStats};
pub use schedule::{Chromosome, GanttChart, ScheduleError, ScheduleViolation, Slot};
pub use taskgraph::{GenSpec, GraphError, HeightMap, TaskGraph, Violation};

/// Task index, dense in `0..n`.
pub type TaskId = usize;

/// Integer time units.
pub type Time = u64;

/// `max(t_cp, ceil(sum(et) / m))`, the classical makespan lower bound.
pub fn lower_bound(graph: &TaskGraph, procs: usize) -> Time {
    let procs = procs.max(1) as Time;
    graph
        .critical_path_length()
        .max(graph.total_work().div_ceil(procs))
}
