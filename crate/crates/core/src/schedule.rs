//! Per-processor task lists and their evaluation.
//!
//! A [`Chromosome`] holds one ordered task list per processor. Evaluation is
//! strict in-order: each processor runs its list front to back, and a task
//! starts once its processor is free and all of its predecessors have
//! finished. The processor idles while its head task waits.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::taskgraph::{HeightMap, TaskGraph};
use crate::{TaskId, Time};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chromosome {
    procs: Vec<Vec<TaskId>>,
}

impl Chromosome {
    pub fn new(procs: Vec<Vec<TaskId>>) -> Self {
        Chromosome { procs }
    }

    /// `m` empty processor lists.
    pub fn empty(m: usize) -> Self {
        Chromosome {
            procs: vec![Vec::new(); m],
        }
    }

    pub fn processor_count(&self) -> usize {
        self.procs.len()
    }

    pub fn processors(&self) -> &[Vec<TaskId>] {
        &self.procs
    }

    pub fn processor(&self, p: usize) -> &[TaskId] {
        &self.procs[p]
    }

    pub(crate) fn processors_mut(&mut self) -> &mut [Vec<TaskId>] {
        &mut self.procs
    }

    pub fn into_processors(self) -> Vec<Vec<TaskId>> {
        self.procs
    }

    /// Number of task entries over all lists.
    pub fn len(&self) -> usize {
        self.procs.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(processor, index)` of every task. `None` if a task is missing,
    /// duplicated or out of range.
    fn positions(&self, n: usize) -> Option<Vec<(usize, usize)>> {
        let mut pos = vec![(usize::MAX, 0); n];
        let mut placed = 0;
        for (p, list) in self.procs.iter().enumerate() {
            for (i, &t) in list.iter().enumerate() {
                if t >= n || pos[t].0 != usize::MAX {
                    return None;
                }
                pos[t] = (p, i);
                placed += 1;
            }
        }
        (placed == n).then_some(pos)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScheduleViolation {
    NoProcessors,
    UnknownTask {
        task: TaskId,
    },
    MissingTask {
        task: TaskId,
    },
    DuplicateTask {
        task: TaskId,
    },
    /// `later` sits directly after `earlier` on `processor` but has a lower height.
    HeightInversion {
        processor: usize,
        earlier: TaskId,
        later: TaskId,
    },
    /// The lists cannot all run to completion; these tasks never start.
    Deadlock {
        blocked: Vec<TaskId>,
    },
}

impl fmt::Display for ScheduleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleViolation::NoProcessors => write!(f, "schedule has no processors"),
            ScheduleViolation::UnknownTask { task } => write!(f, "unknown task {task}"),
            ScheduleViolation::MissingTask { task } => write!(f, "task {task} is not scheduled"),
            ScheduleViolation::DuplicateTask { task } => {
                write!(f, "task {task} is scheduled more than once")
            }
            ScheduleViolation::HeightInversion {
                processor,
                earlier,
                later,
            } => write!(
                f,
                "processor {processor}: task {later} runs after higher task {earlier}"
            ),
            ScheduleViolation::Deadlock { blocked } => {
                write!(f, "deadlock, tasks {blocked:?} never start")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleError {
    pub violations: Vec<ScheduleViolation>,
}

impl fmt::Display for ScheduleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid schedule: ")?;
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl core::error::Error for ScheduleError {}

fn completeness(n: usize, c: &Chromosome) -> Vec<ScheduleViolation> {
    let mut out = Vec::new();
    if c.processor_count() == 0 {
        out.push(ScheduleViolation::NoProcessors);
    }
    let mut count = vec![0usize; n];
    for &t in c.procs.iter().flatten() {
        match count.get_mut(t) {
            Some(k) => {
                *k += 1;
                if *k == 2 {
                    out.push(ScheduleViolation::DuplicateTask { task: t });
                }
            }
            None => out.push(ScheduleViolation::UnknownTask { task: t }),
        }
    }
    out.extend(
        count
            .iter()
            .enumerate()
            .filter(|&(_, &k)| k == 0)
            .map(|(task, _)| ScheduleViolation::MissingTask { task }),
    );
    out
}

/// Checks completeness, uniqueness and the height-ordering condition (task
/// heights non-decreasing along every processor list).
pub fn validate_chromosome(
    graph: &TaskGraph,
    heights: &HeightMap,
    c: &Chromosome,
) -> Result<(), Vec<ScheduleViolation>> {
    let mut violations = completeness(graph.task_count(), c);
    for (processor, list) in c.procs.iter().enumerate() {
        for pair in list.windows(2) {
            let (earlier, later) = (pair[0], pair[1]);
            if earlier < heights.len()
                && later < heights.len()
                && heights.height(later) < heights.height(earlier)
            {
                violations.push(ScheduleViolation::HeightInversion {
                    processor,
                    earlier,
                    later,
                });
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Checks completeness, uniqueness and that in-order execution can run every
/// list to the end. Height-ordered chromosomes always pass; so does the
/// start-time order of any precedence-feasible schedule.
pub fn check_feasible(graph: &TaskGraph, c: &Chromosome) -> Result<(), Vec<ScheduleViolation>> {
    let violations = completeness(graph.task_count(), c);
    if !violations.is_empty() {
        return Err(violations);
    }
    match simulate(graph, c) {
        Ok(_) => Ok(()),
        Err(blocked) => Err(vec![ScheduleViolation::Deadlock { blocked }]),
    }
}

/// Placement of one task in a [`GanttChart`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Slot {
    pub processor: usize,
    pub start: Time,
    pub finish: Time,
}

/// An evaluated schedule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GanttChart {
    processor_count: usize,
    slots: Vec<Slot>,
    makespan: Time,
}

impl GanttChart {
    /// Builds a chart from per-task slots; `slots[t]` belongs to task `t`.
    pub fn from_slots(processor_count: usize, slots: Vec<Slot>) -> Self {
        let makespan = slots.iter().map(|s| s.finish).max().unwrap_or(0);
        GanttChart {
            processor_count,
            slots,
            makespan,
        }
    }

    /// `FT(S)`: finish time of the last task. Idle processors count as 0.
    pub fn makespan(&self) -> Time {
        self.makespan
    }

    pub fn processor_count(&self) -> usize {
        self.processor_count
    }

    pub fn slot(&self, task: TaskId) -> Slot {
        self.slots[task]
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    /// Finish time of the last task on each processor (`ftp(P_j)`).
    pub fn processor_finish_times(&self) -> Vec<Time> {
        let mut ftp = vec![0; self.processor_count];
        for s in &self.slots {
            ftp[s.processor] = ftp[s.processor].max(s.finish);
        }
        ftp
    }

    /// Tasks of each processor ordered by start time (ties by id).
    pub fn processor_lists(&self) -> Chromosome {
        let mut procs = vec![Vec::new(); self.processor_count];
        for (t, s) in self.slots.iter().enumerate() {
            procs[s.processor].push(t);
        }
        for list in &mut procs {
            list.sort_by_key(|&t| (self.slots[t].start, t));
        }
        Chromosome::new(procs)
    }

    /// Checks the chart against `graph`: one slot per task with the right
    /// duration, no overlap on any processor, predecessors finished before
    /// successors start, and the makespan equal to the latest finish.
    pub fn is_consistent_with(&self, graph: &TaskGraph) -> bool {
        if self.slots.len() != graph.task_count() {
            return false;
        }
        let durations = self.slots.iter().enumerate().all(|(t, s)| {
            s.processor < self.processor_count && s.finish == s.start + graph.exec_time(t)
        });
        let precedence = graph
            .edges()
            .iter()
            .all(|&(u, v)| self.slots[v].start >= self.slots[u].finish);
        let overlap_free = self.processor_lists().procs.iter().all(|list| {
            list.windows(2)
                .all(|w| self.slots[w[1]].start >= self.slots[w[0]].finish)
        });
        let makespan = self.slots.iter().map(|s| s.finish).max().unwrap_or(0) == self.makespan;
        durations && precedence && overlap_free && makespan
    }
}

/// In-order simulation over the precedence edges plus the implicit edges
/// between consecutive entries of each processor list. Expects every task
/// exactly once; returns the blocked tasks on deadlock.
fn simulate(graph: &TaskGraph, c: &Chromosome) -> Result<Vec<Slot>, Vec<TaskId>> {
    let n = graph.task_count();
    let pos = c.positions(n).expect("caller checks completeness");

    let mut waiting: Vec<usize> = (0..n)
        .map(|t| graph.predecessors(t).len() + usize::from(pos[t].1 > 0))
        .collect();
    let mut ready: Vec<TaskId> = (0..n).filter(|&t| waiting[t] == 0).collect();
    let mut slots = vec![
        Slot {
            processor: 0,
            start: 0,
            finish: 0
        };
        n
    ];
    let mut done = 0;

    while let Some(t) = ready.pop() {
        let (p, i) = pos[t];
        let proc_free = if i > 0 {
            slots[c.procs[p][i - 1]].finish
        } else {
            0
        };
        let preds_done = graph
            .predecessors(t)
            .iter()
            .map(|&u| slots[u].finish)
            .max()
            .unwrap_or(0);
        let start = proc_free.max(preds_done);
        slots[t] = Slot {
            processor: p,
            start,
            finish: start + graph.exec_time(t),
        };
        done += 1;

        let next_on_proc = c.procs[p].get(i + 1).copied();
        for s in graph.successors(t).iter().copied().chain(next_on_proc) {
            waiting[s] -= 1;
            if waiting[s] == 0 {
                ready.push(s);
            }
        }
    }

    if done == n {
        Ok(slots)
    } else {
        Err((0..n).filter(|&t| waiting[t] > 0).collect())
    }
}

/// Evaluates a chromosome into its Gantt chart.
///
/// Rejects incomplete lists, duplicated tasks and orders that deadlock.
pub fn evaluate(graph: &TaskGraph, c: &Chromosome) -> Result<GanttChart, ScheduleError> {
    let violations = completeness(graph.task_count(), c);
    if !violations.is_empty() {
        return Err(ScheduleError { violations });
    }
    simulate(graph, c)
        .map(|slots| GanttChart::from_slots(c.processor_count(), slots))
        .map_err(|blocked| ScheduleError {
            violations: vec![ScheduleViolation::Deadlock { blocked }],
        })
}

/// Makespan of a chromosome already known to be complete and deadlock-free.
pub(crate) fn makespan_unchecked(graph: &TaskGraph, c: &Chromosome) -> Time {
    simulate(graph, c)
        .expect("valid chromosome cannot deadlock")
        .iter()
        .map(|s| s.finish)
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain2(et: [Time; 2]) -> TaskGraph {
        TaskGraph::new(et.to_vec(), vec![(0, 1)]).unwrap()
    }

    fn diamond() -> TaskGraph {
        TaskGraph::new(vec![1, 2, 3, 1], vec![(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn validate_examples() {
        let g = chain2([1, 1]);
        let h = g.heights();
        assert_eq!(
            validate_chromosome(&g, &h, &Chromosome::new(vec![vec![0], vec![1]])),
            Ok(())
        );
        assert_eq!(
            validate_chromosome(&g, &h, &Chromosome::new(vec![vec![1, 0]])),
            Err(vec![ScheduleViolation::HeightInversion {
                processor: 0,
                earlier: 1,
                later: 0
            }])
        );

        let one = TaskGraph::new(vec![1], vec![]).unwrap();
        assert_eq!(
            validate_chromosome(
                &one,
                &one.heights(),
                &Chromosome::new(vec![vec![0], vec![0]])
            ),
            Err(vec![ScheduleViolation::DuplicateTask { task: 0 }])
        );
    }

    #[test]
    fn validate_reports_missing_and_unknown() {
        let g = diamond();
        let err = validate_chromosome(
            &g,
            &g.heights(),
            &Chromosome::new(vec![vec![0, 7], vec![2]]),
        )
        .unwrap_err();
        assert_eq!(
            err,
            vec![
                ScheduleViolation::UnknownTask { task: 7 },
                ScheduleViolation::MissingTask { task: 1 },
                ScheduleViolation::MissingTask { task: 3 },
            ]
        );
        assert_eq!(
            validate_chromosome(&g, &g.heights(), &Chromosome::empty(0)).unwrap_err()[0],
            ScheduleViolation::NoProcessors
        );
    }

    #[test]
    fn evaluate_independent_tasks() {
        let g = TaskGraph::new(vec![3, 4], vec![]).unwrap();
        let chart = evaluate(&g, &Chromosome::new(vec![vec![0], vec![1]])).unwrap();
        assert_eq!(chart.makespan(), 4);
        assert_eq!(chart.slot(0).start, 0);
        assert_eq!(chart.slot(1).start, 0);
    }

    #[test]
    fn evaluate_forced_wait() {
        let g = chain2([2, 3]);
        let chart = evaluate(&g, &Chromosome::new(vec![vec![0], vec![1]])).unwrap();
        assert_eq!(
            chart.slot(1),
            Slot {
                processor: 1,
                start: 2,
                finish: 5
            }
        );
        assert_eq!(chart.makespan(), 5);
    }

    #[test]
    fn evaluate_diamond_by_hand() {
        let g = diamond();
        let chart = evaluate(&g, &Chromosome::new(vec![vec![0, 1, 3], vec![2]])).unwrap();
        assert_eq!(
            chart.slot(0),
            Slot {
                processor: 0,
                start: 0,
                finish: 1
            }
        );
        assert_eq!(
            chart.slot(1),
            Slot {
                processor: 0,
                start: 1,
                finish: 3
            }
        );
        assert_eq!(
            chart.slot(2),
            Slot {
                processor: 1,
                start: 1,
                finish: 4
            }
        );
        assert_eq!(
            chart.slot(3),
            Slot {
                processor: 0,
                start: 4,
                finish: 5
            }
        );
        assert_eq!(chart.makespan(), 5);
        assert_eq!(chart.processor_finish_times(), vec![5, 4]);
        assert!(chart.is_consistent_with(&g));
    }

    #[test]
    fn in_order_execution_idles_behind_waiting_head() {
        // 0 (et 5) -> 1; task 2 is independent but queued behind 1 on P2.
        let g = TaskGraph::new(vec![5, 1, 1], vec![(0, 1)]).unwrap();
        let chart = evaluate(&g, &Chromosome::new(vec![vec![0], vec![1, 2]])).unwrap();
        assert_eq!(chart.slot(2).start, 6);
    }

    #[test]
    fn empty_processor_has_zero_finish() {
        let g = chain2([2, 3]);
        let chart = evaluate(&g, &Chromosome::new(vec![vec![0, 1], vec![]])).unwrap();
        assert_eq!(chart.processor_finish_times(), vec![5, 0]);
        assert_eq!(chart.makespan(), 5);
    }

    #[test]
    fn evaluate_rejects_deadlock_and_duplicates() {
        let g = chain2([1, 1]);
        let err = evaluate(&g, &Chromosome::new(vec![vec![1, 0]])).unwrap_err();
        assert_eq!(
            err.violations,
            vec![ScheduleViolation::Deadlock {
                blocked: vec![0, 1]
            }]
        );
        let err = evaluate(&g, &Chromosome::new(vec![vec![0, 0, 1]])).unwrap_err();
        assert_eq!(
            err.violations,
            vec![ScheduleViolation::DuplicateTask { task: 0 }]
        );
    }

    #[test]
    fn feasible_but_not_height_ordered() {
        // 0 -> 1, 2 independent; P1 runs 0, 1 then the height-0 task 2.
        let g = TaskGraph::new(vec![1, 1, 1], vec![(0, 1)]).unwrap();
        let c = Chromosome::new(vec![vec![0, 1, 2]]);
        assert!(check_feasible(&g, &c).is_ok());
        assert!(validate_chromosome(&g, &g.heights(), &c).is_err());
        assert_eq!(evaluate(&g, &c).unwrap().makespan(), 3);
    }

    #[test]
    fn chart_to_lists_round_trip() {
        let g = diamond();
        let c = Chromosome::new(vec![vec![0, 1, 3], vec![2]]);
        let chart = evaluate(&g, &c).unwrap();
        assert_eq!(chart.processor_lists(), c);
    }
}
