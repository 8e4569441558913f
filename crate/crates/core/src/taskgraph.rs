//! Task graph model.
//!
//! A [`TaskGraph`] is an immutable DAG whose nodes carry integer execution
//! times. Construction validates every structural invariant, so all analytics
//! on an existing graph are infallible.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{TaskId, Time};

/// A single broken graph invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// The graph has no tasks.
    Empty,
    /// Execution time below one unit.
    ZeroExecTime {
        task: TaskId,
    },
    EdgeOutOfRange {
        from: TaskId,
        to: TaskId,
        task_count: usize,
    },
    SelfEdge {
        task: TaskId,
    },
    DuplicateEdge {
        from: TaskId,
        to: TaskId,
    },
    /// A directed cycle, listed in edge order (`tasks[i] -> tasks[i + 1]`,
    /// closing back to `tasks[0]`).
    Cycle {
        tasks: Vec<TaskId>,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "graph has no tasks"),
            Violation::ZeroExecTime { task } => write!(f, "exec_time({task}) < 1"),
            Violation::EdgeOutOfRange {
                from,
                to,
                task_count,
            } => {
                write!(
                    f,
                    "edge ({from},{to}) references a task outside 0..{task_count}"
                )
            }
            Violation::SelfEdge { task } => write!(f, "self-edge on task {task}"),
            Violation::DuplicateEdge { from, to } => write!(f, "duplicate edge ({from},{to})"),
            Violation::Cycle { tasks } => write!(f, "cycle {tasks:?}"),
        }
    }
}

/// Every violation found while building a [`TaskGraph`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphError {
    pub violations: Vec<Violation>,
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid task graph: ")?;
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl core::error::Error for GraphError {}

/// Checks the raw parts of a task graph and returns every violation found.
///
/// Cycle detection only looks at in-range, non-self edges; at most one cycle
/// witness is reported.
pub fn validate(exec_time: &[Time], edges: &[(TaskId, TaskId)]) -> Result<(), Vec<Violation>> {
    let n = exec_time.len();
    let mut violations = Vec::new();
    if n == 0 {
        violations.push(Violation::Empty);
    }
    for (task, &et) in exec_time.iter().enumerate() {
        if et < 1 {
            violations.push(Violation::ZeroExecTime { task });
        }
    }

    let mut seen = BTreeSet::new();
    let mut succs = vec![Vec::new(); n];
    for &(from, to) in edges {
        if from >= n || to >= n {
            violations.push(Violation::EdgeOutOfRange {
                from,
                to,
                task_count: n,
            });
        } else if from == to {
            violations.push(Violation::SelfEdge { task: from });
        } else if !seen.insert((from, to)) {
            violations.push(Violation::DuplicateEdge { from, to });
        } else {
            succs[from].push(to);
        }
    }
    if let Some(tasks) = find_cycle(&succs) {
        violations.push(Violation::Cycle { tasks });
    }

    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Iterative three-colour DFS; returns the first cycle met.
fn find_cycle(succs: &[Vec<TaskId>]) -> Option<Vec<TaskId>> {
    const WHITE: u8 = 0;
    const GREY: u8 = 1;
    const BLACK: u8 = 2;

    let n = succs.len();
    let mut colour = vec![WHITE; n];
    // (node, next successor index)
    let mut stack: Vec<(TaskId, usize)> = Vec::new();
    for root in 0..n {
        if colour[root] != WHITE {
            continue;
        }
        colour[root] = GREY;
        stack.push((root, 0));
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            if let Some(&succ) = succs[node].get(*next) {
                *next += 1;
                match colour[succ] {
                    WHITE => {
                        colour[succ] = GREY;
                        stack.push((succ, 0));
                    }
                    GREY => {
                        let start = stack.iter().position(|&(t, _)| t == succ).unwrap();
                        return Some(stack[start..].iter().map(|&(t, _)| t).collect());
                    }
                    _ => {}
                }
            } else {
                colour[node] = BLACK;
                stack.pop();
            }
        }
    }
    None
}

/// Immutable, validated DAG of tasks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskGraph {
    exec_time: Vec<Time>,
    /// Sorted lexicographically.
    edges: Vec<(TaskId, TaskId)>,
    preds: Vec<Vec<TaskId>>,
    succs: Vec<Vec<TaskId>>,
    topo_order: Vec<TaskId>,
}

impl TaskGraph {
    pub fn new(exec_time: Vec<Time>, mut edges: Vec<(TaskId, TaskId)>) -> Result<Self, GraphError> {
        validate(&exec_time, &edges).map_err(|violations| GraphError { violations })?;
        edges.sort_unstable();

        let n = exec_time.len();
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        for &(u, v) in &edges {
            succs[u].push(v);
            preds[v].push(u);
        }
        for p in &mut preds {
            p.sort_unstable();
        }

        // Kahn, smallest ready id first.
        let mut indegree: Vec<usize> = preds.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<TaskId> = (0..n).filter(|&t| indegree[t] == 0).collect();
        let mut topo_order = Vec::with_capacity(n);
        while let Some(t) = ready.pop_first() {
            topo_order.push(t);
            for &s in &succs[t] {
                indegree[s] -= 1;
                if indegree[s] == 0 {
                    ready.insert(s);
                }
            }
        }
        debug_assert_eq!(topo_order.len(), n);

        Ok(TaskGraph {
            exec_time,
            edges,
            preds,
            succs,
            topo_order,
        })
    }

    pub fn task_count(&self) -> usize {
        self.exec_time.len()
    }

    pub fn exec_time(&self, task: TaskId) -> Time {
        self.exec_time[task]
    }

    pub fn exec_times(&self) -> &[Time] {
        &self.exec_time
    }

    pub fn edges(&self) -> &[(TaskId, TaskId)] {
        &self.edges
    }

    pub fn predecessors(&self, task: TaskId) -> &[TaskId] {
        &self.preds[task]
    }

    pub fn successors(&self, task: TaskId) -> &[TaskId] {
        &self.succs[task]
    }

    /// A fixed topological order (Kahn's algorithm, lowest id first).
    pub fn topological_order(&self) -> &[TaskId] {
        &self.topo_order
    }

    pub fn total_work(&self) -> Time {
        self.exec_time.iter().sum()
    }

    /// Height of every task: 0 for sources, otherwise one more than the
    /// highest predecessor.
    pub fn heights(&self) -> HeightMap {
        let mut height = vec![0u32; self.task_count()];
        for &t in &self.topo_order {
            height[t] = self.preds[t]
                .iter()
                .map(|&p| height[p] + 1)
                .max()
                .unwrap_or(0);
        }
        HeightMap::from_heights(height)
    }

    /// Longest path through the graph, summing execution times of every
    /// task on the path (`t_cp`).
    pub fn critical_path_length(&self) -> Time {
        let mut finish = vec![0; self.task_count()];
        for &t in &self.topo_order {
            let ready = self.preds[t].iter().map(|&p| finish[p]).max().unwrap_or(0);
            finish[t] = ready + self.exec_time[t];
        }
        finish.into_iter().max().unwrap_or(0)
    }

    /// Whether a directed path leads from `from` to `to` (of length ≥ 1).
    pub fn reaches(&self, from: TaskId, to: TaskId) -> bool {
        let mut seen = vec![false; self.task_count()];
        let mut stack: Vec<TaskId> = self.succs[from].clone();
        while let Some(t) = stack.pop() {
            if t == to {
                return true;
            }
            if !core::mem::replace(&mut seen[t], true) {
                stack.extend_from_slice(&self.succs[t]);
            }
        }
        false
    }
}

/// Task heights plus the tasks grouped by level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightMap {
    height: Vec<u32>,
    levels: Vec<Vec<TaskId>>,
}

impl HeightMap {
    fn from_heights(height: Vec<u32>) -> Self {
        let max = height.iter().copied().max().unwrap_or(0) as usize;
        let mut levels = vec![Vec::new(); max + 1];
        for (t, &h) in height.iter().enumerate() {
            levels[h as usize].push(t);
        }
        HeightMap { height, levels }
    }

    pub fn height(&self, task: TaskId) -> u32 {
        self.height[task]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.height
    }

    /// `H`, the largest height in the graph.
    pub fn max_height(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    /// Tasks of each height, ascending height; ids ascending within a level.
    pub fn levels(&self) -> &[Vec<TaskId>] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.height.len()
    }

    pub fn is_empty(&self) -> bool {
        self.height.is_empty()
    }
}

/// Parameters of the random instance generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenSpec {
    pub n: usize,
    pub succ_min: usize,
    pub succ_max: usize,
    pub et_min: Time,
    pub et_max: Time,
    pub seed: u64,
}

impl GenSpec {
    /// Benchmark defaults: 3..=6 successors, execution times 1..=25.
    pub fn new(n: usize, seed: u64) -> Self {
        GenSpec {
            n,
            succ_min: 3,
            succ_max: 6,
            et_min: 1,
            et_max: 25,
            seed,
        }
    }

    pub fn check(&self) -> Result<(), GenSpecError> {
        if self.n < 1 {
            return Err(GenSpecError::NoTasks);
        }
        if self.succ_min < 1 || self.succ_min > self.succ_max {
            return Err(GenSpecError::SuccessorBounds {
                min: self.succ_min,
                max: self.succ_max,
            });
        }
        if self.et_min < 1 || self.et_min > self.et_max {
            return Err(GenSpecError::ExecTimeBounds {
                min: self.et_min,
                max: self.et_max,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenSpecError {
    NoTasks,
    SuccessorBounds { min: usize, max: usize },
    ExecTimeBounds { min: Time, max: Time },
}

impl fmt::Display for GenSpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenSpecError::NoTasks => write!(f, "task count must be at least 1"),
            GenSpecError::SuccessorBounds { min, max } => {
                write!(
                    f,
                    "successor bounds must satisfy 1 <= min <= max, got {min}..={max}"
                )
            }
            GenSpecError::ExecTimeBounds { min, max } => {
                write!(
                    f,
                    "execution time bounds must satisfy 1 <= min <= max, got {min}..={max}"
                )
            }
        }
    }
}

impl core::error::Error for GenSpecError {}

/// Generates a random DAG.
///
/// Tasks are visited in index order. Each draws its execution time, then a
/// successor count `k`, then `min(k, n - 1 - i)` distinct successors among the
/// higher-indexed tasks (repeated draws are rejected). Edges always point
/// from lower to higher index, so the result is acyclic.
pub fn generate_random(spec: &GenSpec) -> Result<TaskGraph, GenSpecError> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n;
    let mut exec_time = Vec::with_capacity(n);
    let mut edges = Vec::new();
    let mut chosen = BTreeSet::new();
    for i in 0..n {
        exec_time.push(rng.gen_range(spec.et_min..=spec.et_max));
        let k = rng.gen_range(spec.succ_min..=spec.succ_max);
        let k = k.min(n - 1 - i);
        chosen.clear();
        while chosen.len() < k {
            chosen.insert(rng.gen_range(i + 1..n));
        }
        edges.extend(chosen.iter().map(|&s| (i, s)));
    }
    Ok(TaskGraph::new(exec_time, edges).expect("generator only emits forward edges"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn diamond() -> TaskGraph {
        TaskGraph::new(vec![1, 2, 3, 1], vec![(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert_eq!(validate(&[1, 1], &[(0, 1)]), Ok(()));
        assert_eq!(
            validate(&[1, 1], &[(0, 1), (1, 0)]),
            Err(vec![Violation::Cycle { tasks: vec![0, 1] }])
        );
        assert_eq!(
            validate(&[0], &[]),
            Err(vec![Violation::ZeroExecTime { task: 0 }])
        );
    }

    #[test]
    fn validate_reports_every_violation() {
        let err = validate(
            &[0, 1, 1],
            &[(0, 5), (1, 1), (0, 1), (0, 1), (1, 2), (2, 0)],
        )
        .unwrap_err();
        assert_eq!(
            err,
            vec![
                Violation::ZeroExecTime { task: 0 },
                Violation::EdgeOutOfRange {
                    from: 0,
                    to: 5,
                    task_count: 3
                },
                Violation::SelfEdge { task: 1 },
                Violation::DuplicateEdge { from: 0, to: 1 },
                Violation::Cycle {
                    tasks: vec![0, 1, 2]
                },
            ]
        );
        assert_eq!(validate(&[], &[]), Err(vec![Violation::Empty]));
    }

    #[test]
    fn heights_examples() {
        let single = TaskGraph::new(vec![3], vec![]).unwrap();
        assert_eq!(single.heights().as_slice(), &[0]);
        let chain = TaskGraph::new(vec![1, 1, 1], vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(chain.heights().as_slice(), &[0, 1, 2]);
        let h = diamond().heights();
        assert_eq!(h.as_slice(), &[0, 1, 1, 2]);
        assert_eq!(h.levels(), &[vec![0], vec![1, 2], vec![3]]);
        assert_eq!(h.max_height(), 2);
    }

    #[test]
    fn critical_path_examples() {
        assert_eq!(
            TaskGraph::new(vec![5], vec![])
                .unwrap()
                .critical_path_length(),
            5
        );
        let chain = TaskGraph::new(vec![2, 3, 4], vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(chain.critical_path_length(), 9);
        // paths 0-1-3 = 4 and 0-2-3 = 5
        assert_eq!(diamond().critical_path_length(), 5);
    }

    #[test]
    fn reachability() {
        let g = diamond();
        assert!(g.reaches(0, 3));
        assert!(!g.reaches(1, 2));
        assert!(!g.reaches(3, 0));
    }

    #[test]
    fn generator_examples() {
        let one = generate_random(&GenSpec::new(1, 9)).unwrap();
        assert_eq!(one.task_count(), 1);
        assert!(one.edges().is_empty());

        assert_eq!(
            generate_random(&GenSpec::new(8, 42)),
            generate_random(&GenSpec::new(8, 42))
        );

        let g = generate_random(&GenSpec::new(50, 3)).unwrap();
        for t in 0..50 {
            let out = g.successors(t).len();
            if t <= 50 - 7 {
                assert!((3..=6).contains(&out), "task {t} has {out} successors");
            } else {
                assert!(out <= 50 - 1 - t);
            }
            assert!((1..=25).contains(&g.exec_time(t)));
        }
    }

    #[test]
    fn generator_rejects_bad_spec() {
        assert_eq!(
            generate_random(&GenSpec::new(0, 1)).unwrap_err(),
            GenSpecError::NoTasks
        );
        let spec = GenSpec {
            succ_min: 4,
            succ_max: 3,
            ..GenSpec::new(5, 1)
        };
        assert!(generate_random(&spec).is_err());
        let spec = GenSpec {
            et_min: 0,
            ..GenSpec::new(5, 1)
        };
        assert!(generate_random(&spec).is_err());
    }

    #[test]
    fn generator_output_always_validates() {
        for n in [1usize, 2, 8, 50, 110] {
            for seed in 0..1000u64 {
                let g = generate_random(&GenSpec::new(n, seed)).unwrap();
                assert_eq!(validate(g.exec_times(), g.edges()), Ok(()));
            }
        }
    }

    /// Longest edge-count path ending at each task, by repeated relaxation
    /// over the raw edge list (no topological order involved).
    fn longest_edge_path_oracle(n: usize, edges: &[(usize, usize)]) -> Vec<u32> {
        let mut depth = vec![0u32; n];
        loop {
            let mut changed = false;
            for &(u, v) in edges {
                if depth[v] < depth[u] + 1 {
                    depth[v] = depth[u] + 1;
                    changed = true;
                }
            }
            if !changed {
                return depth;
            }
        }
    }

    /// Exhaustive enumeration of source-to-anywhere path sums.
    fn max_path_sum_oracle(g: &TaskGraph) -> Time {
        fn walk(g: &TaskGraph, t: TaskId) -> Time {
            g.exec_time(t)
                + g.successors(t)
                    .iter()
                    .map(|&s| walk(g, s))
                    .max()
                    .unwrap_or(0)
        }
        (0..g.task_count()).map(|t| walk(g, t)).max().unwrap()
    }

    proptest! {
        #[test]
        fn heights_match_oracle(n in 1usize..30, seed in any::<u64>()) {
            let g = generate_random(&GenSpec { succ_min: 1, succ_max: 4, ..GenSpec::new(n, seed) }).unwrap();
            let h = g.heights();
            for &(u, v) in g.edges() {
                prop_assert!(h.height(u) < h.height(v));
            }
            for t in 0..n {
                prop_assert_eq!(h.height(t) == 0, g.predecessors(t).is_empty());
            }
            prop_assert_eq!(h.as_slice(), &longest_edge_path_oracle(n, g.edges())[..]);
        }

        #[test]
        fn critical_path_bounds(n in 1usize..14, seed in any::<u64>()) {
            let g = generate_random(&GenSpec { succ_min: 1, succ_max: 3, ..GenSpec::new(n, seed) }).unwrap();
            let cp = g.critical_path_length();
            prop_assert_eq!(cp, max_path_sum_oracle(&g));
            prop_assert!(cp >= g.exec_times().iter().copied().max().unwrap());
            prop_assert!(cp <= g.total_work());
        }
    }
}
