//! Comparison schedulers: a list-scheduling heuristic and an exact search.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::schedule::{evaluate, Chromosome, GanttChart, Slot};
use crate::taskgraph::TaskGraph;
use crate::{lower_bound, TaskId, Time};

/// `bl(t) = et(t) + max bl(successor)`, the longest path from `t` to a sink
/// including `t` itself.
pub fn bottom_level(graph: &TaskGraph) -> Vec<Time> {
    let mut bl = vec![0; graph.task_count()];
    for &t in graph.topological_order().iter().rev() {
        let tail = graph
            .successors(t)
            .iter()
            .map(|&s| bl[s])
            .max()
            .unwrap_or(0);
        bl[t] = graph.exec_time(t) + tail;
    }
    bl
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    /// Longest remaining path first.
    #[default]
    BottomLevel,
    /// Deepest task (largest height) first.
    HeightDescending,
    /// A random but fixed priority order.
    Random,
}

impl PolicyKind {
    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::BottomLevel => "bottom_level",
            PolicyKind::HeightDescending => "height_descending",
            PolicyKind::Random => "random",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "bottom_level" => Some(PolicyKind::BottomLevel),
            "height_descending" => Some(PolicyKind::HeightDescending),
            "random" => Some(PolicyKind::Random),
            _ => None,
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PriorityPolicy {
    pub kind: PolicyKind,
    pub tie_break_seed: u64,
}

impl PriorityPolicy {
    pub fn new(kind: PolicyKind, tie_break_seed: u64) -> Self {
        PriorityPolicy {
            kind,
            tie_break_seed,
        }
    }
}

/// Non-delay list scheduling.
///
/// Whenever processors are free, each (lowest index first) takes the
/// highest-priority ready task; equal priorities are broken by a seeded
/// random draw. Time then advances to the next completion.
pub fn list_schedule(graph: &TaskGraph, m: usize, policy: &PriorityPolicy) -> GanttChart {
    assert!(m >= 1, "list scheduling needs at least one processor");
    let n = graph.task_count();
    let mut rng = ChaCha8Rng::seed_from_u64(policy.tie_break_seed);
    let priority: Vec<Time> = match policy.kind {
        PolicyKind::BottomLevel => bottom_level(graph),
        PolicyKind::HeightDescending => graph
            .heights()
            .as_slice()
            .iter()
            .map(|&h| h as Time)
            .collect(),
        PolicyKind::Random => {
            let mut order: Vec<TaskId> = (0..n).collect();
            order.shuffle(&mut rng);
            let mut rank = vec![0; n];
            for (r, &t) in order.iter().enumerate() {
                rank[t] = (n - r) as Time;
            }
            rank
        }
    };

    let mut waiting: Vec<usize> = (0..n).map(|t| graph.predecessors(t).len()).collect();
    let mut ready: Vec<TaskId> = (0..n).filter(|&t| waiting[t] == 0).collect();
    let mut running: Vec<Option<TaskId>> = vec![None; m];
    let mut slots = vec![
        Slot {
            processor: 0,
            start: 0,
            finish: 0
        };
        n
    ];
    let mut now: Time = 0;
    let mut scheduled = 0;

    loop {
        for (p, slot) in running.iter_mut().enumerate() {
            if slot.is_some() || ready.is_empty() {
                continue;
            }
            let top = ready.iter().map(|&t| priority[t]).max().unwrap();
            let ties: Vec<usize> = (0..ready.len())
                .filter(|&i| priority[ready[i]] == top)
                .collect();
            let pick = if ties.len() == 1 {
                ties[0]
            } else {
                ties[rng.gen_range(0..ties.len())]
            };
            let t = ready.swap_remove(pick);
            slots[t] = Slot {
                processor: p,
                start: now,
                finish: now + graph.exec_time(t),
            };
            *slot = Some(t);
            scheduled += 1;
        }
        if running.iter().all(Option::is_none) {
            break;
        }
        now = running
            .iter()
            .flatten()
            .map(|&t| slots[t].finish)
            .min()
            .unwrap();
        for slot in running.iter_mut() {
            if let Some(t) = *slot {
                if slots[t].finish == now {
                    *slot = None;
                    for &s in graph.successors(t) {
                        waiting[s] -= 1;
                        if waiting[s] == 0 {
                            ready.push(s);
                        }
                    }
                }
            }
        }
        // keep tie-breaking independent of completion order
        ready.sort_unstable();
    }
    debug_assert_eq!(scheduled, n);
    GanttChart::from_slots(m, slots)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptimalSchedule {
    pub makespan: Time,
    pub chromosome: Chromosome,
    pub chart: GanttChart,
    /// Search nodes expanded.
    pub nodes: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchError {
    BudgetExceeded { budget: u64 },
    NoProcessors,
}

impl fmt::Display for SearchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchError::BudgetExceeded { budget } => {
                write!(
                    f,
                    "exact search exceeded its budget of {budget} nodes; instance too large"
                )
            }
            SearchError::NoProcessors => write!(f, "processor count must be at least 1"),
        }
    }
}

impl core::error::Error for SearchError {}

/// Minimum makespan over all height-ordered chromosomes, found by depth-first
/// branch & bound.
///
/// Tasks are appended level by level. Within a level, processors are filled
/// in index order (each chromosome is generated once), and an empty processor
/// is only opened if all lower-indexed ones are in use (processors are
/// interchangeable). Partial schedules are pruned against the incumbent with
/// the path bound `finish(t) + bl(t) - et(t)` and the load bound
/// `ceil((sum of processor ends + remaining work) / m)`.
///
/// Fails with [`SearchError::BudgetExceeded`] after `budget` task placements.
pub fn brute_force_optimal(
    graph: &TaskGraph,
    m: usize,
    budget: u64,
) -> Result<OptimalSchedule, SearchError> {
    if m == 0 {
        return Err(SearchError::NoProcessors);
    }
    let heights = graph.heights();
    let bl = bottom_level(graph);

    // Incumbent: the bottom-level list schedule, height-sorted per processor.
    let mut seed_lists = list_schedule(graph, m, &PriorityPolicy::default())
        .processor_lists()
        .into_processors();
    for list in &mut seed_lists {
        list.sort_by_key(|&t| heights.height(t));
    }
    let incumbent = Chromosome::new(seed_lists);
    let incumbent_ms = evaluate(graph, &incumbent)
        .expect("height-ordered")
        .makespan();

    let mut levels: Vec<Vec<TaskId>> = heights.levels().to_vec();
    for level in &mut levels {
        level.sort_by_key(|&t| (core::cmp::Reverse(bl[t]), t));
    }

    let mut search = Search {
        graph,
        m,
        bl: &bl,
        levels,
        procs: vec![Vec::new(); m],
        proc_end: vec![0; m],
        finish: vec![0; graph.task_count()],
        placed: vec![false; graph.task_count()],
        remaining_work: graph.total_work(),
        best: incumbent_ms,
        best_procs: incumbent.into_processors(),
        floor: lower_bound(graph, m),
        nodes: 0,
        budget,
    };
    if search.best > search.floor {
        search.level(0, 0)?;
    }

    let chromosome = Chromosome::new(search.best_procs);
    let chart = evaluate(graph, &chromosome).expect("search only emits complete chromosomes");
    debug_assert_eq!(chart.makespan(), search.best);
    Ok(OptimalSchedule {
        makespan: search.best,
        chromosome,
        chart,
        nodes: search.nodes,
    })
}

struct Search<'a> {
    graph: &'a TaskGraph,
    m: usize,
    bl: &'a [Time],
    levels: Vec<Vec<TaskId>>,
    procs: Vec<Vec<TaskId>>,
    proc_end: Vec<Time>,
    finish: Vec<Time>,
    placed: Vec<bool>,
    remaining_work: Time,
    best: Time,
    best_procs: Vec<Vec<TaskId>>,
    /// Global lower bound; reaching it ends the search.
    floor: Time,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    /// Start (or continue) filling `level`, only on processors `>= from_proc`.
    /// Returns early once the incumbent hits the global lower bound.
    fn level(&mut self, level: usize, from_proc: usize) -> Result<(), SearchError> {
        if self.best <= self.floor {
            return Ok(());
        }
        let Some(tasks) = self.levels.get(level) else {
            let makespan = self.proc_end.iter().copied().max().unwrap_or(0);
            if makespan < self.best {
                self.best = makespan;
                self.best_procs = self.procs.clone();
            }
            return Ok(());
        };
        if tasks.iter().all(|&t| self.placed[t]) {
            return self.level(level + 1, 0);
        }

        let candidates: Vec<TaskId> = tasks.iter().copied().filter(|&t| !self.placed[t]).collect();
        for p in from_proc..self.m {
            if self.procs[p].is_empty() && p > 0 && self.procs[p - 1].is_empty() {
                break;
            }
            for &t in &candidates {
                self.nodes += 1;
                if self.nodes > self.budget {
                    return Err(SearchError::BudgetExceeded {
                        budget: self.budget,
                    });
                }
                let ready = self
                    .graph
                    .predecessors(t)
                    .iter()
                    .map(|&u| self.finish[u])
                    .max()
                    .unwrap_or(0);
                let start = ready.max(self.proc_end[p]);
                let end = start + self.graph.exec_time(t);

                let path_bound = start + self.bl[t];
                let load = self.proc_end.iter().sum::<Time>() - self.proc_end[p]
                    + end
                    + (self.remaining_work - self.graph.exec_time(t));
                let load_bound = load.div_ceil(self.m as Time);
                if path_bound.max(load_bound) >= self.best {
                    continue;
                }

                let saved_end = self.proc_end[p];
                self.procs[p].push(t);
                self.proc_end[p] = end;
                self.finish[t] = end;
                self.placed[t] = true;
                self.remaining_work -= self.graph.exec_time(t);

                let res = self.level(level, p);

                self.remaining_work += self.graph.exec_time(t);
                self.placed[t] = false;
                self.proc_end[p] = saved_end;
                self.procs[p].pop();
                res?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::validate_chromosome;
    use crate::taskgraph::{generate_random, GenSpec};

    fn diamond() -> TaskGraph {
        TaskGraph::new(vec![1, 2, 3, 1], vec![(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
    }

    /// Every height-ordered chromosome, with repeats: all within-level
    /// permutations times all processor assignments, split stably.
    fn naive_optimum(graph: &TaskGraph, m: usize) -> Time {
        fn permutations(items: &[TaskId]) -> Vec<Vec<TaskId>> {
            if items.len() <= 1 {
                return vec![items.to_vec()];
            }
            let mut out = Vec::new();
            for i in 0..items.len() {
                let mut rest = items.to_vec();
                let head = rest.remove(i);
                for mut tail in permutations(&rest) {
                    tail.insert(0, head);
                    out.push(tail);
                }
            }
            out
        }
        let mut sequences: Vec<Vec<TaskId>> = vec![Vec::new()];
        for level in graph.heights().levels() {
            let perms = permutations(level);
            sequences = sequences
                .iter()
                .flat_map(|s| {
                    perms
                        .iter()
                        .map(move |p| s.iter().chain(p).copied().collect())
                })
                .collect();
        }
        let n = graph.task_count();
        let mut best = Time::MAX;
        for seq in &sequences {
            for code in 0..m.pow(n as u32) {
                let mut procs = vec![Vec::new(); m];
                let mut c = code;
                for &t in seq {
                    procs[c % m].push(t);
                    c /= m;
                }
                best = best.min(evaluate(graph, &Chromosome::new(procs)).unwrap().makespan());
            }
        }
        best
    }

    #[test]
    fn bottom_level_examples() {
        assert_eq!(
            bottom_level(&TaskGraph::new(vec![4], vec![]).unwrap()),
            vec![4]
        );
        let chain = TaskGraph::new(vec![2, 3, 4], vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(bottom_level(&chain), vec![9, 7, 4]);
        assert_eq!(bottom_level(&diamond()), vec![5, 3, 4, 1]);
    }

    #[test]
    fn bottom_level_max_is_critical_path() {
        for seed in 0..200 {
            let g = generate_random(&GenSpec::new(30, seed)).unwrap();
            assert_eq!(
                bottom_level(&g).into_iter().max().unwrap(),
                g.critical_path_length()
            );
        }
    }

    #[test]
    fn list_schedule_examples() {
        let g = TaskGraph::new(vec![5, 1, 1], vec![]).unwrap();
        let chart = list_schedule(&g, 2, &PriorityPolicy::default());
        assert_eq!(chart.makespan(), 5);
        assert_eq!(chart.slot(1).processor, chart.slot(2).processor);
        assert_ne!(chart.slot(0).processor, chart.slot(1).processor);

        let chain = TaskGraph::new(vec![2, 3, 4], vec![(0, 1), (1, 2)]).unwrap();
        for m in 1..4 {
            assert_eq!(
                list_schedule(&chain, m, &PriorityPolicy::default()).makespan(),
                9
            );
        }

        for (n, m) in [(7usize, 3usize), (12, 4), (5, 5), (1, 3)] {
            let g = TaskGraph::new(vec![1; n], vec![]).unwrap();
            for kind in [
                PolicyKind::BottomLevel,
                PolicyKind::HeightDescending,
                PolicyKind::Random,
            ] {
                let chart = list_schedule(&g, m, &PriorityPolicy::new(kind, 3));
                assert_eq!(chart.makespan(), n.div_ceil(m) as Time);
            }
        }
    }

    /// No processor is idle at any instant where some task is ready but not
    /// yet started.
    fn is_work_conserving(g: &TaskGraph, chart: &GanttChart) -> bool {
        let slots = chart.slots();
        (0..g.task_count()).all(|v| {
            let ready = g
                .predecessors(v)
                .iter()
                .map(|&u| slots[u].finish)
                .max()
                .unwrap_or(0);
            // every instant in [ready, start(v)) needs all processors busy
            let mut events: Vec<Time> = slots.iter().flat_map(|s| [s.start, s.finish]).collect();
            events.push(ready);
            events
                .into_iter()
                .filter(|&t| t >= ready && t < slots[v].start)
                .all(|t| {
                    (0..chart.processor_count()).all(|p| {
                        slots
                            .iter()
                            .any(|s| s.processor == p && s.start <= t && t < s.finish)
                    })
                })
        })
    }

    #[test]
    fn list_schedule_is_consistent_and_greedy() {
        for seed in 0..200 {
            let g = generate_random(&GenSpec::new(25, seed)).unwrap();
            for m in [1, 2, 4] {
                for kind in [
                    PolicyKind::BottomLevel,
                    PolicyKind::HeightDescending,
                    PolicyKind::Random,
                ] {
                    let policy = PriorityPolicy::new(kind, seed);
                    let chart = list_schedule(&g, m, &policy);
                    assert!(chart.is_consistent_with(&g));
                    assert!(is_work_conserving(&g, &chart));
                    assert!(chart.makespan() >= lower_bound(&g, m));
                    assert_eq!(chart, list_schedule(&g, m, &policy));
                }
            }
        }
    }

    #[test]
    fn optimum_examples() {
        let one = TaskGraph::new(vec![7], vec![]).unwrap();
        assert_eq!(brute_force_optimal(&one, 2, 100).unwrap().makespan, 7);
        let two = TaskGraph::new(vec![3, 4], vec![]).unwrap();
        assert_eq!(brute_force_optimal(&two, 2, 100).unwrap().makespan, 4);
        let opt = brute_force_optimal(&diamond(), 2, 1000).unwrap();
        assert_eq!(opt.makespan, 5);
        assert_eq!(naive_optimum(&diamond(), 2), 5);
        assert_eq!(
            validate_chromosome(&diamond(), &diamond().heights(), &opt.chromosome),
            Ok(())
        );
    }

    #[test]
    fn optimum_matches_naive_enumeration() {
        for seed in 0..60u64 {
            let spec = GenSpec {
                succ_min: 1,
                succ_max: 3,
                et_min: 1,
                et_max: 9,
                ..GenSpec::new(6, seed)
            };
            let g = generate_random(&spec).unwrap();
            for m in [1, 2, 3] {
                let opt = brute_force_optimal(&g, m, 10_000_000).unwrap();
                assert_eq!(opt.makespan, naive_optimum(&g, m), "seed {seed}, m {m}");
                assert_eq!(opt.chart.makespan(), opt.makespan);
                assert_eq!(
                    validate_chromosome(&g, &g.heights(), &opt.chromosome),
                    Ok(())
                );
            }
        }
        // a flat graph has the widest levels
        let flat = TaskGraph::new(vec![4, 3, 3, 2, 2, 1], vec![]).unwrap();
        assert_eq!(
            brute_force_optimal(&flat, 2, 10_000_000).unwrap().makespan,
            naive_optimum(&flat, 2)
        );
    }

    #[test]
    fn height_ordering_can_exclude_the_unrestricted_optimum() {
        // chain a0 -> a1 -> a2 -> a3 (unit), l (et 10) -> {z, w} (et 5 each)
        let g = TaskGraph::new(
            vec![1, 1, 1, 1, 10, 5, 5],
            vec![(0, 1), (1, 2), (2, 3), (4, 5), (4, 6)],
        )
        .unwrap();
        // P1 runs the chain and then w, breaking height order.
        let unrestricted = Chromosome::new(vec![vec![0, 1, 2, 3, 6], vec![4, 5]]);
        assert_eq!(evaluate(&g, &unrestricted).unwrap().makespan(), 15);
        let opt = brute_force_optimal(&g, 2, 10_000_000).unwrap();
        assert_eq!(opt.makespan, naive_optimum(&g, 2));
        assert!(opt.makespan > 15);
    }

    #[test]
    fn optimum_respects_bounds_and_random_chromosomes() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for seed in 0..20u64 {
            let g = generate_random(&GenSpec::new(8, seed)).unwrap();
            let h = g.heights();
            for m in [2, 3] {
                let opt = brute_force_optimal(&g, m, 50_000_000).unwrap();
                assert!(opt.makespan >= lower_bound(&g, m));
                for _ in 0..1000 {
                    let c = crate::ga::random_chromosome(&h, m, &mut rng);
                    assert!(evaluate(&g, &c).unwrap().makespan() >= opt.makespan);
                }
            }
        }
    }

    #[test]
    fn budget_exceeded() {
        // floor is 3 but the optimum is 4, so the search cannot stop early
        let g = TaskGraph::new(vec![2, 2, 2], vec![]).unwrap();
        assert_eq!(
            brute_force_optimal(&g, 2, 1).unwrap_err(),
            SearchError::BudgetExceeded { budget: 1 }
        );
        assert_eq!(brute_force_optimal(&g, 2, 100).unwrap().makespan, 4);
    }
}
