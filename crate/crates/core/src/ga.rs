//! Height-structured genetic algorithm.
//!
//! Individuals are [`Chromosome`]s whose processor lists are kept in
//! non-decreasing height order. Every operator here is closed over that set:
//!
//! * initialization distributes each height level over random processors,
//! * crossover cuts all lists between two height levels and exchanges the
//!   upper parts,
//! * mutation swaps the positions of two tasks of equal height.
//!
//! Fitness is `cmax - FT + 1`, where `cmax` is the largest makespan seen so
//! far in the run. Reproduction is roulette-wheel sampling on that fitness,
//! and the best individual found so far replaces the worst one after every
//! generation.
//!
//! Random numbers come from a single ChaCha8 stream per run, consumed in
//! this order: initial population, then per generation: selection, pairing
//! shuffle, crossover draws, mutation draws.

use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::baseline::{list_schedule, PriorityPolicy};
use crate::schedule::{makespan_unchecked, Chromosome};
use crate::taskgraph::{HeightMap, TaskGraph};
use crate::{TaskId, Time};

#[derive(Clone, Debug, PartialEq)]
pub struct GaConfig {
    pub population_size: usize,
    pub max_iterations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    /// Stop once the best makespan has not improved for this many generations.
    pub convergence_window: usize,
    pub seed: u64,
    /// Replace one random initial individual with the (height-sorted)
    /// bottom-level list schedule.
    pub seed_with_list_schedule: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 20,
            max_iterations: 500,
            crossover_rate: 0.8,
            mutation_rate: 0.1,
            convergence_window: 50,
            seed: 0,
            seed_with_list_schedule: false,
        }
    }
}

impl GaConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn check(&self) -> Result<(), GaConfigError> {
        if self.population_size < 2 {
            return Err(GaConfigError::PopulationTooSmall(self.population_size));
        }
        if self.max_iterations < 1 {
            return Err(GaConfigError::NoIterations);
        }
        if self.convergence_window < 1 {
            return Err(GaConfigError::ZeroWindow);
        }
        for (name, rate) in [
            ("crossover", self.crossover_rate),
            ("mutation", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(GaConfigError::RateOutOfRange { name, rate });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GaConfigError {
    PopulationTooSmall(usize),
    NoIterations,
    ZeroWindow,
    RateOutOfRange { name: &'static str, rate: f64 },
    NoProcessors,
}

impl fmt::Display for GaConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GaConfigError::PopulationTooSmall(n) => {
                write!(f, "population size must be at least 2, got {n}")
            }
            GaConfigError::NoIterations => write!(f, "max_iterations must be at least 1"),
            GaConfigError::ZeroWindow => write!(f, "convergence window must be at least 1"),
            GaConfigError::RateOutOfRange { name, rate } => {
                write!(f, "{name} rate must lie in [0, 1], got {rate}")
            }
            GaConfigError::NoProcessors => write!(f, "processor count must be at least 1"),
        }
    }
}

impl core::error::Error for GaConfigError {}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    /// Best makespan found so far.
    pub best_makespan: Time,
    pub mean_makespan: f64,
    pub cmax: Time,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaResult {
    pub best: Chromosome,
    pub best_makespan: Time,
    pub generations_run: usize,
    pub history: Vec<GenerationStats>,
}

/// Running maximum of observed finishing times.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FitnessLedger {
    cmax: Time,
}

impl FitnessLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe(&mut self, ft: Time) {
        self.cmax = self.cmax.max(ft);
    }

    pub fn cmax(&self) -> Time {
        self.cmax
    }
}

/// `cmax - ft + 1`. The shift keeps the worst schedule seen so far
/// selectable and leaves the ordering unchanged.
pub fn fitness(ft: Time, ledger: &FitnessLedger) -> u64 {
    debug_assert!(
        ledger.cmax >= ft,
        "ledger must observe ft before scoring it"
    );
    ledger.cmax - ft + 1
}

/// One random height-ordered individual: for each level in ascending order,
/// shuffle its tasks and append each to a uniformly drawn processor.
pub fn random_chromosome<R: Rng + ?Sized>(
    heights: &HeightMap,
    m: usize,
    rng: &mut R,
) -> Chromosome {
    let mut c = Chromosome::empty(m);
    let mut level_buf = Vec::new();
    for level in heights.levels() {
        level_buf.clear();
        level_buf.extend_from_slice(level);
        level_buf.shuffle(rng);
        for &t in &level_buf {
            let p = rng.gen_range(0..m);
            c.processors_mut()[p].push(t);
        }
    }
    c
}

pub fn init_population<R: Rng + ?Sized>(
    heights: &HeightMap,
    m: usize,
    size: usize,
    rng: &mut R,
) -> Vec<Chromosome> {
    (0..size)
        .map(|_| random_chromosome(heights, m, rng))
        .collect()
}

/// Roulette-wheel draw of `fitness.len()` indices, with replacement.
pub fn select_indices<R: Rng + ?Sized>(fitness: &[u64], rng: &mut R) -> Vec<usize> {
    let mut cumulative = Vec::with_capacity(fitness.len());
    let mut total = 0u64;
    for &f in fitness {
        total += f;
        cumulative.push(total);
    }
    assert!(total > 0, "roulette needs positive total fitness");
    (0..fitness.len())
        .map(|_| {
            let r = rng.gen_range(0..total);
            cumulative.partition_point(|&c| c <= r)
        })
        .collect()
}

/// Mating pool of the same size as `population`.
pub fn select<R: Rng + ?Sized>(
    population: &[Chromosome],
    fitness: &[u64],
    rng: &mut R,
) -> Vec<Chromosome> {
    select_indices(fitness, rng)
        .into_iter()
        .map(|i| population[i].clone())
        .collect()
}

/// Exchanges everything above height `cut` between two parents, on every
/// processor at once.
pub fn crossover_at(
    a: &Chromosome,
    b: &Chromosome,
    heights: &HeightMap,
    cut: u32,
) -> (Chromosome, Chromosome) {
    let splice = |low: &Chromosome, high: &Chromosome| {
        let procs = low
            .processors()
            .iter()
            .zip(high.processors())
            .map(|(lo, hi)| {
                lo.iter()
                    .copied()
                    .filter(|&t| heights.height(t) <= cut)
                    .chain(hi.iter().copied().filter(|&t| heights.height(t) > cut))
                    .collect()
            })
            .collect();
        Chromosome::new(procs)
    };
    (splice(a, b), splice(b, a))
}

/// Crossover at a cut height drawn uniformly from `0..H`. Graphs whose tasks
/// all have height 0 return the parents unchanged.
pub fn crossover<R: Rng + ?Sized>(
    a: &Chromosome,
    b: &Chromosome,
    heights: &HeightMap,
    rng: &mut R,
) -> (Chromosome, Chromosome) {
    let top = heights.max_height();
    if top == 0 {
        return (a.clone(), b.clone());
    }
    let cut = rng.gen_range(0..top);
    crossover_at(a, b, heights, cut)
}

/// Swaps the list positions of two tasks.
pub fn swap_tasks(c: &Chromosome, x: TaskId, y: TaskId) -> Chromosome {
    let mut out = c.clone();
    let locate = |t: TaskId| {
        out.processors()
            .iter()
            .enumerate()
            .find_map(|(p, list)| list.iter().position(|&u| u == t).map(|i| (p, i)))
            .expect("task present in chromosome")
    };
    let (px, ix) = locate(x);
    let (py, iy) = locate(y);
    out.processors_mut()[px][ix] = y;
    out.processors_mut()[py][iy] = x;
    out
}

/// Swaps two distinct tasks of a randomly chosen height level holding at
/// least two tasks. Identity when every level is a singleton.
pub fn mutate<R: Rng + ?Sized>(c: &Chromosome, heights: &HeightMap, rng: &mut R) -> Chromosome {
    let eligible: Vec<&Vec<TaskId>> = heights.levels().iter().filter(|l| l.len() >= 2).collect();
    if eligible.is_empty() {
        return c.clone();
    }
    let level = eligible[rng.gen_range(0..eligible.len())];
    let i = rng.gen_range(0..level.len());
    let mut j = rng.gen_range(0..level.len() - 1);
    if j >= i {
        j += 1;
    }
    swap_tasks(c, level[i], level[j])
}

/// Height-sorted version of the bottom-level list schedule.
fn list_schedule_individual(graph: &TaskGraph, heights: &HeightMap, m: usize) -> Chromosome {
    let chart = list_schedule(graph, m, &PriorityPolicy::default());
    let mut procs = chart.processor_lists().into_processors();
    for list in &mut procs {
        list.sort_by_key(|&t| heights.height(t));
    }
    Chromosome::new(procs)
}

/// Runs the genetic algorithm on `graph` with `m` processors.
///
/// Each generation evaluates the population, updates `cmax` and the best
/// string, then (unless a stop condition holds) builds the next population:
/// roulette selection, crossover of consecutive pairs of the shuffled pool,
/// mutation, and replacement of the worst individual by the best string.
pub fn run(graph: &TaskGraph, m: usize, config: &GaConfig) -> Result<GaResult, GaConfigError> {
    config.check()?;
    if m == 0 {
        return Err(GaConfigError::NoProcessors);
    }
    let heights = graph.heights();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut population = init_population(&heights, m, config.population_size, &mut rng);
    if config.seed_with_list_schedule {
        let slot = rng.gen_range(0..population.len());
        population[slot] = list_schedule_individual(graph, &heights, m);
    }
    let mut makespans: Vec<Time> = population
        .iter()
        .map(|c| makespan_unchecked(graph, c))
        .collect();

    let mut ledger = FitnessLedger::new();
    let mut best = population[0].clone();
    let mut best_makespan = Time::MAX;
    let mut history = Vec::new();
    let mut stale = 0;

    for generation in 1..=config.max_iterations {
        for &ft in &makespans {
            ledger.observe(ft);
        }
        let (gen_best, &gen_best_ft) = makespans
            .iter()
            .enumerate()
            .min_by_key(|&(i, ft)| (*ft, i))
            .expect("non-empty population");
        if gen_best_ft < best_makespan {
            best_makespan = gen_best_ft;
            best = population[gen_best].clone();
            stale = 0;
        } else {
            stale += 1;
        }
        let mean = makespans.iter().sum::<Time>() as f64 / makespans.len() as f64;
        history.push(GenerationStats {
            generation,
            best_makespan,
            mean_makespan: mean,
            cmax: ledger.cmax(),
        });

        if generation == config.max_iterations || stale >= config.convergence_window {
            break;
        }

        let fitness: Vec<u64> = makespans.iter().map(|&ft| fitness(ft, &ledger)).collect();
        let mut pool = select(&population, &fitness, &mut rng);
        pool.shuffle(&mut rng);

        let mut next = Vec::with_capacity(pool.len());
        let mut pairs = pool.chunks_exact(2);
        for pair in &mut pairs {
            if rng.gen_bool(config.crossover_rate) {
                let (x, y) = crossover(&pair[0], &pair[1], &heights, &mut rng);
                next.push(x);
                next.push(y);
            } else {
                next.extend_from_slice(pair);
            }
        }
        next.extend_from_slice(pairs.remainder());

        for c in &mut next {
            if rng.gen_bool(config.mutation_rate) {
                *c = mutate(c, &heights, &mut rng);
            }
        }

        makespans = next.iter().map(|c| makespan_unchecked(graph, c)).collect();
        let (worst, _) = makespans
            .iter()
            .enumerate()
            .max_by_key(|&(i, ft)| (*ft, core::cmp::Reverse(i)))
            .expect("non-empty population");
        next[worst] = best.clone();
        makespans[worst] = best_makespan;
        population = next;
    }

    Ok(GaResult {
        best,
        best_makespan,
        generations_run: history.len(),
        history,
    })
}
