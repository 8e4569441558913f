//! GA vs list-scheduling benchmark harness.
//!
//! For every `(n, m, rep)` one random instance is generated from a derived
//! seed, then the list scheduler and the GA both run on that same instance.
//! Rows come out in `(n, m, rep, algo)` order regardless of which instance
//! finishes first.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use taskga_core::taskgraph::generate_random;
use taskga_core::{
    ga, list_schedule, lower_bound, GaConfig, GenSpec, PolicyKind, PriorityPolicy, TaskGraph, Time,
};

/// One CSV row. Field order is the CSV header.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub instance_id: String,
    pub n: usize,
    pub m: usize,
    pub algo: String,
    pub policy: String,
    pub makespan: Time,
    pub lower_bound: Time,
    pub generations: Option<usize>,
    pub wall_ms: f64,
    pub seed: u64,
}

pub const CSV_HEADER: &str =
    "instance_id,n,m,algo,policy,makespan,lower_bound,generations,wall_ms,seed";

impl RunReport {
    /// Single-line `key=value` summary used by `solve`.
    pub fn line(&self) -> String {
        let mut line = format!(
            "algo={} n={} m={} makespan={} lower_bound={} policy=\"{}\"",
            self.algo, self.n, self.m, self.makespan, self.lower_bound, self.policy
        );
        if let Some(g) = self.generations {
            line.push_str(&format!(" generations={g}"));
        }
        line.push_str(&format!(" wall_ms={:.3} seed={}", self.wall_ms, self.seed));
        line
    }
}

pub fn elapsed_ms(since: Instant) -> f64 {
    (since.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

pub fn ga_summary(config: &GaConfig) -> String {
    format!(
        "pop={} iters={} cx={} mut={} window={}{}",
        config.population_size,
        config.max_iterations,
        config.crossover_rate,
        config.mutation_rate,
        config.convergence_window,
        if config.seed_with_list_schedule {
            " seed_lsh"
        } else {
            ""
        }
    )
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-instance seed. Depends only on its own coordinates, so adding sizes or
/// processor counts leaves existing rows unchanged.
pub fn derive_seed(master: u64, n: usize, m: usize, rep: usize) -> u64 {
    [n as u64, m as u64, rep as u64]
        .into_iter()
        .fold(splitmix64(master), |h, x| splitmix64(h ^ x))
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub procs: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    /// Generator template; `n` and `seed` are overwritten per instance.
    pub generator: GenSpec,
    /// GA template; `seed` is overwritten per instance.
    pub ga: GaConfig,
    pub policy: PolicyKind,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: vec![8, 17, 23, 28, 39, 44, 49, 54, 59, 69, 79, 89, 100],
            procs: vec![4],
            reps: 10,
            seed: 1,
            generator: GenSpec::new(1, 0),
            ga: GaConfig::default(),
            policy: PolicyKind::BottomLevel,
        }
    }
}

pub fn instance_id(n: usize, m: usize, rep: usize) -> String {
    format!("n{n}-m{m}-r{rep}")
}

/// Runs both algorithms on one generated instance.
pub fn run_instance(
    config: &BenchConfig,
    n: usize,
    m: usize,
    rep: usize,
) -> anyhow::Result<[RunReport; 2]> {
    let seed = derive_seed(config.seed, n, m, rep);
    let graph: TaskGraph = generate_random(&GenSpec {
        n,
        seed,
        ..config.generator
    })?;
    let bound = lower_bound(&graph, m);
    let id = instance_id(n, m, rep);

    let started = Instant::now();
    let chart = list_schedule(&graph, m, &PriorityPolicy::new(config.policy, seed));
    let lsh = RunReport {
        instance_id: id.clone(),
        n,
        m,
        algo: "lsh".into(),
        policy: config.policy.name().into(),
        makespan: chart.makespan(),
        lower_bound: bound,
        generations: None,
        wall_ms: elapsed_ms(started),
        seed,
    };

    let ga_config = GaConfig {
        seed,
        ..config.ga.clone()
    };
    let started = Instant::now();
    let result = ga::run(&graph, m, &ga_config)?;
    let ga = RunReport {
        instance_id: id,
        n,
        m,
        algo: "ga".into(),
        policy: ga_summary(&ga_config),
        makespan: result.best_makespan,
        lower_bound: bound,
        generations: Some(result.generations_run),
        wall_ms: elapsed_ms(started),
        seed,
    };
    Ok([lsh, ga])
}

pub fn run_bench(config: &BenchConfig) -> anyhow::Result<Vec<RunReport>> {
    let mut jobs = Vec::new();
    for &n in &config.sizes {
        for &m in &config.procs {
            for rep in 0..config.reps {
                jobs.push((n, m, rep));
            }
        }
    }
    let results: Vec<[RunReport; 2]> = jobs
        .par_iter()
        .map(|&(n, m, rep)| run_instance(config, n, m, rep))
        .collect::<anyhow::Result<_>>()?;
    Ok(results.into_iter().flatten().collect())
}

pub fn write_csv<W: Write>(reports: &[RunReport], out: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for r in reports {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub m: usize,
    pub mean_lsh: f64,
    pub mean_ga: f64,
    pub mean_lower_bound: f64,
}

impl SummaryRow {
    /// Relative GA improvement over LSH, in percent.
    pub fn advantage_pct(&self) -> f64 {
        100.0 * (self.mean_lsh - self.mean_ga) / self.mean_lsh
    }
}

/// Mean makespans per `(n, m)`, in first-appearance order.
pub fn summarize(reports: &[RunReport]) -> Vec<SummaryRow> {
    let mut keys: Vec<(usize, usize)> = Vec::new();
    for r in reports {
        if !keys.contains(&(r.n, r.m)) {
            keys.push((r.n, r.m));
        }
    }
    let mean = |n: usize, m: usize, pick: &dyn Fn(&RunReport) -> Option<Time>| {
        let values: Vec<Time> = reports
            .iter()
            .filter(|r| r.n == n && r.m == m)
            .filter_map(pick)
            .collect();
        values.iter().sum::<Time>() as f64 / values.len().max(1) as f64
    };
    keys.into_iter()
        .map(|(n, m)| SummaryRow {
            n,
            m,
            mean_lsh: mean(n, m, &|r| (r.algo == "lsh").then_some(r.makespan)),
            mean_ga: mean(n, m, &|r| (r.algo == "ga").then_some(r.makespan)),
            mean_lower_bound: mean(n, m, &|r| (r.algo == "ga").then_some(r.lower_bound)),
        })
        .collect()
}

pub fn render_summary(rows: &[SummaryRow]) -> String {
    let mut out = format!(
        "{:>6} {:>4} {:>10} {:>10} {:>10} {:>9}\n",
        "tasks", "m", "LSH", "GA", "bound", "GA gain"
    );
    for r in rows {
        out.push_str(&format!(
            "{:>6} {:>4} {:>10.1} {:>10.1} {:>10.1} {:>8.1}%\n",
            r.n,
            r.m,
            r.mean_lsh,
            r.mean_ga,
            r.mean_lower_bound,
            r.advantage_pct()
        ));
    }
    out
}
