//! `gen`, `solve`, `bench` and `gantt` subcommands.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use taskga_core::taskgraph::generate_random;
use taskga_core::{
    brute_force_optimal, ga, list_schedule, lower_bound, schedule, GaConfig, GenSpec, PolicyKind,
    PriorityPolicy, TaskGraph,
};

use crate::bench::{self, BenchConfig, RunReport};
use crate::format::{parse_graph, parse_schedule, serialize_graph, serialize_schedule};
use crate::gantt::{render_svg, render_text};
use crate::history::write_history;

#[derive(Debug, Parser)]
#[command(
    name = "taskga",
    version,
    about = "Multiprocessor DAG scheduling: height-structured GA vs list scheduling"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random task graph file.
    Gen(GenArgs),
    /// Schedule a task graph with the GA, the list scheduler or the exact search.
    Solve(SolveArgs),
    /// Compare GA and list scheduling over generated instances, as CSV.
    Bench(BenchArgs),
    /// Render a schedule as a text or SVG Gantt chart.
    Gantt(GanttArgs),
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Clone, Args)]
pub struct GeneratorArgs {
    #[arg(long, default_value_t = 3)]
    pub succ_min: usize,
    #[arg(long, default_value_t = 6)]
    pub succ_max: usize,
    #[arg(long, default_value_t = 1)]
    pub et_min: u64,
    #[arg(long, default_value_t = 25)]
    pub et_max: u64,
}

impl GeneratorArgs {
    fn spec(&self, n: usize, seed: u64) -> GenSpec {
        GenSpec {
            n,
            succ_min: self.succ_min,
            succ_max: self.succ_max,
            et_min: self.et_min,
            et_max: self.et_max,
            seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Number of tasks.
    #[arg(long, value_parser = positive)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub generator: GeneratorArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GaArgs {
    #[arg(long, default_value_t = 20)]
    pub pop: usize,
    #[arg(long, default_value_t = 500)]
    pub iters: usize,
    #[arg(long, default_value_t = 0.8)]
    pub cx_rate: f64,
    #[arg(long, default_value_t = 0.1)]
    pub mut_rate: f64,
    /// Stop after this many generations without improvement.
    #[arg(long, default_value_t = 50)]
    pub window: usize,
    /// Put the list schedule into the initial population.
    #[arg(long)]
    pub seed_lsh: bool,
}

impl GaArgs {
    fn config(&self, seed: u64) -> GaConfig {
        GaConfig {
            population_size: self.pop,
            max_iterations: self.iters,
            crossover_rate: self.cx_rate,
            mutation_rate: self.mut_rate,
            convergence_window: self.window,
            seed,
            seed_with_list_schedule: self.seed_lsh,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Ga,
    Lsh,
    Opt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    #[value(name = "bottom_level")]
    BottomLevel,
    #[value(name = "height_descending")]
    HeightDescending,
    #[value(name = "random")]
    Random,
}

impl From<Policy> for PolicyKind {
    fn from(p: Policy) -> Self {
        match p {
            Policy::BottomLevel => PolicyKind::BottomLevel,
            Policy::HeightDescending => PolicyKind::HeightDescending,
            Policy::Random => PolicyKind::Random,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum)]
    pub algo: Algo,
    #[arg(long, value_parser = positive)]
    pub procs: usize,
    /// Schedule file to write.
    #[arg(long, default_value = "schedule.json")]
    pub out: PathBuf,
    /// Seeds the GA and the list scheduler's tie-breaking.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub ga: GaArgs,
    #[arg(long, value_enum, default_value = "bottom_level")]
    pub policy: Policy,
    /// Node budget of the exact search.
    #[arg(long, default_value_t = 50_000_000)]
    pub budget: u64,
    /// Write the GA's per-generation history as CSV.
    #[arg(long)]
    pub history: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', value_parser = positive, default_value = "8,17,23,28,39,44,49,54,59,69,79,89,100")]
    pub sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', value_parser = positive, default_value = "4")]
    pub procs: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// CSV destination; stdout when omitted (the summary then goes to stderr).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub ga: GaArgs,
    #[arg(long, value_enum, default_value = "bottom_level")]
    pub policy: Policy,
    #[command(flatten)]
    pub generator: GeneratorArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GanttFormat {
    Text,
    Svg,
}

#[derive(Debug, Args)]
pub struct GanttArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub schedule: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    pub format: GanttFormat,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Gen(args) => cmd_gen(&args),
        Command::Solve(args) => cmd_solve(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Gantt(args) => cmd_gantt(&args),
    }
}

fn read_graph(path: &Path) -> anyhow::Result<TaskGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_graph(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn cmd_gen(args: &GenArgs) -> anyhow::Result<()> {
    let graph = generate_random(&args.generator.spec(args.n, args.seed))?;
    write_text(&args.out, &(serialize_graph(&graph) + "\n"))?;
    println!(
        "n={} edges={} t_cp={}",
        graph.task_count(),
        graph.edges().len(),
        graph.critical_path_length()
    );
    Ok(())
}

pub fn cmd_solve(args: &SolveArgs) -> anyhow::Result<()> {
    let graph = read_graph(&args.graph)?;
    let m = args.procs;
    let instance_id = args
        .graph
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let started = Instant::now();

    let (lists, makespan, policy, generations, algo) = match args.algo {
        Algo::Ga => {
            let config = args.ga.config(args.seed);
            let result = ga::run(&graph, m, &config)?;
            if let Some(path) = &args.history {
                let file = fs::File::create(path)
                    .with_context(|| format!("writing {}", path.display()))?;
                write_history(&result.history, file)?;
            }
            (
                result.best,
                result.best_makespan,
                bench::ga_summary(&config),
                Some(result.generations_run),
                "ga",
            )
        }
        Algo::Lsh => {
            let kind = PolicyKind::from(args.policy);
            let chart = list_schedule(&graph, m, &PriorityPolicy::new(kind, args.seed));
            (
                chart.processor_lists(),
                chart.makespan(),
                kind.name().to_string(),
                None,
                "lsh",
            )
        }
        Algo::Opt => {
            let opt = brute_force_optimal(&graph, m, args.budget)?;
            (
                opt.chromosome,
                opt.makespan,
                format!("branch_and_bound nodes={}", opt.nodes),
                None,
                "opt",
            )
        }
    };
    let wall_ms = bench::elapsed_ms(started);
    debug_assert_eq!(
        schedule::evaluate(&graph, &lists).map(|c| c.makespan()),
        Ok(makespan)
    );

    write_text(&args.out, &(serialize_schedule(&lists) + "\n"))?;
    let report = RunReport {
        instance_id,
        n: graph.task_count(),
        m,
        algo: algo.into(),
        policy,
        makespan,
        lower_bound: lower_bound(&graph, m),
        generations,
        wall_ms,
        seed: args.seed,
    };
    println!("{}", report.line());
    Ok(())
}

pub fn cmd_bench(args: &BenchArgs) -> anyhow::Result<()> {
    let config = BenchConfig {
        sizes: args.sizes.clone(),
        procs: args.procs.clone(),
        reps: args.reps,
        seed: args.seed,
        generator: args.generator.spec(1, 0),
        ga: args.ga.config(0),
        policy: args.policy.into(),
    };
    config.generator.check()?;
    config.ga.check()?;
    let reports = bench::run_bench(&config)?;
    let summary = bench::render_summary(&bench::summarize(&reports));
    match &args.out {
        Some(path) => {
            let file =
                fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
            bench::write_csv(&reports, file)?;
            print!("{summary}");
        }
        None => {
            bench::write_csv(&reports, io::stdout().lock())?;
            eprint!("{summary}");
        }
    }
    Ok(())
}

pub fn cmd_gantt(args: &GanttArgs) -> anyhow::Result<()> {
    let graph = read_graph(&args.graph)?;
    let text = fs::read_to_string(&args.schedule)
        .with_context(|| format!("reading {}", args.schedule.display()))?;
    let lists = parse_schedule(&text, &graph).with_context(|| {
        format!(
            "{} does not fit {}",
            args.schedule.display(),
            args.graph.display()
        )
    })?;
    let chart = schedule::evaluate(&graph, &lists)?;
    let rendered = match args.format {
        GanttFormat::Text => render_text(&chart),
        GanttFormat::Svg => render_svg(&chart),
    };
    match &args.out {
        Some(path) => write_text(path, &rendered),
        None => {
            io::stdout().lock().write_all(rendered.as_bytes())?;
            Ok(())
        }
    }
}
