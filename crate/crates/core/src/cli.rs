//! Command-line front end: `evolve`, `simulate`, and `fitness`.
//!
//! Flags override values read from the config file. Exit codes: 0 success,
//! 1 usage or config error, 2 data error, 3 runtime failure.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::evolution::{run_evolution, EvolutionConfig, EvolutionResult};
use crate::io::{self, GenomeRecord, RunArtifacts};
use crate::metrics::{asdr, bin_counts, fitness_eq4, BinnedCounts, FitnessValue, Spike};
use crate::rng::{self, purpose};
use crate::sim::{simulate_with, SimSettings, STEP_SECONDS};
use crate::svg;
use crate::topology::{Connectivity, GridLayout, ModelKind};

#[derive(Debug, Parser)]
#[command(name = "evospike", version, about = "Evolve spiking CA and network models against spike recordings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every configured trial of the evolutionary search.
    Evolve(EvolveArgs),
    /// Replay a genome and export its raster, ASDR and figure.
    Simulate(SimulateArgs),
    /// Score a spike record against a target.
    Fitness(FitnessArgs),
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    /// TOML config; every field is optional and unknown keys are rejected.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Target spike-event CSV (`time_s,channel`).
    #[arg(long)]
    pub target: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_parser = parse_kind)]
    pub model: Option<ModelKind>,
    /// Simulation steps per evaluation.
    #[arg(long)]
    pub steps: Option<u32>,
    /// Start of the target window inside the recording, in seconds.
    #[arg(long)]
    pub window_offset_s: Option<f64>,
    #[arg(long)]
    pub generations: Option<u32>,
    #[arg(long)]
    pub trials: Option<u32>,
    #[arg(long)]
    pub population: Option<usize>,
    /// Worker threads for population evaluation; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Genome JSON as written by `evolve`.
    #[arg(long)]
    pub genome: PathBuf,
    #[arg(long, default_value_t = 1500)]
    pub steps: u32,
    #[arg(long)]
    pub out: PathBuf,
    /// Simulation seed; defaults to the seed stored with the genome.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory holding `connectivity_edges.csv` and `connectivity_signs.csv`
    /// to reuse instead of drawing fresh connectivity.
    #[arg(long)]
    pub connectivity: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FitnessArgs {
    #[arg(long)]
    pub target: PathBuf,
    #[arg(long)]
    pub record: PathBuf,
    /// Evaluation window; when omitted each file's window is the span of
    /// whole bins up to its last spike.
    #[arg(long)]
    pub window_s: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub window_offset_s: f64,
    #[arg(long, default_value_t = 1.0)]
    pub bin_s: f64,
}

fn parse_kind(s: &str) -> Result<ModelKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn data(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let outcome = match &cli.command {
        Command::Evolve(a) => cmd_evolve(a).map(|paths| print_paths(&paths)),
        Command::Simulate(a) => cmd_simulate(a).map(|paths| print_paths(&paths)),
        Command::Fitness(a) => cmd_fitness(a).map(|f| {
            println!("objective_f {}", f.objective);
            println!("score {}", f.score);
        }),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn print_paths(paths: &[PathBuf]) {
    for p in paths {
        println!("{}", p.display());
    }
}

/// Config from file (or defaults) with command-line overrides applied.
pub fn resolve_config(args: &EvolveArgs) -> Result<EvolutionConfig, CliError> {
    let mut config = match &args.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            toml::from_str::<EvolutionConfig>(&text).map_err(|e| usage(format!("{}: {e}", p.display())))?
        }
        None => EvolutionConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(kind) = args.model {
        config.model_kind = kind;
    }
    if let Some(steps) = args.steps {
        config.eval_steps = steps;
    }
    if let Some(offset) = args.window_offset_s {
        config.window_offset_s = offset;
    }
    if let Some(g) = args.generations {
        config.generations = g;
    }
    if let Some(t) = args.trials {
        config.trials = t;
    }
    if let Some(n) = args.population {
        config.population_size = n;
    }
    config.validate().map_err(usage)?;
    Ok(config)
}

/// Loads and bins the evaluation window of a target recording.
pub fn load_target(path: &Path, config: &EvolutionConfig) -> Result<BinnedCounts, CliError> {
    let window = config.window_seconds();
    let spikes = io::load_spike_events_at(path, config.window_offset_s, Some(window)).map_err(data)?;
    let counts = bin_counts(&spikes, window, config.bin_seconds).map_err(data)?;
    if counts.total() == 0 {
        return Err(data(format!(
            "{}: no spikes in the {window} s evaluation window",
            path.display()
        )));
    }
    Ok(counts)
}

fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(runtime)
}

/// Mean and sample standard deviation of the pooled top-10 scores of every
/// trial, per generation, alongside the best score over trials.
pub fn summarize(results: &[EvolutionResult]) -> Vec<(u32, f64, f64, f64)> {
    let generations = results.iter().map(|r| r.generations.len()).min().unwrap_or(0);
    (0..generations)
        .map(|g| {
            let pooled: Vec<f64> = results
                .iter()
                .flat_map(|r| r.generations[g].top_scores(10))
                .filter(|s| s.is_finite())
                .collect();
            let n = pooled.len() as f64;
            let mean = if pooled.is_empty() { f64::NAN } else { pooled.iter().sum::<f64>() / n };
            let std = if pooled.len() > 1 {
                (pooled.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            let best = results
                .iter()
                .map(|r| r.generations[g].best.fitness.map_or(f64::NEG_INFINITY, |f| f.score))
                .fold(f64::NEG_INFINITY, f64::max);
            (g as u32, mean, std, best)
        })
        .collect()
}

fn write_summary(out: &Path, results: &[EvolutionResult]) -> Result<Vec<PathBuf>, CliError> {
    let rows = summarize(results);
    let csv_path = out.join("summary.csv");
    let mut text = String::from("generation,mean_top10_score,std_top10_score,best_score\n");
    for (g, mean, std, best) in &rows {
        text.push_str(&format!("{g},{mean},{std},{best}\n"));
    }
    fs::write(&csv_path, text).map_err(|e| runtime(format!("{}: {e}", csv_path.display())))?;

    let means: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let stds: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let best: Vec<f64> = rows.iter().map(|r| r.3).collect();
    let svg_path = out.join("summary.svg");
    fs::write(
        &svg_path,
        svg::fitness_figure(&[("best score over trials", &best)], Some((&means, &stds))),
    )
    .map_err(|e| runtime(format!("{}: {e}", svg_path.display())))?;
    Ok(vec![csv_path, svg_path])
}

pub fn cmd_evolve(args: &EvolveArgs) -> Result<Vec<PathBuf>, CliError> {
    let config = resolve_config(args)?;
    let target = load_target(&args.target, &config)?;
    let pool = thread_pool(args.threads)?;
    fs::create_dir_all(&args.out).map_err(|e| runtime(format!("{}: {e}", args.out.display())))?;

    let mut written = Vec::new();
    let mut results = Vec::new();
    for trial in 0..config.trials {
        let result = pool
            .install(|| run_evolution(&target, &config, trial))
            .map_err(runtime)?;
        let artifacts = RunArtifacts::from_result(&config, result).map_err(runtime)?;
        let dir = args.out.join(format!("trial_{trial:02}"));
        let paths = io::write_run(&artifacts, &dir).map_err(runtime)?;
        written.extend(paths.all().into_iter().map(Path::to_path_buf));
        results.push(artifacts.result);
    }
    written.extend(write_summary(&args.out, &results)?);
    Ok(written)
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<Vec<PathBuf>, CliError> {
    let genome: GenomeRecord = io::read_genome(&args.genome).map_err(data)?;
    let seed = args.seed.unwrap_or(genome.seed);
    let connectivity = match &args.connectivity {
        Some(dir) => {
            let c = io::read_connectivity(
                dir.join("connectivity_edges.csv"),
                dir.join("connectivity_signs.csv"),
                genome.model_kind,
            )
            .map_err(data)?;
            if c.nodes() != GridLayout::default().len() {
                return Err(data(format!("{}: connectivity must cover 100 nodes", dir.display())));
            }
            c
        }
        None => {
            let mut s = rng::stream(rng::derive_seed(seed, &[purpose::CONNECTIVITY]));
            Connectivity::instantiate(&GridLayout::default(), &genome.params, &mut s).map_err(runtime)?
        }
    };
    let settings = SimSettings {
        steps: args.steps,
        step_seconds: STEP_SECONDS,
        warmup_steps: 0,
    };
    let record = simulate_with(&genome.params, &connectivity, &settings, &mut rng::stream(seed))
        .map_err(usage_or_runtime)?;
    let observed = record.observed_record();
    let spikes = observed.spikes();
    let window = observed.window_seconds();
    // partial trailing seconds are dropped from the ASDR
    let asdr_counts = asdr(&spikes, window.floor().max(1.0)).map_err(runtime)?;

    fs::create_dir_all(&args.out).map_err(|e| runtime(format!("{}: {e}", args.out.display())))?;
    let raster = args.out.join("raster.csv");
    let asdr_path = args.out.join("asdr.csv");
    let svg_path = args.out.join("raster.svg");
    io::write_spike_events(&raster, &spikes).map_err(runtime)?;
    io::write_asdr(&asdr_path, &asdr_counts).map_err(runtime)?;
    fs::write(&svg_path, svg::raster_figure(&spikes, observed.nodes, window, &asdr_counts))
        .map_err(|e| runtime(format!("{}: {e}", svg_path.display())))?;
    Ok(vec![raster, asdr_path, svg_path])
}

fn usage_or_runtime(e: Error) -> CliError {
    match e {
        Error::Validation(_) => usage(e),
        other => runtime(other),
    }
}

fn inferred_window(spikes: &[Spike], bin_s: f64) -> f64 {
    let last = spikes.iter().map(|s| s.time_s).fold(0.0, f64::max);
    ((last / bin_s).floor() + 1.0) * bin_s
}

pub fn cmd_fitness(args: &FitnessArgs) -> Result<FitnessValue, CliError> {
    let load = |p: &Path| io::load_spike_events_at(p, args.window_offset_s, args.window_s).map_err(data);
    let target = load(&args.target)?;
    let record = load(&args.record)?;
    let (tw, rw) = match args.window_s {
        Some(w) => (w, w),
        None => (inferred_window(&target, args.bin_s), inferred_window(&record, args.bin_s)),
    };
    let exp = bin_counts(&target, tw, args.bin_s).map_err(data)?;
    let sim = bin_counts(&record, rw, args.bin_s).map_err(data)?;
    fitness_eq4(&exp, &sim).map_err(data)
}
