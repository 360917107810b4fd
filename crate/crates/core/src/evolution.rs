//! Generational evolutionary algorithm.
//!
//! Each generation is evaluated, ranked by ascending objective, truncated to
//! the parent fraction, and refilled with uniform-crossover children that are
//! then mutated gene by gene. The best few individuals pass through untouched,
//! keeping their connectivity instance and their evaluated fitness.
//!
//! All randomness comes from streams keyed by `(seed, trial, generation,
//! individual, purpose)`, so results do not depend on thread count.

use std::sync::Arc;

use log::warn;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::{Bound, Gene, GeneBounds, Genome};
use crate::metrics::{bin_counts, fitness_eq4, BinnedCounts, FitnessValue};
use crate::neuron::ModelParams;
use crate::rng::{self, purpose};
use crate::sim::{simulate_with, step_time, SimSettings, SpikeRecord, STEP_SECONDS};
use crate::topology::{Connectivity, GridLayout, ModelKind};

/// Birth generation and slot of an individual; also the ranking tie-break.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LineageId {
    pub generation: u32,
    pub index: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genome: Genome,
    /// Instantiated on first evaluation and kept for as long as the
    /// individual survives as an elite.
    pub connectivity: Option<Arc<Connectivity>>,
    pub fitness: Option<FitnessValue>,
    pub lineage: LineageId,
    /// Seed of the simulation stream that produced `fitness`.
    pub sim_seed: Option<u64>,
}

impl Individual {
    pub fn new(genome: Genome, lineage: LineageId) -> Self {
        Individual {
            genome,
            connectivity: None,
            fitness: None,
            lineage,
            sim_seed: None,
        }
    }

    pub fn objective(&self) -> f64 {
        self.fitness.map_or(f64::INFINITY, |f| f.objective)
    }
}

/// Per-gene bound overrides from a config file; unset genes keep defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsOverride {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leak: Option<Bound>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integration: Option<Bound>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refractory: Option<Bound>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<Bound>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spont_prob: Option<Bound>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inhib_ratio: Option<Bound>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<Bound>,
}

impl BoundsOverride {
    /// Every gene set explicitly from `bounds`.
    pub fn full(bounds: &GeneBounds) -> Self {
        BoundsOverride {
            leak: Some(bounds.leak),
            integration: Some(bounds.integration),
            refractory: Some(bounds.refractory),
            threshold: Some(bounds.threshold),
            spont_prob: Some(bounds.spont_prob),
            inhib_ratio: Some(bounds.inhib_ratio),
            density: Some(bounds.density),
        }
    }

    pub fn apply(&self, mut base: GeneBounds) -> GeneBounds {
        let entries = [
            (Gene::Leak, self.leak),
            (Gene::Integration, self.integration),
            (Gene::Refractory, self.refractory),
            (Gene::Threshold, self.threshold),
            (Gene::SpontProb, self.spont_prob),
            (Gene::InhibRatio, self.inhib_ratio),
            (Gene::Density, self.density),
        ];
        for (gene, bound) in entries {
            if let Some(b) = bound {
                base.set(gene, b);
            }
        }
        base
    }
}

fn default_population_size() -> usize {
    60
}
fn default_generations() -> u32 {
    80
}
fn default_parent_fraction() -> f64 {
    0.5
}
fn default_elite_fraction() -> f64 {
    0.05
}
fn default_mutation_prob() -> f64 {
    0.10
}
fn default_eval_steps() -> u32 {
    1500
}
fn default_trials() -> u32 {
    10
}
fn default_model_kind() -> ModelKind {
    ModelKind::Network
}
fn default_step_seconds() -> f64 {
    STEP_SECONDS
}
fn default_bin_seconds() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    #[serde(default = "default_population_size")]
    pub population_size: usize,
    #[serde(default = "default_generations")]
    pub generations: u32,
    #[serde(default = "default_parent_fraction")]
    pub parent_fraction: f64,
    #[serde(default = "default_elite_fraction")]
    pub elite_fraction: f64,
    #[serde(default = "default_mutation_prob")]
    pub mutation_prob: f64,
    /// Simulated steps per evaluation; 1500 steps of 40 ms is 60 s.
    #[serde(default = "default_eval_steps")]
    pub eval_steps: u32,
    #[serde(default = "default_trials")]
    pub trials: u32,
    #[serde(default = "default_model_kind")]
    pub model_kind: ModelKind,
    #[serde(default)]
    pub bounds: BoundsOverride,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_step_seconds")]
    pub step_seconds: f64,
    #[serde(default = "default_bin_seconds")]
    pub bin_seconds: f64,
    #[serde(default)]
    pub warmup_steps: u32,
    /// Start of the target window inside the recording.
    #[serde(default)]
    pub window_offset_s: f64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            population_size: default_population_size(),
            generations: default_generations(),
            parent_fraction: default_parent_fraction(),
            elite_fraction: default_elite_fraction(),
            mutation_prob: default_mutation_prob(),
            eval_steps: default_eval_steps(),
            trials: default_trials(),
            model_kind: default_model_kind(),
            bounds: BoundsOverride::default(),
            seed: 0,
            step_seconds: default_step_seconds(),
            bin_seconds: default_bin_seconds(),
            warmup_steps: 0,
            window_offset_s: 0.0,
        }
    }
}

/// `ceil(fraction * n)`, tolerant of representation error in the product.
fn fraction_count(fraction: f64, n: usize) -> usize {
    ((fraction * n as f64 - 1e-9).ceil().max(1.0) as usize).min(n)
}

impl EvolutionConfig {
    pub fn gene_bounds(&self) -> GeneBounds {
        self.bounds.apply(GeneBounds::defaults(self.model_kind))
    }

    pub fn elite_count(&self) -> usize {
        fraction_count(self.elite_fraction, self.population_size)
    }

    pub fn parent_count(&self) -> usize {
        fraction_count(self.parent_fraction, self.population_size)
    }

    pub fn sim_settings(&self) -> SimSettings {
        SimSettings {
            steps: self.eval_steps,
            step_seconds: self.step_seconds,
            warmup_steps: self.warmup_steps,
        }
    }

    pub fn window_seconds(&self) -> f64 {
        step_time(self.eval_steps, self.step_seconds)
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::Config(m));
        if self.population_size < 2 {
            return err(format!(
                "population_size must be >= 2, got {}",
                self.population_size
            ));
        }
        if !(self.elite_fraction > 0.0
            && self.elite_fraction <= self.parent_fraction
            && self.parent_fraction < 1.0)
        {
            return err(format!(
                "fractions must satisfy 0 < elite_fraction <= parent_fraction < 1, got {} and {}",
                self.elite_fraction, self.parent_fraction
            ));
        }
        if !(0.0..=1.0).contains(&self.mutation_prob) {
            return err(format!(
                "mutation_prob must lie in [0, 1], got {}",
                self.mutation_prob
            ));
        }
        if self.eval_steps == 0 {
            return err("eval_steps must be >= 1".into());
        }
        if self.trials == 0 {
            return err("trials must be >= 1".into());
        }
        if !(self.step_seconds > 0.0) || !(self.bin_seconds > 0.0) {
            return err("step_seconds and bin_seconds must be > 0".into());
        }
        if !(self.window_offset_s >= 0.0) {
            return err("window_offset_s must be >= 0".into());
        }
        self.gene_bounds()
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        // window must split into whole bins
        bin_counts(&[], self.window_seconds(), self.bin_seconds)
            .map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRecord {
    pub generation: u32,
    /// Fitness of every slot, in population order.
    pub fitness: Vec<FitnessValue>,
    pub lineage: Vec<LineageId>,
    pub best: Individual,
}

impl GenerationRecord {
    /// The `k` highest scores, best first.
    pub fn top_scores(&self, k: usize) -> Vec<f64> {
        let mut scores: Vec<f64> = self.fitness.iter().map(|f| f.score).collect();
        scores.sort_by(|a, b| b.total_cmp(a));
        scores.truncate(k);
        scores
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionResult {
    pub trial: u32,
    pub generations: Vec<GenerationRecord>,
    /// Best individual seen in any generation.
    pub best: Individual,
    pub final_population: Vec<Individual>,
}

impl EvolutionResult {
    /// Best-so-far objective after each generation.
    pub fn best_so_far(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.generations
            .iter()
            .map(|g| {
                best = best.min(g.best.objective());
                best
            })
            .collect()
    }
}

/// Simulation stream key of one evaluation.
pub fn simulation_seed(config: &EvolutionConfig, trial: u32, generation: u32, index: usize) -> u64 {
    rng::derive_seed(
        config.seed,
        &[trial as u64, generation as u64, index as u64, purpose::SIMULATION],
    )
}

pub fn connectivity_seed(
    config: &EvolutionConfig,
    trial: u32,
    generation: u32,
    index: usize,
) -> u64 {
    rng::derive_seed(
        config.seed,
        &[trial as u64, generation as u64, index as u64, purpose::CONNECTIVITY],
    )
}

/// Simulates a decoded model and returns the full (unobserved) record.
pub fn replay(
    params: &ModelParams,
    connectivity: &Connectivity,
    config: &EvolutionConfig,
    sim_seed: u64,
) -> Result<SpikeRecord> {
    simulate_with(
        params,
        connectivity,
        &config.sim_settings(),
        &mut rng::stream(sim_seed),
    )
}

/// Observed-channel counts of a record, binned like the target.
pub fn record_counts(record: &SpikeRecord, bin_seconds: f64) -> Result<BinnedCounts> {
    let observed = record.observed_record();
    bin_counts(&observed.spikes(), observed.window_seconds(), bin_seconds)
}

fn evaluate_one(
    ind: &mut Individual,
    index: usize,
    target: &BinnedCounts,
    config: &EvolutionConfig,
    bounds: &GeneBounds,
    trial: u32,
    generation: u32,
) -> Result<()> {
    if ind.fitness.is_some() {
        return Ok(());
    }
    let params = bounds.decode(&ind.genome)?;
    let connectivity = match &ind.connectivity {
        Some(c) => Arc::clone(c),
        None => {
            let mut stream = rng::stream(connectivity_seed(config, trial, generation, index));
            let c = Arc::new(Connectivity::instantiate(
                &GridLayout::default(),
                &params,
                &mut stream,
            )?);
            ind.connectivity = Some(Arc::clone(&c));
            c
        }
    };
    let sim_seed = simulation_seed(config, trial, generation, index);
    let record = replay(&params, &connectivity, config, sim_seed)?;
    let counts = record_counts(&record, config.bin_seconds)?;
    let fitness = match fitness_eq4(target, &counts) {
        Ok(f) => f,
        Err(Error::UndefinedFitness) => {
            warn!(
                "trial {trial} generation {generation} individual {index}: undefined fitness, ranked last"
            );
            FitnessValue::undefined()
        }
        Err(e) => return Err(e),
    };
    ind.fitness = Some(fitness);
    ind.sim_seed = Some(sim_seed);
    Ok(())
}

/// Evaluates every individual that has no fitness yet, in parallel on the
/// current rayon pool. Individuals that already carry a fitness (elites) are
/// left as they are.
pub fn evaluate_population(
    population: &mut [Individual],
    target: &BinnedCounts,
    config: &EvolutionConfig,
    trial: u32,
    generation: u32,
) -> Result<()> {
    let expected_bins = bin_counts(&[], config.window_seconds(), config.bin_seconds)?.len();
    if target.len() != expected_bins {
        return Err(Error::validation(format!(
            "target has {} bins but evaluation window yields {expected_bins}",
            target.len()
        )));
    }
    let bounds = config.gene_bounds();
    population
        .par_iter_mut()
        .enumerate()
        .try_for_each(|(i, ind)| evaluate_one(ind, i, target, config, &bounds, trial, generation))
}

/// Indices of the population sorted best first; ties keep lineage order.
pub fn rank(population: &[Individual]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|&a, &b| {
        population[a]
            .objective()
            .total_cmp(&population[b].objective())
            .then(population[a].lineage.cmp(&population[b].lineage))
    });
    order
}

/// The top `parent_fraction` of the ranked population.
pub fn select_parents<'a>(
    population: &'a [Individual],
    config: &EvolutionConfig,
) -> Result<Vec<&'a Individual>> {
    if population.iter().any(|i| i.fitness.is_none()) {
        return Err(Error::validation("every individual must be evaluated before selection"));
    }
    let n = fraction_count(config.parent_fraction, population.len());
    Ok(rank(population)
        .into_iter()
        .take(n)
        .map(|i| &population[i])
        .collect())
}

/// Each gene copied from `a` or `b` with equal probability.
pub fn uniform_crossover<R: Rng + ?Sized>(a: &Genome, b: &Genome, rng: &mut R) -> Genome {
    let (ga, gb) = (a.genes(), b.genes());
    Genome::from_unchecked(std::array::from_fn(|i| {
        if rng.random_bool(0.5) {
            ga[i]
        } else {
            gb[i]
        }
    }))
}

/// Replaces each gene by a fresh uniform draw with probability `p`.
pub fn mutate<R: Rng + ?Sized>(genome: &Genome, rng: &mut R, p: f64) -> Genome {
    let g = genome.genes();
    Genome::from_unchecked(std::array::from_fn(|i| {
        if rng.random::<f64>() < p {
            rng.random::<f64>()
        } else {
            g[i]
        }
    }))
}

/// Builds generation `generation` from the evaluated previous one.
pub fn next_generation(
    population: &[Individual],
    config: &EvolutionConfig,
    trial: u32,
    generation: u32,
) -> Result<Vec<Individual>> {
    let parents = select_parents(population, config)?;
    let ranked = rank(population);
    let n = config.population_size;
    let elites = config.elite_count();
    let mut rng = rng::derive_stream(
        config.seed,
        &[trial as u64, generation as u64, purpose::BREEDING],
    );

    let mut next: Vec<Individual> = ranked[..elites]
        .iter()
        .map(|&i| population[i].clone())
        .collect();
    for slot in elites..n {
        let a = parents[rng.random_range(0..parents.len())];
        let b = parents[rng.random_range(0..parents.len())];
        let child = uniform_crossover(&a.genome, &b.genome, &mut rng);
        let child = mutate(&child, &mut rng, config.mutation_prob);
        next.push(Individual::new(
            child,
            LineageId {
                generation,
                index: slot as u32,
            },
        ));
    }
    Ok(next)
}

fn initial_population(config: &EvolutionConfig, trial: u32) -> Vec<Individual> {
    (0..config.population_size)
        .map(|i| {
            let mut s = rng::derive_stream(config.seed, &[trial as u64, 0, i as u64, purpose::INIT]);
            Individual::new(
                Genome::random(&mut s),
                LineageId {
                    generation: 0,
                    index: i as u32,
                },
            )
        })
        .collect()
}

fn snapshot(population: &[Individual], generation: u32) -> GenerationRecord {
    let best = rank(population)[0];
    GenerationRecord {
        generation,
        fitness: population
            .iter()
            .map(|i| i.fitness.unwrap_or_else(FitnessValue::undefined))
            .collect(),
        lineage: population.iter().map(|i| i.lineage).collect(),
        best: population[best].clone(),
    }
}

/// Runs one trial: the initial population plus `config.generations` bred
/// generations. `on_generation` sees each record as soon as it exists.
pub fn run_evolution_with<F>(
    target: &BinnedCounts,
    config: &EvolutionConfig,
    trial: u32,
    mut on_generation: F,
) -> Result<EvolutionResult>
where
    F: FnMut(&GenerationRecord) -> Result<()>,
{
    config.validate()?;
    let mut population = initial_population(config, trial);
    evaluate_population(&mut population, target, config, trial, 0)?;
    let mut records = vec![snapshot(&population, 0)];
    on_generation(&records[0])?;

    for generation in 1..=config.generations {
        population = next_generation(&population, config, trial, generation)?;
        evaluate_population(&mut population, target, config, trial, generation)?;
        let rec = snapshot(&population, generation);
        on_generation(&rec)?;
        records.push(rec);
    }

    let best = records
        .iter()
        .map(|r| &r.best)
        .min_by(|a, b| a.objective().total_cmp(&b.objective()).then(a.lineage.cmp(&b.lineage)))
        .cloned()
        .expect("at least the initial generation is recorded");
    Ok(EvolutionResult {
        trial,
        generations: records,
        best,
        final_population: population,
    })
}

pub fn run_evolution(
    target: &BinnedCounts,
    config: &EvolutionConfig,
    trial: u32,
) -> Result<EvolutionResult> {
    run_evolution_with(target, config, trial, |_| Ok(()))
}
