//! Recovers a known model: simulate a reference genome for 60 s, use its
//! observed one-second spike counts as the target, and evolve a population
//! toward it.
//!
//! ```bash
//! cargo run --release -p evospike --example evolve_synthetic -- [network|ca] [generations] [seed]
//! ```

use std::time::Instant;

use evospike::evolution::{record_counts, replay, run_evolution_with};
use evospike::rng;
use evospike::{Connectivity, EvolutionConfig, Genome, GridLayout, ModelKind};

fn main() -> evospike::Result<()> {
    let mut args = std::env::args().skip(1);
    let kind: ModelKind = args.next().as_deref().unwrap_or("network").parse()?;
    let generations: u32 = args.next().and_then(|s| s.parse().ok()).unwrap_or(30);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(2024);

    let config = EvolutionConfig {
        model_kind: kind,
        generations,
        trials: 1,
        seed,
        ..Default::default()
    };

    // leak, gain, refractory, threshold, spontaneous, inhibitory, density
    let reference = Genome::new([0.3, 0.5, 0.3, 0.5, 0.05, 0.3, 0.5])?;
    let params = config.gene_bounds().decode(&reference)?;
    let conn = Connectivity::instantiate(&GridLayout::default(), &params, &mut rng::stream(seed ^ 1))?;
    let target = record_counts(&replay(&params, &conn, &config, seed ^ 2)?, config.bin_seconds)?;
    println!("reference params: {params:?}");
    println!("target: {} spikes over {} bins", target.total(), target.len());

    let started = Instant::now();
    let result = run_evolution_with(&target, &config, 0, |g| {
        println!(
            "gen {:>3}  best f = {:.4}  score = {:.4}",
            g.generation,
            g.best.objective(),
            1.0 - g.best.objective()
        );
        Ok(())
    })?;
    let best = &result.best;
    println!("elapsed: {:.1?}", started.elapsed());
    println!("best genome: {:?}", best.genome.genes());
    println!("best params: {:?}", config.gene_bounds().decode(&best.genome)?);
    println!("best objective: {:.4}", best.objective());
    Ok(())
}
