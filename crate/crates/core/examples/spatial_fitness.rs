//! Compares per-channel firing rates of two simulations with the spatial
//! objective, next to the temporal one on the same records.
//!
//! ```bash
//! cargo run --release -p evospike --example spatial_fitness -- [seed]
//! ```

use evospike::evolution::record_counts;
use evospike::metrics::{mean_rates, spatial_fitness};
use evospike::topology::OBSERVED_CHANNELS;
use evospike::{fitness_eq4, rng, simulate};
use evospike::{Connectivity, GeneBounds, Genome, GridLayout, ModelKind, SpikeRecord};

fn run(genes: [f64; 7], seed: u64) -> evospike::Result<SpikeRecord> {
    let params = GeneBounds::defaults(ModelKind::Network).decode(&Genome::new(genes)?)?;
    let conn = Connectivity::instantiate(&GridLayout::default(), &params, &mut rng::stream(seed))?;
    Ok(simulate(&params, &conn, 1500, &mut rng::stream(seed ^ 0xff))?.observed_record())
}

fn main() -> evospike::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let target = run([0.3, 0.5, 0.3, 0.5, 0.05, 0.3, 0.5], seed)?;
    let target_rates = mean_rates(&target.spikes(), OBSERVED_CHANNELS, target.window_seconds())?;
    let target_counts = record_counts(&target, 1.0)?;
    // connectivity and noise differ between runs, so even the same genome
    // lands some distance away
    println!("target       spikes {:>6}", target.total_spikes());

    for (label, genes) in [
        ("same genome", [0.3, 0.5, 0.3, 0.5, 0.05, 0.3, 0.5]),
        ("sparser", [0.3, 0.5, 0.3, 0.5, 0.01, 0.3, 0.2]),
        ("denser", [0.1, 0.9, 0.1, 0.2, 0.2, 0.1, 0.8]),
    ] {
        let rec = run(genes, seed + 1)?;
        let rates = mean_rates(&rec.spikes(), OBSERVED_CHANNELS, rec.window_seconds())?;
        let spatial = spatial_fitness(&target_rates, &rates)?;
        let temporal = fitness_eq4(&target_counts, &record_counts(&rec, 1.0)?)?;
        println!(
            "{label:<12} spikes {:>6}  spatial f {spatial:.4}  temporal f {:.4}",
            rec.total_spikes(),
            temporal.objective
        );
    }
    Ok(())
}
