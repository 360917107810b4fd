//! Decodes a genome, simulates 60 s on the grid and writes the observed
//! raster, per-second spike counts and an SVG figure.
//!
//! ```bash
//! cargo run --release -p evospike --example simulate_raster -- [network|ca] [out_dir] [seed]
//! ```

use std::path::PathBuf;

use evospike::metrics::asdr;
use evospike::{io, rng, simulate, svg};
use evospike::{Connectivity, GeneBounds, Genome, GridLayout, ModelKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let kind: ModelKind = args.next().as_deref().unwrap_or("ca").parse()?;
    let out = PathBuf::from(args.next().unwrap_or_else(|| "raster_out".into()));
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(42);

    let genome = Genome::new([0.3, 0.5, 0.3, 0.5, 0.05, 0.3, 0.5])?;
    let params = GeneBounds::defaults(kind).decode(&genome)?;
    println!("{params:?}");

    let conn = Connectivity::instantiate(&GridLayout::default(), &params, &mut rng::stream(seed))?;
    println!(
        "{} edges, {} inhibitory nodes",
        conn.edges().len(),
        conn.inhibitory_count()
    );
    let record = simulate(&params, &conn, 1500, &mut rng::stream(seed + 1))?;
    let observed = record.observed_record();
    let spikes = observed.spikes();
    let per_second = asdr(&spikes, observed.window_seconds())?;
    println!(
        "{} spikes on all nodes, {} on the {} observed channels",
        record.total_spikes(),
        spikes.len(),
        observed.nodes
    );
    println!("ASDR: {per_second:?}");

    std::fs::create_dir_all(&out)?;
    io::write_spike_events(out.join("raster.csv"), &spikes)?;
    io::write_asdr(out.join("asdr.csv"), &per_second)?;
    let figure = svg::raster_figure(&spikes, observed.nodes, observed.window_seconds(), &per_second);
    std::fs::write(out.join("raster.svg"), figure)?;
    println!("wrote {}", out.display());
    Ok(())
}
