//! Builds a synthetic 60 s recording, then drives the command-line front
//! end in-process: evolve against it, replay the best genome, and score
//! the replay.
//!
//! ```bash
//! cargo run --release -p evospike --example cli_run -- [out_dir]
//! ```

use std::path::PathBuf;

use evospike::{cli, io, rng, simulate};
use evospike::{Connectivity, GeneBounds, Genome, GridLayout, ModelKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "cli_run_out".into()));
    std::fs::create_dir_all(&out)?;

    let params = GeneBounds::defaults(ModelKind::Ca).decode(&Genome::new([0.3, 0.5, 0.3, 0.5, 0.05, 0.3, 0.5])?)?;
    let conn = Connectivity::instantiate(&GridLayout::default(), &params, &mut rng::stream(1))?;
    let record = simulate(&params, &conn, 1500, &mut rng::stream(2))?.observed_record();
    let target = out.join("target.csv");
    io::write_spike_events(&target, &record.spikes())?;

    let s = |p: &PathBuf| p.display().to_string();
    let evolved = out.join("evolved");
    let steps: [Vec<String>; 3] = [
        vec![
            "evolve".into(), "--target".into(), s(&target), "--out".into(), s(&evolved),
            "--model".into(), "ca".into(), "--generations".into(), "10".into(),
            "--trials".into(), "2".into(), "--population".into(), "30".into(), "--seed".into(), "3".into(),
        ],
        vec![
            "simulate".into(), "--genome".into(), s(&evolved.join("trial_00/best_genome.json")),
            "--connectivity".into(), s(&evolved.join("trial_00")), "--out".into(), s(&out.join("replay")),
        ],
        vec![
            "fitness".into(), "--target".into(), s(&target),
            "--record".into(), s(&out.join("replay/raster.csv")), "--window-s".into(), "60".into(),
        ],
    ];
    for argv in steps {
        println!("$ evospike {}", argv.join(" "));
        let code = cli::run(std::iter::once("evospike".to_string()).chain(argv));
        if code != 0 {
            eprintln!("exited with {code}");
            std::process::exit(code);
        }
    }
    Ok(())
}
