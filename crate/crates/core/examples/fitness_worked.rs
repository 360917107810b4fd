//! Scores a few hand-made per-second count vectors against each other,
//! including a mismatch that only differs in the order of the bins.
//!
//! ```bash
//! cargo run -p evospike --example fitness_worked
//! ```

use evospike::metrics::bin_counts;
use evospike::{fitness_eq4, BinnedCounts, Spike};

fn counts(v: &[u64]) -> BinnedCounts {
    BinnedCounts {
        bin_seconds: 1.0,
        counts: v.to_vec(),
    }
}

fn main() -> evospike::Result<()> {
    let cases: [(&[u64], &[u64]); 5] = [
        (&[2, 0, 3], &[1, 1, 1]),
        (&[2, 0, 3], &[3, 2, 0]),
        (&[5, 5, 5, 5], &[0, 0, 0, 0]),
        (&[1, 1, 1, 1], &[0, 0, 0, 4]),
        (&[0, 0, 0, 4], &[1, 1, 1, 1]),
    ];
    println!("{:<14} {:<14} {:>9} {:>9}", "target", "simulated", "f", "score");
    for (exp, sim) in cases {
        let f = fitness_eq4(&counts(exp), &counts(sim))?;
        println!(
            "{:<14} {:<14} {:>9.4} {:>9.4}",
            format!("{exp:?}"),
            format!("{sim:?}"),
            f.objective,
            f.score
        );
    }

    // the same first case built from spike times
    let spikes = [0.1, 0.5, 2.0, 2.2, 2.9].map(|t| Spike { time_s: t, channel: 0 });
    let binned = bin_counts(&spikes, 3.0, 1.0)?;
    println!("spike times binned per second: {:?}", binned.counts);

    match fitness_eq4(&counts(&[0, 0]), &counts(&[1, 0])) {
        Ok(f) => println!("silent target: {f:?}"),
        Err(e) => println!("silent target: {e}"),
    }
    Ok(())
}
