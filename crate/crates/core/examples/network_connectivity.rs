//! Samples geometric networks for a range of length scales and compares the
//! mean out-degree with its expectation from the connection probability.
//!
//! ```bash
//! cargo run --release -p evospike --example network_connectivity -- [builds] [seed]
//! ```

use evospike::rng;
use evospike::topology::{build_network, connection_probability};
use evospike::GridLayout;

fn main() -> evospike::Result<()> {
    let mut args = std::env::args().skip(1);
    let builds: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(200);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let layout = GridLayout::default();
    let n = layout.len();

    let mut expected = Vec::new();
    for c_d in [0.1, 0.5, 1.0, 2.1, 3.0, 4.1] {
        let mut e = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    e += connection_probability(layout.euclidean(i, j), c_d)?;
                }
            }
        }
        expected.push((c_d, e / n as f64));
    }

    let mut rng = rng::stream(seed);
    println!("{:>5}  {:>12}  {:>12}", "c_D", "mean degree", "expected");
    for (c_d, e) in expected {
        let mut total = 0usize;
        for _ in 0..builds {
            total += build_network(&layout, c_d, &mut rng)?.edges().len();
        }
        println!("{c_d:>5}  {:>12.3}  {e:>12.3}", total as f64 / (builds * n) as f64);
    }
    Ok(())
}
