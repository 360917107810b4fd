//! Prints the Moore neighborhood of a cell on the 10x10 grid for every CA
//! radius, plus the out-degree map at radius 2.
//!
//! ```bash
//! cargo run -p evospike --example ca_neighborhoods -- [row] [col]
//! ```

use evospike::topology::build_ca;
use evospike::GridLayout;

fn main() -> evospike::Result<()> {
    let mut args = std::env::args().skip(1);
    let row: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let col: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let layout = GridLayout::default();
    let node = layout.index(row, col);

    for radius in 1..=6 {
        let conn = build_ca(&layout, radius)?;
        println!("radius {radius}: ({row},{col}) has {} neighbors", conn.out_degree(node));
        for r in 0..layout.rows {
            let line: String = (0..layout.cols)
                .map(|c| {
                    let j = layout.index(r, c);
                    if j == node {
                        'o'
                    } else if conn.has_edge(node, j) {
                        '#'
                    } else {
                        '.'
                    }
                })
                .collect();
            println!("  {line}");
        }
    }

    let conn = build_ca(&layout, 2)?;
    println!("out-degree at radius 2:");
    for r in 0..layout.rows {
        let line: Vec<String> = (0..layout.cols)
            .map(|c| format!("{:>3}", conn.out_degree(layout.index(r, c))))
            .collect();
        println!("  {}", line.join(""));
    }
    Ok(())
}
