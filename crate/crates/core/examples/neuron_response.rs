//! Drives a single neuron with a constant input and prints its potential,
//! showing leak, threshold crossing, reset and the refractory lockout.
//!
//! ```bash
//! cargo run -p evospike --example neuron_response -- [input] [steps]
//! ```

use evospike::{Density, ModelParams, NeuronState};

fn main() {
    let mut args = std::env::args().skip(1);
    let input: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.6);
    let steps: u32 = args.next().and_then(|s| s.parse().ok()).unwrap_or(20);

    let params = ModelParams {
        leak: 0.3,
        integration: 0.5,
        refractory_steps: 2,
        threshold: 0.8,
        spont_prob: 0.0,
        inhib_ratio: 0.0,
        density: Density::Radius(1),
    };
    println!("{params:?}");
    println!("step  potential  refractory  fired");
    let mut state = NeuronState::at_rest(false);
    for t in 0..steps {
        // a draw of 1.0 never triggers spontaneous firing
        state = state.step(&params, input, 1.0);
        println!(
            "{t:>4}  {:>9.4}  {:>10}  {}",
            state.potential,
            state.refractory_remaining,
            if state.fired { "*" } else { "" }
        );
    }
}
