//! Spiking-neuron cellular automata and geometric networks, evolved to
//! reproduce the spike-count statistics of multi-electrode recordings.
//!
//! A model is 100 simplified leaky integrate-and-fire neurons on a 10x10
//! grid, wired either as a Moore-neighborhood cellular automaton or as a
//! random geometric network with Gaussian distance decay. Sixty central
//! nodes stand in for the recording channels. A seven-gene genome sets the
//! leak, gain, refractory period, threshold, spontaneous firing rate,
//! inhibitory fraction and connection density; a generational EA tunes it
//! so that the sorted one-second spike counts of the model match a target.
//!
//! | module | contents |
//! |---|---|
//! | [`neuron`] | single-neuron update rule |
//! | [`topology`] | grid, CA and network builders, observed channels |
//! | [`genome`] | normalized genome and bound decoding |
//! | [`sim`] | synchronous population simulation |
//! | [`metrics`] | binning, ASDR, sorted-bin fitness, spatial variant |
//! | [`evolution`] | selection, crossover, mutation, elitism, run loop |
//! | [`io`] | CSV/JSON/TOML formats and run directories |
//! | [`cli`] | `evolve`, `simulate`, `fitness` commands |
//!
//! See `crates/core/examples/` for one runnable program per capability.

pub mod cli;
pub mod error;
pub mod evolution;
pub mod genome;
pub mod io;
pub mod metrics;
pub mod neuron;
pub mod rng;
pub mod sim;
pub mod svg;
pub mod topology;

pub use error::{Error, Result};
pub use evolution::{run_evolution, EvolutionConfig, EvolutionResult, Individual};
pub use genome::{GeneBounds, Genome};
pub use metrics::{fitness_eq4, BinnedCounts, FitnessValue, Spike};
pub use neuron::{Density, ModelParams, NeuronState};
pub use sim::{simulate, SpikeRecord};
pub use topology::{Connectivity, GridLayout, ModelKind};
