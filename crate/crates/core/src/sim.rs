//! Synchronous simulation of a 100-neuron model.
//!
//! Each step every neuron reads the previous step's spikes from its
//! presynaptic partners, integrates, and resolves firing. One uniform draw is
//! consumed per neuron per step, in node order, whether or not the neuron
//! can fire, so the stream position depends only on the step count.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::Spike;
use crate::neuron::{ModelParams, NeuronState};
use crate::topology::{observed_nodes, Connectivity, GridLayout};

/// Seconds of recording represented by one simulation step.
pub const STEP_SECONDS: f64 = 0.04;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpikeEvent {
    pub step: u32,
    pub node: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpikeRecord {
    pub steps: u32,
    pub step_seconds: f64,
    /// Number of addressable nodes (100 for a full record, 60 once observed).
    pub nodes: usize,
    /// Sorted by step, then node.
    pub events: Vec<SpikeEvent>,
    /// Node indices that correspond to recording channels.
    pub observed: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    pub steps: u32,
    pub step_seconds: f64,
    /// Steps simulated before recording starts.
    pub warmup_steps: u32,
}

impl SimSettings {
    pub fn new(steps: u32) -> Self {
        SimSettings {
            steps,
            step_seconds: STEP_SECONDS,
            warmup_steps: 0,
        }
    }
}

/// Number of steps covering `seconds` of recording.
pub fn steps_for_seconds(seconds: f64, step_seconds: f64) -> u32 {
    (seconds / step_seconds).round() as u32
}

/// Converts a step count to seconds, rounded to the nanosecond so that whole
/// seconds come out exact.
pub fn step_time(step: u32, step_seconds: f64) -> f64 {
    (step as f64 * step_seconds * 1e9).round() / 1e9
}

impl SpikeRecord {
    pub fn window_seconds(&self) -> f64 {
        step_time(self.steps, self.step_seconds)
    }

    pub fn total_spikes(&self) -> usize {
        self.events.len()
    }

    /// Events as timed spikes; the node index is used as the channel.
    pub fn spikes(&self) -> Vec<Spike> {
        self.events
            .iter()
            .map(|e| Spike {
                time_s: step_time(e.step, self.step_seconds),
                channel: e.node as usize,
            })
            .collect()
    }

    /// Spike steps of one node, ascending.
    pub fn node_steps(&self, node: usize) -> Vec<u32> {
        self.events
            .iter()
            .filter(|e| e.node as usize == node)
            .map(|e| e.step)
            .collect()
    }

    /// Keeps spikes of observed nodes only, renumbered to channels
    /// `0..observed.len()` in observed order.
    pub fn observed_record(&self) -> SpikeRecord {
        let mut channel_of = vec![None; self.nodes];
        for (ch, &node) in self.observed.iter().enumerate() {
            channel_of[node] = Some(ch as u32);
        }
        let events = self
            .events
            .iter()
            .filter_map(|e| {
                channel_of[e.node as usize].map(|ch| SpikeEvent {
                    step: e.step,
                    node: ch,
                })
            })
            .collect();
        SpikeRecord {
            steps: self.steps,
            step_seconds: self.step_seconds,
            nodes: self.observed.len(),
            events,
            observed: (0..self.observed.len()).collect(),
        }
    }
}

/// Runs `steps` synchronous updates with the default step duration.
pub fn simulate<R: Rng + ?Sized>(
    params: &ModelParams,
    connectivity: &Connectivity,
    steps: u32,
    rng: &mut R,
) -> Result<SpikeRecord> {
    simulate_with(params, connectivity, &SimSettings::new(steps), rng)
}

pub fn simulate_with<R: Rng + ?Sized>(
    params: &ModelParams,
    connectivity: &Connectivity,
    settings: &SimSettings,
    rng: &mut R,
) -> Result<SpikeRecord> {
    params.validate()?;
    let layout = GridLayout::default();
    if connectivity.nodes() != layout.len() {
        return Err(Error::validation(format!(
            "connectivity has {} nodes, the model grid has {}",
            connectivity.nodes(),
            layout.len()
        )));
    }
    if params.density.kind() != connectivity.kind {
        return Err(Error::validation(format!(
            "parameters are for the {} model but connectivity is {}",
            params.density.kind(),
            connectivity.kind
        )));
    }
    if settings.steps == 0 {
        return Err(Error::validation("steps must be >= 1"));
    }
    if !(settings.step_seconds > 0.0) {
        return Err(Error::validation("step duration must be > 0"));
    }

    let n = connectivity.nodes();
    let outgoing = connectivity.outgoing();
    let mut states: Vec<NeuronState> = (0..n)
        .map(|i| NeuronState::at_rest(connectivity.is_inhibitory(i)))
        .collect();
    let mut input = vec![0.0f64; n];
    let mut events = Vec::new();

    for t in 0..settings.warmup_steps + settings.steps {
        input.iter_mut().for_each(|v| *v = 0.0);
        for (pre, state) in states.iter().enumerate() {
            if state.fired {
                let w = state.weight();
                for &post in &outgoing[pre] {
                    input[post] += w;
                }
            }
        }
        let recording = t >= settings.warmup_steps;
        for (i, state) in states.iter_mut().enumerate() {
            let draw: f64 = rng.random();
            *state = state.step(params, input[i], draw);
            if recording && state.fired {
                events.push(SpikeEvent {
                    step: t - settings.warmup_steps,
                    node: i as u32,
                });
            }
        }
    }

    Ok(SpikeRecord {
        steps: settings.steps,
        step_seconds: settings.step_seconds,
        nodes: n,
        events,
        observed: observed_nodes(&layout)?,
    })
}
