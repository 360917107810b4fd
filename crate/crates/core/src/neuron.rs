//! Simplified leaky integrate-and-fire neuron.
//!
//! The membrane follows `dV/dt = -c_L * V + c_I * sum_j x_j * w_ij` with the
//! membrane time constant fixed to 1 and the resting potential fixed to 0,
//! integrated with a forward Euler step of one simulation step:
//!
//! ```text
//! V <- V + (-c_L * V + c_I * input)
//! ```
//!
//! `input` is the signed count of presynaptic spikes from the previous step
//! (+1 per excitatory spike, -1 per inhibitory spike). A neuron fires when
//! `V >= threshold` or when its spontaneous draw succeeds; either way the
//! potential resets to exactly 0 and the neuron is locked out for
//! `refractory_steps` steps, during which input is ignored and `V` is held at 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::ModelKind;

/// Connection density, interpreted per model kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Density {
    /// Moore-neighborhood radius of the cellular automaton.
    Radius(u32),
    /// Length scale of the Gaussian connection-probability decay.
    Length(f64),
}

impl Density {
    pub fn kind(&self) -> ModelKind {
        match self {
            Density::Radius(_) => ModelKind::Ca,
            Density::Length(_) => ModelKind::Network,
        }
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            Density::Radius(r) => r as f64,
            Density::Length(c) => c,
        }
    }
}

/// Decoded physical parameters of a homogeneous neuron population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Per-step leak fraction `c_L`.
    pub leak: f64,
    /// Per-input gain `c_I`.
    pub integration: f64,
    pub refractory_steps: u32,
    pub threshold: f64,
    /// Spontaneous firing probability per neuron per step.
    pub spont_prob: f64,
    /// Fraction of inhibitory neurons.
    pub inhib_ratio: f64,
    pub density: Density,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.leak,
            self.integration,
            self.threshold,
            self.spont_prob,
            self.inhib_ratio,
            self.density.as_f64(),
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("model parameters must be finite"));
        }
        if self.threshold <= 0.0 {
            return Err(Error::validation(format!(
                "threshold must be > 0, got {}",
                self.threshold
            )));
        }
        if !(0.0..=1.0).contains(&self.spont_prob) {
            return Err(Error::validation(format!(
                "spontaneous probability must lie in [0, 1], got {}",
                self.spont_prob
            )));
        }
        if !(0.0..=1.0).contains(&self.inhib_ratio) {
            return Err(Error::validation(format!(
                "inhibitory ratio must lie in [0, 1], got {}",
                self.inhib_ratio
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NeuronState {
    pub potential: f64,
    pub refractory_remaining: u32,
    pub fired: bool,
    pub is_inhibitory: bool,
}

impl NeuronState {
    pub fn at_rest(is_inhibitory: bool) -> Self {
        NeuronState {
            is_inhibitory,
            ..Default::default()
        }
    }

    /// Sign of this neuron's outgoing influence.
    pub fn weight(&self) -> f64 {
        if self.is_inhibitory {
            -1.0
        } else {
            1.0
        }
    }

    /// Leaky integration of one step of input.
    ///
    /// A refractory neuron holds its potential at 0 and ignores input; the
    /// lockout counter is advanced by [`NeuronState::threshold_fire`].
    pub fn membrane_step(self, params: &ModelParams, weighted_input: f64) -> Self {
        if self.refractory_remaining > 0 {
            return NeuronState {
                potential: 0.0,
                fired: false,
                ..self
            };
        }
        let potential =
            self.potential + (-params.leak * self.potential + params.integration * weighted_input);
        NeuronState { potential, ..self }
    }

    /// Resolves whether the neuron spikes this step.
    ///
    /// `uniform_draw` is a sample from `[0, 1)` and triggers a spontaneous
    /// spike when it falls below `spont_prob`.
    pub fn threshold_fire(self, params: &ModelParams, uniform_draw: f64) -> Self {
        if self.refractory_remaining > 0 {
            return NeuronState {
                refractory_remaining: self.refractory_remaining - 1,
                fired: false,
                ..self
            };
        }
        if self.potential >= params.threshold || uniform_draw < params.spont_prob {
            NeuronState {
                potential: 0.0,
                refractory_remaining: params.refractory_steps,
                fired: true,
                ..self
            }
        } else {
            NeuronState {
                fired: false,
                ..self
            }
        }
    }

    /// One full step: integrate, then resolve firing.
    pub fn step(self, params: &ModelParams, weighted_input: f64, uniform_draw: f64) -> Self {
        self.membrane_step(params, weighted_input)
            .threshold_fire(params, uniform_draw)
    }
}
