//! Spike-count binning and the sorted-bin fitness.
//!
//! The objective compares the two count distributions rather than their time
//! courses: both sequences of per-bin totals are sorted ascending and the
//! mean absolute difference of matched ranks is normalized by the mean
//! experimental count,
//!
//! ```text
//! f = sum_i |S_exp,i - S_sim,i| / (mu_exp * N_bin)
//! ```
//!
//! `f` is minimized; the reported score is `1 - f`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One spike at a time in seconds on a recording channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spike {
    pub time_s: f64,
    pub channel: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinnedCounts {
    pub bin_seconds: f64,
    pub counts: Vec<u64>,
}

impl BinnedCounts {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn mean(&self) -> f64 {
        if self.counts.is_empty() {
            0.0
        } else {
            self.total() as f64 / self.counts.len() as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessValue {
    /// Minimized objective, `>= 0`.
    pub objective: f64,
    /// `1 - objective`, higher is better.
    pub score: f64,
}

impl FitnessValue {
    pub fn from_objective(objective: f64) -> Self {
        FitnessValue {
            objective,
            score: 1.0 - objective,
        }
    }

    /// Placeholder for individuals whose fitness cannot be computed; ranks
    /// behind every defined value.
    pub fn undefined() -> Self {
        FitnessValue {
            objective: f64::INFINITY,
            score: f64::NEG_INFINITY,
        }
    }

    pub fn is_defined(&self) -> bool {
        self.objective.is_finite()
    }
}

fn bin_count(window_seconds: f64, bin_seconds: f64) -> Result<usize> {
    if !(window_seconds > 0.0) || !(bin_seconds > 0.0) {
        return Err(Error::validation(format!(
            "window ({window_seconds} s) and bin width ({bin_seconds} s) must be > 0"
        )));
    }
    let ratio = window_seconds / bin_seconds;
    let n = ratio.round();
    if (ratio - n).abs() > 1e-9 * ratio.max(1.0) || n < 1.0 {
        return Err(Error::validation(format!(
            "window of {window_seconds} s is not a whole number of {bin_seconds} s bins"
        )));
    }
    Ok(n as usize)
}

/// Aggregates spikes of all channels into consecutive bins covering
/// `[0, window_seconds)`. Spikes outside the window are not counted.
pub fn bin_counts(events: &[Spike], window_seconds: f64, bin_seconds: f64) -> Result<BinnedCounts> {
    let n = bin_count(window_seconds, bin_seconds)?;
    let mut counts = vec![0u64; n];
    for spike in events {
        if spike.time_s >= 0.0 && spike.time_s < window_seconds {
            let idx = ((spike.time_s / bin_seconds).floor() as usize).min(n - 1);
            counts[idx] += 1;
        }
    }
    Ok(BinnedCounts {
        bin_seconds,
        counts,
    })
}

/// Array-wide spike detection rate: total spikes per second.
pub fn asdr(events: &[Spike], window_seconds: f64) -> Result<Vec<u64>> {
    Ok(bin_counts(events, window_seconds, 1.0)?.counts)
}

/// Sorted-bin objective between experimental and simulated counts.
pub fn fitness_eq4(exp: &BinnedCounts, sim: &BinnedCounts) -> Result<FitnessValue> {
    if exp.len() != sim.len() {
        return Err(Error::validation(format!(
            "bin counts differ: experimental {} vs simulated {}",
            exp.len(),
            sim.len()
        )));
    }
    if exp.is_empty() {
        return Err(Error::validation("at least one bin is required"));
    }
    let exp_total = exp.total();
    if exp_total == 0 {
        return Err(Error::UndefinedFitness);
    }
    let mut a = exp.counts.clone();
    let mut b = sim.counts.clone();
    a.sort_unstable();
    b.sort_unstable();
    let diff: u64 = a.iter().zip(&b).map(|(x, y)| x.abs_diff(*y)).sum();
    // mu_exp * N_bin is the experimental total
    Ok(FitnessValue::from_objective(diff as f64 / exp_total as f64))
}

/// Per-channel mean firing rate in spikes per second.
pub fn mean_rates(events: &[Spike], channels: usize, window_seconds: f64) -> Result<Vec<f64>> {
    if !(window_seconds > 0.0) {
        return Err(Error::validation("window must be > 0"));
    }
    let mut counts = vec![0u64; channels];
    for spike in events {
        if spike.time_s >= 0.0 && spike.time_s < window_seconds {
            let slot = counts.get_mut(spike.channel).ok_or_else(|| {
                Error::validation(format!(
                    "channel {} outside 0..{channels}",
                    spike.channel
                ))
            })?;
            *slot += 1;
        }
    }
    Ok(counts
        .into_iter()
        .map(|c| c as f64 / window_seconds)
        .collect())
}

/// Spatial variant of the objective: sorted per-channel mean rates compared
/// rank by rank, normalized by the mean experimental rate.
pub fn spatial_fitness(exp_rates: &[f64], sim_rates: &[f64]) -> Result<f64> {
    if exp_rates.len() != sim_rates.len() || exp_rates.is_empty() {
        return Err(Error::validation(format!(
            "rate vectors must be non-empty and equal length, got {} and {}",
            exp_rates.len(),
            sim_rates.len()
        )));
    }
    let n = exp_rates.len() as f64;
    let mean = exp_rates.iter().sum::<f64>() / n;
    if !(mean > 0.0) {
        return Err(Error::UndefinedFitness);
    }
    let mut a = exp_rates.to_vec();
    let mut b = sim_rates.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let mad = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum::<f64>() / n;
    Ok(mad / mean)
}
