//! Per-receiver, per-frequency prototype weights.
//!
//! Each receiver gets `W(ω) = (z + δ)^ζ · D(ω, θ)`, where `z` is its
//! estimated distance from the optimal listening position and `D` the
//! on-axis-normalised directivity at angle `θ`. The whole set is then scaled
//! so its single largest entry is exactly one.

use serde::{Deserialize, Serialize};

use crate::directivity::{normalized_directivity, ShmParams};
use crate::error::{Error, Result};
use crate::signal::FrequencyGrid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeightingParams {
    /// Distance offset δ; keeps the optimal position's weight finite.
    pub delta: f64,
    /// Decay exponent ζ in `[-1, 0]`.
    pub zeta: f64,
}

impl Default for WeightingParams {
    fn default() -> Self {
        Self {
            delta: 0.01,
            zeta: -0.4,
        }
    }
}

impl WeightingParams {
    pub fn new(delta: f64, zeta: f64) -> Result<Self> {
        let p = Self { delta, zeta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(Error::param(
                "delta",
                format!("{} must be positive", self.delta),
            ));
        }
        if !(-1.0..=0.0).contains(&self.zeta) {
            return Err(Error::param(
                "zeta",
                format!("{} must lie in [-1, 0]", self.zeta),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightProfile {
    pub values: Vec<f64>,
    pub z: f64,
    pub theta: f64,
}

pub fn distance_weight(z: f64, params: &WeightingParams) -> f64 {
    (z + params.delta).powf(params.zeta)
}

pub fn frequency_weight(theta: f64, grid: FrequencyGrid, shm: &ShmParams) -> Vec<f64> {
    normalized_directivity(theta, grid, shm).into_values()
}

/// Weights for a set of receivers given as `(z, θ)` pairs, normalised
/// jointly to a global maximum of one.
pub fn combined_weights(
    receivers: &[(f64, f64)],
    grid: FrequencyGrid,
    params: &WeightingParams,
    shm: &ShmParams,
) -> Result<Vec<WeightProfile>> {
    if receivers.is_empty() {
        return Err(Error::Empty("no receivers to weight"));
    }
    params.validate()?;
    if let Some(&(z, _)) = receivers.iter().find(|(z, _)| !(*z >= 0.0)) {
        return Err(Error::param(
            "z",
            format!("distance {z} must be non-negative"),
        ));
    }

    let mut profiles: Vec<WeightProfile> = receivers
        .iter()
        .map(|&(z, theta)| {
            let wd = distance_weight(z, params);
            let values = frequency_weight(theta, grid, shm)
                .into_iter()
                .map(|wf| wd * wf)
                .collect();
            WeightProfile { values, z, theta }
        })
        .collect();

    let max = profiles
        .iter()
        .flat_map(|p| p.values.iter().copied())
        .fold(0.0_f64, f64::max);
    if !(max > 0.0) || !max.is_finite() {
        return Err(Error::param(
            "weights",
            format!("global maximum {max} cannot be normalised"),
        ));
    }
    for p in &mut profiles {
        for v in &mut p.values {
            *v /= max;
        }
    }
    Ok(profiles)
}
