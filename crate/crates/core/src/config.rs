//! JSON configuration for simulation campaigns.
//!
//! Every key is optional and defaults to the reference campaign: four rooms,
//! five repetitions, six external receivers and a 10 × 10 evaluation grid.
//!
//! ```json
//! {
//!   "rooms": [0, 1, 2, 3],
//!   "repetitions": 5,
//!   "external_receivers": 6,
//!   "grid_size": 10,
//!   "seed": 1,
//!   "sample_rate": 48000,
//!   "speed_of_sound": 343.0,
//!   "fft_size": 8192,
//!   "absorption": 0.3,
//!   "max_reflection_order": 30,
//!   "max_delay": 1.0,
//!   "delta": 0.01,
//!   "zeta": -0.4,
//!   "beta": 0.01,
//!   "reg_mode": "verbatim",
//!   "taps": 4096,
//!   "theta_reference": "vertex",
//!   "shm": { "sphere_radius": 0.0875, "alpha_min": 0.0 },
//!   "sweep": {
//!     "deltas": [1.0, 0.1, 0.01, 0.001, 0.0001],
//!     "zetas": [-0.1, -0.2, -0.4, -0.6, -0.8]
//!   }
//! }
//! ```
//!
//! `absorption` is either one coefficient for every surface or six,
//! ordered `[x = 0, x = W, y = 0, y = L, z = 0, z = H]`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::directivity::ShmParams;
use crate::equalizer::RegMode;
use crate::error::{Error, Result};
use crate::signal::FrequencyGrid;
use crate::simulator::scenario::ROOM_DIMENSIONS;
use crate::weighting::WeightingParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Absorption {
    Uniform(f64),
    PerSurface([f64; 6]),
}

impl Absorption {
    pub fn coefficients(&self) -> [f64; 6] {
        match *self {
            Absorption::Uniform(a) => [a; 6],
            Absorption::PerSurface(a) => a,
        }
    }
}

/// Angle fed to the directivity weighting of each receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaReference {
    /// Angle at the source vertex between the baseline and the receiver.
    #[default]
    Vertex,
    /// Angle between the source's aim (towards the optimal receiver) and
    /// the receiver.
    Aim,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShmConfig {
    pub sphere_radius: f64,
    pub alpha_min: f64,
}

impl Default for ShmConfig {
    fn default() -> Self {
        let p = ShmParams::default();
        Self {
            sphere_radius: p.sphere_radius,
            alpha_min: p.alpha_min,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub deltas: Vec<f64>,
    pub zetas: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            deltas: vec![1.0, 0.1, 0.01, 0.001, 0.0001],
            zetas: vec![-0.1, -0.2, -0.4, -0.6, -0.8],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub rooms: Vec<usize>,
    pub repetitions: usize,
    pub external_receivers: usize,
    pub grid_size: usize,
    pub seed: u64,
    pub sample_rate: u32,
    pub speed_of_sound: f64,
    pub fft_size: usize,
    pub absorption: Absorption,
    pub max_reflection_order: u32,
    pub max_delay: f64,
    pub delta: f64,
    pub zeta: f64,
    pub beta: f64,
    pub reg_mode: RegMode,
    pub taps: usize,
    pub theta_reference: ThetaReference,
    pub shm: ShmConfig,
    pub sweep: SweepConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let w = WeightingParams::default();
        Self {
            rooms: (0..ROOM_DIMENSIONS.len()).collect(),
            repetitions: 5,
            external_receivers: 6,
            grid_size: 10,
            seed: 1,
            sample_rate: 48_000,
            speed_of_sound: crate::geometry::DEFAULT_SPEED_OF_SOUND,
            fft_size: 8192,
            absorption: Absorption::Uniform(0.3),
            max_reflection_order: 30,
            max_delay: 1.0,
            delta: w.delta,
            zeta: w.zeta,
            beta: 0.01,
            reg_mode: RegMode::Verbatim,
            taps: 4096,
            theta_reference: ThetaReference::Vertex,
            shm: ShmConfig::default(),
            sweep: SweepConfig::default(),
        }
    }
}

fn invalid(pointer: &str, message: impl Into<String>) -> Error {
    Error::Config {
        pointer: pointer.to_owned(),
        message: message.into(),
    }
}

fn pointer_from(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

impl ExperimentConfig {
    /// Parses and validates a JSON document. Errors carry the JSON pointer
    /// of the offending value.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let pointer = pointer_from(e.path());
            invalid(
                if pointer.is_empty() { "/" } else { &pointer },
                e.inner().to_string(),
            )
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        if self.rooms.is_empty() {
            return Err(invalid("/rooms", "at least one room is required"));
        }
        for (i, &r) in self.rooms.iter().enumerate() {
            if r >= ROOM_DIMENSIONS.len() {
                return Err(invalid(
                    &format!("/rooms/{i}"),
                    format!("room index {r} out of range 0..{}", ROOM_DIMENSIONS.len()),
                ));
            }
        }
        if self.repetitions == 0 {
            return Err(invalid("/repetitions", "must be at least 1"));
        }
        if self.external_receivers == 0 {
            return Err(invalid("/external_receivers", "must be at least 1"));
        }
        if self.grid_size == 0 {
            return Err(invalid("/grid_size", "must be at least 1"));
        }
        if self.sample_rate == 0 {
            return Err(invalid("/sample_rate", "must be positive"));
        }
        if !(self.speed_of_sound > 0.0) {
            return Err(invalid("/speed_of_sound", "must be positive"));
        }
        if FrequencyGrid::new(self.fft_size, self.sample_rate).is_err()
            || !self.fft_size.is_power_of_two()
        {
            return Err(invalid("/fft_size", "must be a power of two of at least 4"));
        }
        match self.absorption {
            Absorption::Uniform(a) if !(0.0..=1.0).contains(&a) => {
                return Err(invalid("/absorption", "coefficient must lie in [0, 1]"));
            }
            Absorption::PerSurface(a) => {
                if let Some(i) = a.iter().position(|v| !(0.0..=1.0).contains(v)) {
                    return Err(invalid(
                        &format!("/absorption/{i}"),
                        "coefficient must lie in [0, 1]",
                    ));
                }
            }
            _ => {}
        }
        if !(self.max_delay > 0.0) {
            return Err(invalid("/max_delay", "must be positive"));
        }
        if WeightingParams::new(self.delta, self.zeta).is_err() {
            return Err(if !(self.delta > 0.0) {
                invalid("/delta", "must be positive")
            } else {
                invalid("/zeta", "must lie in [-1, 0]")
            });
        }
        if !(self.beta >= 0.0) {
            return Err(invalid("/beta", "must be non-negative"));
        }
        if self.taps == 0 || !self.taps.is_multiple_of(2) || self.taps > self.fft_size {
            return Err(invalid("/taps", "must be even and no larger than fft_size"));
        }
        if self.shm().validate().is_err() {
            return Err(if !(self.shm.sphere_radius > 0.0) {
                invalid("/shm/sphere_radius", "must be positive")
            } else {
                invalid("/shm/alpha_min", "must lie in [0, 2]")
            });
        }
        for (i, d) in self.sweep.deltas.iter().enumerate() {
            if !(*d > 0.0) {
                return Err(invalid(&format!("/sweep/deltas/{i}"), "must be positive"));
            }
        }
        for (i, z) in self.sweep.zetas.iter().enumerate() {
            if !(-1.0..=0.0).contains(z) {
                return Err(invalid(&format!("/sweep/zetas/{i}"), "must lie in [-1, 0]"));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> FrequencyGrid {
        FrequencyGrid::new(self.fft_size, self.sample_rate).expect("validated fft size")
    }

    pub fn weighting(&self) -> WeightingParams {
        WeightingParams {
            delta: self.delta,
            zeta: self.zeta,
        }
    }

    pub fn shm(&self) -> ShmParams {
        ShmParams {
            sphere_radius: self.shm.sphere_radius,
            speed_of_sound: self.speed_of_sound,
            alpha_min: self.shm.alpha_min,
        }
    }
}
