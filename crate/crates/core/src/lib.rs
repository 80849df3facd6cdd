//! Room-equalisation prototyping.
//!
//! Receivers are located from the arrival times of two loudspeakers, their
//! magnitude responses are averaged with distance and directivity weights,
//! and the resulting prototype is inverted into an equalisation filter.
//! A shoebox image-source simulator drives the evaluation campaign.
//!
//! ```
//! use roomeq::{invert, local_prototype, spectral_deviation, Band, FrequencyGrid, MagnitudeSpectrum, RegMode};
//!
//! let grid = FrequencyGrid::new(8192, 48_000)?;
//! let values = (0..grid.bins()).map(|k| 1.0 + 0.5 * (k as f64 * 0.01).sin()).collect();
//! let response = MagnitudeSpectrum::new(values, grid)?;
//! let filter = invert(&local_prototype(&response).magnitude, 0.0, RegMode::Verbatim)?;
//! let equalized = filter.apply_spectrum(&response)?;
//! assert!(spectral_deviation(&equalized, Band::Total.spec())?.s_d < 1e-9);
//! # Ok::<(), roomeq::Error>(())
//! ```

// Negated comparisons double as NaN rejection.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod directivity;
pub mod equalizer;
pub mod error;
pub mod geometry;
pub mod io;
pub mod metrics;
pub mod prototype;
pub mod signal;
pub mod simulator;
pub mod weighting;

pub use config::{Absorption, ExperimentConfig, ThetaReference};
pub use directivity::{normalized_directivity, shm_magnitude, ShmParams, ShmSection};
pub use equalizer::{invert, FirTaps, InverseFilter, RegMode};
pub use error::{Error, Result};
pub use geometry::{
    estimate_toa, receiver_angle, receiver_distance, triangulate, Point2, ReceiverEstimate,
    SourceId, SourcePair, ToaEstimate, DEFAULT_SPEED_OF_SOUND,
};
pub use metrics::{
    mean_ci95, pooled_t_test, spectral_deviation, Band, BandSpec, PositionClass, StatSummary, TTest,
};
pub use prototype::{
    local_prototype, unweighted_prototype, weighted_prototype, PrototypeResponse, Strategy,
};
pub use signal::{FrequencyGrid, MagnitudeSpectrum, Rir};
pub use simulator::{
    generate_scenario, parameter_sweep, run_experiment, simulate_rir, Campaign, EqStrategy,
    EvalReport, Point3, RoomSpec, ScenarioSpec, Source, SweepReport,
};
pub use weighting::{combined_weights, WeightProfile, WeightingParams};
