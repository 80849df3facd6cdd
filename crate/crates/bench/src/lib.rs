//! Fixtures shared by the pipeline benchmarks.

use roomeq::{
    generate_scenario, simulate_rir, ExperimentConfig, FrequencyGrid, MagnitudeSpectrum, Rir,
};

/// Default campaign trimmed to one room and one repetition.
pub fn small_config() -> ExperimentConfig {
    ExperimentConfig {
        rooms: vec![0],
        repetitions: 1,
        grid_size: 3,
        ..ExperimentConfig::default()
    }
}

/// Simulated responses of source 1 at the optimal and external receivers
/// of the first room.
pub fn room_rirs(config: &ExperimentConfig) -> Vec<Rir> {
    let s = generate_scenario(config.rooms[0], config.seed, config).expect("valid scenario");
    std::iter::once(s.optimal)
        .chain(s.external.iter().copied())
        .map(|p| {
            simulate_rir(&s.room, &s.sources[0], p, &config.shm()).expect("receiver inside room")
        })
        .collect()
}

pub fn spectra(rirs: &[Rir], grid: FrequencyGrid) -> Vec<MagnitudeSpectrum> {
    rirs.iter()
        .map(|r| MagnitudeSpectrum::of_rir(r, grid).expect("matching sample rate"))
        .collect()
}
