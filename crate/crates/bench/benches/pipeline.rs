use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use roomeq::{
    combined_weights, generate_scenario, invert, simulate_rir, spectral_deviation, triangulate,
    weighted_prototype, Band, MagnitudeSpectrum, RegMode, SourcePair,
};
use roomeq_bench::{room_rirs, small_config, spectra};

fn geometry(c: &mut Criterion) {
    c.bench_function("triangulate", |b| {
        b.iter(|| triangulate(black_box(2.3), black_box(2.9), black_box(2.5)))
    });
    let config = small_config();
    let rirs = room_rirs(&config);
    let pair = SourcePair::new(2.5).unwrap();
    c.bench_function("locate_rirs", |b| {
        b.iter(|| pair.locate_rirs(black_box(&rirs[0]), black_box(&rirs[1]), 343.0))
    });
}

fn dsp(c: &mut Criterion) {
    let config = small_config();
    let grid = config.grid();
    let rirs = room_rirs(&config);
    let spectra = spectra(&rirs, grid);
    let receivers: Vec<(f64, f64)> = (0..spectra.len())
        .map(|i| (0.3 * i as f64, 1.0 + 0.05 * i as f64))
        .collect();

    c.bench_function("magnitude_spectrum", |b| {
        b.iter(|| MagnitudeSpectrum::of_rir(black_box(&rirs[0]), grid))
    });
    c.bench_function("combined_weights", |b| {
        b.iter(|| {
            combined_weights(
                black_box(&receivers),
                grid,
                &config.weighting(),
                &config.shm(),
            )
        })
    });
    let weights = combined_weights(&receivers, grid, &config.weighting(), &config.shm()).unwrap();
    c.bench_function("weighted_prototype", |b| {
        b.iter(|| weighted_prototype(black_box(&spectra), black_box(&weights)))
    });
    let proto = weighted_prototype(&spectra, &weights).unwrap().magnitude;
    c.bench_function("invert_and_fir", |b| {
        b.iter(|| invert(black_box(&proto), 0.01, RegMode::Verbatim).and_then(|f| f.to_fir(4096)))
    });
    c.bench_function("spectral_deviation", |b| {
        b.iter(|| spectral_deviation(black_box(&spectra[0]), Band::Total.spec()))
    });
}

fn simulation(c: &mut Criterion) {
    let config = small_config();
    let s = generate_scenario(0, 1, &config).unwrap();
    let mut group = c.benchmark_group("simulation");
    group.sample_size(10);
    group.bench_function("simulate_rir", |b| {
        b.iter(|| simulate_rir(&s.room, &s.sources[0], black_box(s.optimal), &config.shm()))
    });
    group.finish();
}

criterion_group!(benches, geometry, dsp, simulation);
criterion_main!(benches);
