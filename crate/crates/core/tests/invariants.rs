use proptest::prelude::*;
use roomeq::{
    estimate_toa, invert, pooled_t_test, simulate_rir, spectral_deviation, Band, FrequencyGrid,
    MagnitudeSpectrum, Point3, RegMode, Rir, RoomSpec, ShmParams, Source,
};

fn grid() -> FrequencyGrid {
    FrequencyGrid::new(256, 8_000).unwrap()
}

fn spectrum() -> impl Strategy<Value = MagnitudeSpectrum> {
    proptest::collection::vec(1e-3..10.0f64, 129)
        .prop_map(|v| MagnitudeSpectrum::new(v, grid()).unwrap())
}

fn sample() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-5.0..5.0f64, 2..20)
}

#[test]
fn bands_share_the_split_edge() {
    let g = FrequencyGrid::new(8192, 48_000).unwrap();
    let (low_l, low_h) = Band::Low.spec().bins(g);
    let (high_l, high_h) = Band::High.spec().bins(g);
    let (total_l, total_h) = Band::Total.spec().bins(g);
    assert_eq!(low_h, high_l);
    assert_eq!((total_l, total_h), (low_l, high_h));
}

proptest! {
    #[test]
    fn deviation_is_non_negative_and_gain_invariant(m in spectrum(), gain in 1e-3..1e3f64) {
        let band = roomeq::BandSpec::new(Band::Total, 100.0, 3_000.0);
        let a = spectral_deviation(&m, band).unwrap().s_d;
        let scaled = MagnitudeSpectrum::new(m.values().iter().map(|v| v * gain).collect(), grid()).unwrap();
        let b = spectral_deviation(&scaled, band).unwrap().s_d;
        prop_assert!(a >= 0.0);
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn t_test_is_antisymmetric(a in sample(), b in sample()) {
        let ab = pooled_t_test(&a, &b).unwrap();
        let ba = pooled_t_test(&b, &a).unwrap();
        prop_assert!((ab.t + ba.t).abs() < 1e-9 * (1.0 + ab.t.abs()));
        prop_assert!((ab.p - ba.p).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&ab.p));
    }

    #[test]
    fn regularisation_scales_gains(m in spectrum(), beta in 0.0..1.0f64) {
        let plain = invert(&m, 0.0, RegMode::Verbatim).unwrap();
        let reg = invert(&m, beta, RegMode::Verbatim).unwrap();
        for (p, r) in plain.gains.values().iter().zip(reg.gains.values()) {
            prop_assert!((r - p / (1.0 + beta)).abs() <= 1e-12 * p);
        }
    }

    #[test]
    fn equalisation_is_linear(m in spectrum(), y in spectrum(), k in 1e-3..1e3f64) {
        let f = invert(&m, 0.01, RegMode::Verbatim).unwrap();
        let a = f.apply_spectrum(&y).unwrap();
        let ky = MagnitudeSpectrum::new(y.values().iter().map(|v| v * k).collect(), grid()).unwrap();
        let b = f.apply_spectrum(&ky).unwrap();
        for (u, v) in a.values().iter().zip(b.values()) {
            prop_assert!((v - k * u).abs() <= 1e-12 * v.abs().max(1e-300));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn simulated_direct_sound_arrives_on_time(
        x in 0.3..4.7f64, y in 0.3..6.7f64, sx in 0.3..4.7f64, sy in 0.3..6.7f64
    ) {
        let mut room = RoomSpec::new(5.0, 7.0, 3.0);
        room.max_reflection_order = 2;
        room.max_delay = 0.1;
        let src = Source::aimed_at(Point3::new(sx, sy, 1.2), Point3::new(2.5, 3.5, 1.2));
        let rx = Point3::new(x, y, 1.5);
        let rir: Rir = simulate_rir(&room, &src, rx, &ShmParams::default()).unwrap();
        let expected = (rx.distance(src.position) * 48_000.0 / 343.0).round() as i64;
        let toa = estimate_toa(&rir, 343.0).unwrap().sample_index as i64;
        prop_assert!((toa - expected).abs() <= 1, "{toa} vs {expected}");
    }
}
