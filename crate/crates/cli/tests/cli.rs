use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use roomeq::io::{read_coordinates_csv, read_magnitude_csv, read_wav};
use roomeq::{spectral_deviation, Band, FrequencyGrid, MagnitudeSpectrum};

fn roomeq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roomeq"))
        .args(args)
        .env("ROOMEQ_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = roomeq(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// One room, one repetition, free field.
fn simulate(dir: &Path, extra: &[&str]) {
    let mut args = vec![
        "simulate",
        "--output-dir",
        p(dir),
        "--rooms",
        "0",
        "--reps",
        "1",
        "--external-receivers",
        "4",
    ];
    args.extend_from_slice(extra);
    ok(&args);
}

#[test]
fn free_field_localisation_within_a_centimetre() {
    let tmp = tempfile::tempdir().unwrap();
    let rirs = tmp.path().join("rirs");
    simulate(&rirs, &["--absorption", "1"]);
    assert_eq!(fs::read_dir(&rirs).unwrap().count(), 2 * 5 + 1);
    let coords = tmp.path().join("coords.csv");
    ok(&[
        "locate",
        "--input",
        p(&rirs),
        "--base",
        "2.5",
        "--output",
        p(&coords),
    ]);

    let rows = read_coordinates_csv(&coords).unwrap();
    let truth = fs::read_to_string(rirs.join("positions.csv")).unwrap();
    let truth: Vec<f64> = truth
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(6).unwrap().parse().unwrap())
        .collect();
    assert_eq!(rows.len(), truth.len());
    for (row, z) in rows.iter().zip(&truth) {
        assert!(
            (row.z_from_optimal.unwrap() - z).abs() < 0.01,
            "{row:?} vs {z}"
        );
    }
    assert_eq!(rows[0].receiver, "room0_rep0_r0");
    assert_eq!(rows[0].z_from_optimal, Some(0.0));
    assert!((rows[0].theta_deg.unwrap() - 60.0).abs() < 0.5);
}

#[test]
fn identical_pairs_are_zero_distance_apart() {
    let tmp = tempfile::tempdir().unwrap();
    let rirs = tmp.path().join("rirs");
    simulate(&rirs, &[]);
    let dir = tmp.path().join("pair");
    fs::create_dir(&dir).unwrap();
    for (s, r) in [(1, 0), (2, 0), (1, 1), (2, 1)] {
        fs::copy(
            rirs.join(format!("room0_rep0_s{s}_r0.wav")),
            dir.join(format!("x_s{s}_r{r}.wav")),
        )
        .unwrap();
    }
    let coords = tmp.path().join("c.csv");
    ok(&[
        "locate",
        "--input",
        p(&dir),
        "--base",
        "2.5",
        "--output",
        p(&coords),
    ]);
    let rows = read_coordinates_csv(&coords).unwrap();
    assert_eq!(rows[1].z_from_optimal, Some(0.0));
}

#[test]
fn missing_pair_is_reported_per_row() {
    let tmp = tempfile::tempdir().unwrap();
    let rirs = tmp.path().join("rirs");
    simulate(&rirs, &[]);
    fs::remove_file(rirs.join("room0_rep0_s2_r3.wav")).unwrap();
    let coords = tmp.path().join("c.csv");
    let out = roomeq(&[
        "locate",
        "--input",
        p(&rirs),
        "--base",
        "2.5",
        "--output",
        p(&coords),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("room0_rep0_r3"));
    let rows = read_coordinates_csv(&coords).unwrap();
    assert_eq!(rows.len(), 5);
    assert!(!rows[3].is_located());
    assert!(rows
        .iter()
        .enumerate()
        .all(|(i, r)| i == 3 || r.is_located()));
}

#[test]
fn empty_directory_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let coords = tmp.path().join("c.csv");
    let out = roomeq(&[
        "locate",
        "--input",
        p(tmp.path()),
        "--base",
        "2.5",
        "--output",
        p(&coords),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!coords.exists());
    let out = roomeq(&[
        "locate",
        "--input",
        p(&tmp.path().join("nope")),
        "--base",
        "2.5",
        "--output",
        p(&coords),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn local_prototype_of_one_response_is_its_magnitude() {
    let tmp = tempfile::tempdir().unwrap();
    let rirs = tmp.path().join("rirs");
    simulate(&rirs, &[]);
    let one = tmp.path().join("one");
    fs::create_dir(&one).unwrap();
    fs::copy(rirs.join("room0_rep0_s1_r2.wav"), one.join("mic.wav")).unwrap();
    let out = tmp.path().join("out");
    ok(&[
        "prototype",
        "--input",
        p(&one),
        "--strategy",
        "local",
        "--output-dir",
        p(&out),
    ]);

    let proto = read_magnitude_csv(&out.join("prototype.csv")).unwrap();
    let rir = read_wav(&one.join("mic.wav")).unwrap();
    let direct =
        MagnitudeSpectrum::of_rir(&rir, FrequencyGrid::new(8192, 48_000).unwrap()).unwrap();
    assert_eq!(proto, direct);
    for f in [
        "inverse.csv",
        "inverse_fir.wav",
        "inverse_fir.csv",
        "prototype.svg",
    ] {
        assert!(out.join(f).is_file(), "{f}");
    }
    assert_eq!(read_wav(&out.join("inverse_fir.wav")).unwrap().len(), 4096);
}

#[test]
fn weighted_with_unit_weights_equals_unweighted() {
    let tmp = tempfile::tempdir().unwrap();
    let rirs = tmp.path().join("rirs");
    simulate(&rirs, &[]);
    let coords = tmp.path().join("c.csv");
    let mut text = String::from("receiver,x,y,z_from_optimal,theta_deg\n");
    for r in 0..5 {
        text.push_str(&format!("room0_rep0_r{r},0,1,0,0\n"));
    }
    fs::write(&coords, text).unwrap();

    let (w, u) = (tmp.path().join("w"), tmp.path().join("u"));
    let input = p(&rirs);
    ok(&[
        "prototype",
        "--input",
        input,
        "--strategy",
        "weighted",
        "--coords",
        p(&coords),
        "--output-dir",
        p(&w),
    ]);
    ok(&[
        "prototype",
        "--input",
        input,
        "--strategy",
        "unweighted",
        "--output-dir",
        p(&u),
    ]);
    let a = read_magnitude_csv(&w.join("prototype.csv")).unwrap();
    let b = read_magnitude_csv(&u.join("prototype.csv")).unwrap();
    for (x, y) in a.values().iter().zip(b.values()) {
        assert!((x - y).abs() <= 1e-12 * y.max(1e-300));
    }

    let out = roomeq(&[
        "prototype",
        "--input",
        input,
        "--strategy",
        "weighted",
        "--output-dir",
        p(&w),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn prototype_csv_round_trips_through_evaluate() {
    let tmp = tempfile::tempdir().unwrap();
    let rirs = tmp.path().join("rirs");
    simulate(&rirs, &[]);
    let coords = tmp.path().join("c.csv");
    ok(&[
        "locate",
        "--input",
        p(&rirs),
        "--base",
        "2.5",
        "--output",
        p(&coords),
        "--angle-source",
        "1",
    ]);
    let out = tmp.path().join("out");
    ok(&[
        "prototype",
        "--input",
        p(&rirs),
        "--strategy",
        "weighted",
        "--coords",
        p(&coords),
        "--output-dir",
        p(&out),
    ]);

    let proto_path = out.join("prototype.csv");
    let proto = read_magnitude_csv(&proto_path).unwrap();
    roomeq::io::write_magnitude_csv(&tmp.path().join("again.csv"), &proto).unwrap();
    assert_eq!(
        fs::read(&proto_path).unwrap(),
        fs::read(tmp.path().join("again.csv")).unwrap()
    );

    let report = ok(&["evaluate", "--input", p(&proto_path)]);
    let text = String::from_utf8(report.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("input,band,s_d_db"));
    for (line, band) in lines.zip(Band::ALL) {
        let value: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        let expected = spectral_deviation(&proto, band.spec()).unwrap().s_d;
        assert!((value - expected).abs() < 5e-7, "{line}");
    }

    // Equalising with the prototype's own inverse flattens it.
    let flat = ok(&[
        "evaluate",
        "--input",
        p(&proto_path),
        "--filter",
        p(&out.join("inverse.csv")),
    ]);
    for line in String::from_utf8(flat.stdout).unwrap().lines().skip(1) {
        assert!(line.ends_with(",0.000000"), "{line}");
    }
    let wav = ok(&[
        "evaluate",
        "--input",
        p(&rirs),
        "--filter",
        p(&out.join("inverse.csv")),
    ]);
    assert_eq!(
        String::from_utf8(wav.stdout).unwrap().lines().count(),
        1 + 3 * 10
    );
}

#[test]
fn invert_writes_filter_files() {
    let tmp = tempfile::tempdir().unwrap();
    let rirs = tmp.path().join("rirs");
    simulate(&rirs, &[]);
    let out = tmp.path().join("p");
    ok(&[
        "prototype",
        "--input",
        p(&rirs),
        "--strategy",
        "unweighted",
        "--output-dir",
        p(&out),
    ]);
    let inv = tmp.path().join("inv");
    ok(&[
        "invert",
        "--input",
        p(&out.join("prototype.csv")),
        "--output-dir",
        p(&inv),
        "--taps",
        "1024",
        "--beta",
        "0",
    ]);
    assert_eq!(read_wav(&inv.join("inverse_fir.wav")).unwrap().len(), 1024);
    assert!(inv.join("inverse.svg").is_file());

    let bad = roomeq(&[
        "invert",
        "--input",
        p(&out.join("prototype.csv")),
        "--output-dir",
        p(&inv),
        "--taps",
        "7",
    ]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("/taps"));
}

#[test]
fn config_errors_carry_pointers() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, r#"{"sweep": {"zetas": [-0.1, 0.3]}}"#).unwrap();
    let out = roomeq(&[
        "experiment",
        "--config",
        p(&cfg),
        "--output-dir",
        p(&tmp.path().join("o")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/sweep/zetas/1"));

    let out = roomeq(&["sweep", "--output-dir", p(tmp.path()), "--rooms", "9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/rooms/0"));
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"rooms": [2], "repetitions": 3, "grid_size": 2, "external_receivers": 2, "max_delay": 0.2,
            "sweep": {"deltas": [1.0, 0.01], "zetas": [-0.2]}}"#,
    )
    .unwrap();
    let out = tmp.path().join("o");
    ok(&[
        "sweep",
        "--config",
        p(&cfg),
        "--reps",
        "1",
        "--zetas",
        "-0.1,-0.8",
        "--output-dir",
        p(&out),
    ]);
    let delta = fs::read_to_string(out.join("sweep_delta.csv")).unwrap();
    let zeta = fs::read_to_string(out.join("sweep_zeta.csv")).unwrap();
    assert_eq!(delta.lines().count(), 3);
    assert!(zeta.contains("\n0.01,-0.1,") && zeta.contains("\n0.01,-0.8,"));
    assert!(out.join("sweep_delta.svg").is_file());
}

#[test]
fn experiment_writes_all_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let args = [
        "experiment",
        "--rooms",
        "1",
        "--reps",
        "2",
        "--grid-size",
        "2",
        "--max-delay",
        "0.2",
        "--deltas",
        "0.1",
        "--zetas",
        "-0.4",
        "--output-dir",
        p(&out),
    ];
    let run = ok(&args);
    assert!(String::from_utf8_lossy(&run.stdout).contains("weighted vs unweighted"));
    for f in [
        "table1.csv",
        "ttest.csv",
        "sweep_delta.csv",
        "sweep_zeta.csv",
        "table1.svg",
        "sweep_zeta.svg",
    ] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let table = fs::read_to_string(out.join("table1.csv")).unwrap();
    assert_eq!(table.lines().count(), 1 + 24);
    assert!(table.lines().skip(1).all(|l| l.ends_with(",4")));
}
