//! File formats: mono WAV impulse responses and CSV spectra, filters and
//! coordinates.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use hound::{SampleFormat, WavSpec, WavWriter};
use serde::{Deserialize, Serialize};

use crate::equalizer::FirTaps;
use crate::error::{Error, Result};
use crate::signal::{FrequencyGrid, MagnitudeSpectrum, Rir};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_owned(),
        source,
    }
}

fn wav_err(path: &Path) -> impl FnOnce(hound::Error) -> Error + '_ {
    move |source| match source {
        hound::Error::IoError(source) => Error::Io {
            path: path.to_owned(),
            source,
        },
        source => Error::Wav {
            path: path.to_owned(),
            source,
        },
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_owned(),
        source,
    }
}

fn format_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_owned(),
        message: message.into(),
    }
}

/// `room{i}_rep{j}_s{k}_r{n}.wav`
pub fn rir_filename(room: usize, repetition: usize, source: u8, receiver: usize) -> String {
    format!("room{room}_rep{repetition}_s{source}_r{receiver}.wav")
}

/// Reads a mono WAV file. Integer PCM is scaled to `[-1, 1)`.
pub fn read_wav(path: &Path) -> Result<Rir> {
    let reader = hound::WavReader::open(path).map_err(wav_err(path))?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(format_err(
            path,
            format!("expected mono, found {} channels", spec.channels),
        ));
    }
    let samples: Vec<f64> = match spec.sample_format {
        SampleFormat::Float => reader
            .into_samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(wav_err(path))?,
        SampleFormat::Int => {
            let scale = 2f64.powi(i32::from(spec.bits_per_sample) - 1);
            reader
                .into_samples::<i32>()
                .map(|s| s.map(|v| f64::from(v) / scale))
                .collect::<std::result::Result<_, _>>()
                .map_err(wav_err(path))?
        }
    };
    Rir::new(samples, spec.sample_rate).map_err(|e| format_err(path, e.to_string()))
}

/// Writes 32-bit float mono samples.
pub fn write_wav(path: &Path, samples: &[f64], sample_rate: u32) -> Result<()> {
    let spec = WavSpec {
        channels: 1,
        sample_rate,
        bits_per_sample: 32,
        sample_format: SampleFormat::Float,
    };
    let mut w = WavWriter::create(path, spec).map_err(wav_err(path))?;
    for &s in samples {
        w.write_sample(s as f32).map_err(wav_err(path))?;
    }
    w.finalize().map_err(wav_err(path))
}

pub fn write_rir(path: &Path, rir: &Rir) -> Result<()> {
    write_wav(path, rir.samples(), rir.sample_rate())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(io_err(path))
}

/// `freq_hz,magnitude`, with shortest round-trip float formatting.
pub fn magnitude_csv(spectrum: &MagnitudeSpectrum) -> String {
    let mut s = String::from("freq_hz,magnitude\n");
    for (f, m) in spectrum.grid().frequencies().zip(spectrum.values()) {
        s.push_str(&format!("{f},{m}\n"));
    }
    s
}

pub fn write_magnitude_csv(path: &Path, spectrum: &MagnitudeSpectrum) -> Result<()> {
    write_text(path, &magnitude_csv(spectrum))
}

#[derive(Debug, Deserialize)]
struct MagnitudeRow {
    freq_hz: f64,
    magnitude: f64,
}

/// Reads a `freq_hz,magnitude` file. The frequency grid is recovered from
/// the bin count and the last frequency, which must be Nyquist.
pub fn read_magnitude_csv(path: &Path) -> Result<MagnitudeSpectrum> {
    let mut reader = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let rows: Vec<MagnitudeRow> = reader
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(csv_err(path))?;
    if rows.len() < 3 {
        return Err(format_err(
            path,
            format!("{} rows, at least 3 are required", rows.len()),
        ));
    }
    let nyquist = rows[rows.len() - 1].freq_hz;
    let sample_rate = (2.0 * nyquist).round();
    if !(sample_rate >= 1.0 && sample_rate <= f64::from(u32::MAX)) {
        return Err(format_err(
            path,
            format!("last frequency {nyquist} Hz is not a valid Nyquist frequency"),
        ));
    }
    let grid = FrequencyGrid::new(2 * (rows.len() - 1), sample_rate as u32)
        .map_err(|e| format_err(path, e.to_string()))?;
    for (k, r) in rows.iter().enumerate() {
        let expected = grid.frequency(k);
        if (r.freq_hz - expected).abs() > 1e-6 * grid.resolution().max(1.0) {
            return Err(format_err(
                path,
                format!(
                    "row {}: frequency {} Hz is off the {grid} (expected {expected})",
                    k + 1,
                    r.freq_hz
                ),
            ));
        }
    }
    MagnitudeSpectrum::new(rows.into_iter().map(|r| r.magnitude).collect(), grid)
        .map_err(|e| format_err(path, e.to_string()))
}

pub fn write_fir_csv(path: &Path, fir: &FirTaps) -> Result<()> {
    let mut w = create(path)?;
    let mut text = String::from("tap_index,value\n");
    for (i, v) in fir.taps.iter().enumerate() {
        text.push_str(&format!("{i},{v}\n"));
    }
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(io_err(path))
}

/// One line of a coordinates file. Rows whose receiver could not be
/// located carry no values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinateRow {
    pub receiver: String,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub z_from_optimal: Option<f64>,
    pub theta_deg: Option<f64>,
}

impl CoordinateRow {
    pub fn is_located(&self) -> bool {
        self.x.is_some()
            && self.y.is_some()
            && self.z_from_optimal.is_some()
            && self.theta_deg.is_some()
    }
}

pub fn write_coordinates_csv(path: &Path, rows: &[CoordinateRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    for r in rows {
        w.serialize(r).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_coordinates_csv(path: &Path) -> Result<Vec<CoordinateRow>> {
    let mut reader = csv::Reader::from_path(path).map_err(csv_err(path))?;
    reader
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(csv_err(path))
}

/// WAV files directly inside `dir`, sorted by name.
pub fn list_wavs(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if path.is_file()
            && path
                .extension()
                .is_some_and(|e| e.eq_ignore_ascii_case("wav"))
        {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wav_round_trip_is_f32_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(rir_filename(0, 1, 2, 3));
        assert!(path.ends_with("room0_rep1_s2_r3.wav"));
        let samples = vec![0.0, 0.5, -0.25, 1e-3, 0.1];
        write_wav(&path, &samples, 48_000).unwrap();
        let rir = read_wav(&path).unwrap();
        assert_eq!(rir.sample_rate(), 48_000);
        for (a, b) in rir.samples().iter().zip(&samples) {
            assert_eq!(*a, f64::from(*b as f32));
        }
    }

    #[test]
    fn stereo_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("st.wav");
        let spec = WavSpec {
            channels: 2,
            sample_rate: 8000,
            bits_per_sample: 16,
            sample_format: SampleFormat::Int,
        };
        let mut w = WavWriter::create(&path, spec).unwrap();
        w.write_sample(1000i16).unwrap();
        w.write_sample(1000i16).unwrap();
        w.finalize().unwrap();
        assert!(matches!(read_wav(&path), Err(Error::Format { .. })));
    }

    #[test]
    fn magnitude_csv_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let grid = FrequencyGrid::new(64, 44_100).unwrap();
        let values: Vec<f64> = (0..grid.bins()).map(|k| 1.0 / (k as f64 + 3.0)).collect();
        let m = MagnitudeSpectrum::new(values, grid).unwrap();
        write_magnitude_csv(&path, &m).unwrap();
        assert_eq!(read_magnitude_csv(&path).unwrap(), m);
    }

    #[test]
    fn coordinates_keep_unlocated_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        let rows = vec![
            CoordinateRow {
                receiver: "r0".into(),
                x: Some(1.0),
                y: Some(2.0),
                z_from_optimal: Some(0.0),
                theta_deg: Some(60.0),
            },
            CoordinateRow {
                receiver: "r1".into(),
                x: None,
                y: None,
                z_from_optimal: None,
                theta_deg: None,
            },
        ];
        write_coordinates_csv(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("receiver,x,y,z_from_optimal,theta_deg\n"));
        assert_eq!(read_coordinates_csv(&path).unwrap(), rows);
    }
}
