//! Time- and frequency-domain containers shared by every stage of the
//! pipeline.

use std::cell::RefCell;
use std::fmt;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// A room impulse response.
#[derive(Debug, Clone, PartialEq)]
pub struct Rir {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl Rir {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("impulse response has no samples"));
        }
        if sample_rate == 0 {
            return Err(Error::param("sample_rate", "must be positive"));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::param(
                "samples",
                "impulse response contains non-finite values",
            ));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s * s).sum()
    }
}

/// Uniform single-sided frequency grid `0..=fs/2` of an `fft_size`-point
/// analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FrequencyGrid {
    fft_size: usize,
    sample_rate: u32,
}

impl FrequencyGrid {
    pub fn new(fft_size: usize, sample_rate: u32) -> Result<Self> {
        if fft_size < 4 || !fft_size.is_multiple_of(2) {
            return Err(Error::param(
                "fft_size",
                format!("{fft_size} must be even and at least 4"),
            ));
        }
        if sample_rate == 0 {
            return Err(Error::param("sample_rate", "must be positive"));
        }
        Ok(Self {
            fft_size,
            sample_rate,
        })
    }

    pub fn fft_size(&self) -> usize {
        self.fft_size
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn bins(&self) -> usize {
        self.fft_size / 2 + 1
    }

    pub fn resolution(&self) -> f64 {
        f64::from(self.sample_rate) / self.fft_size as f64
    }

    pub fn frequency(&self, bin: usize) -> f64 {
        bin as f64 * self.resolution()
    }

    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.bins()).map(|k| self.frequency(k))
    }

    /// Nearest bin to `hz`, clamped to the grid.
    pub fn nearest_bin(&self, hz: f64) -> usize {
        let k = (hz / self.resolution()).round();
        if k <= 0.0 {
            0
        } else {
            (k as usize).min(self.bins() - 1)
        }
    }
}

impl fmt::Display for FrequencyGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-point grid at {} Hz", self.fft_size, self.sample_rate)
    }
}

/// Non-negative magnitude response sampled on a [`FrequencyGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct MagnitudeSpectrum {
    values: Vec<f64>,
    grid: FrequencyGrid,
}

impl MagnitudeSpectrum {
    pub fn new(values: Vec<f64>, grid: FrequencyGrid) -> Result<Self> {
        if values.len() != grid.bins() {
            return Err(Error::param(
                "values",
                format!("{} bins given, {grid} has {}", values.len(), grid.bins()),
            ));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::param(
                "values",
                format!("magnitude {v} is not finite and non-negative"),
            ));
        }
        Ok(Self { values, grid })
    }

    pub fn flat(level: f64, grid: FrequencyGrid) -> Result<Self> {
        Self::new(vec![level; grid.bins()], grid)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn grid(&self) -> FrequencyGrid {
        self.grid
    }

    pub(crate) fn ensure_grid(&self, grid: FrequencyGrid) -> Result<()> {
        if self.grid != grid {
            return Err(Error::GridMismatch {
                expected: grid.to_string(),
                found: self.grid.to_string(),
            });
        }
        Ok(())
    }

    /// Magnitude response of `rir` on `grid`.
    ///
    /// Responses longer than the analysis size are transformed whole with an
    /// FFT that is a power-of-two multiple of `grid.fft_size()`, and every
    /// bin of the result lands exactly on a grid frequency. Nothing is
    /// truncated and no smoothing is applied.
    pub fn of_rir(rir: &Rir, grid: FrequencyGrid) -> Result<Self> {
        if rir.sample_rate() != grid.sample_rate() {
            return Err(Error::SampleRateMismatch {
                expected: grid.sample_rate(),
                found: rir.sample_rate(),
            });
        }
        let mut size = grid.fft_size();
        while size < rir.len() {
            size *= 2;
        }
        let stride = size / grid.fft_size();

        let mut buf: Vec<Complex<f64>> = rir
            .samples()
            .iter()
            .map(|&s| Complex::new(s, 0.0))
            .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
            .take(size)
            .collect();
        with_planner(|p| p.plan_fft_forward(size).process(&mut buf));

        let values = (0..grid.bins()).map(|k| buf[k * stride].norm()).collect();
        Self::new(values, grid)
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn with_planner<R>(f: impl FnOnce(&mut FftPlanner<f64>) -> R) -> R {
    PLANNER.with(|p| f(&mut p.borrow_mut()))
}
