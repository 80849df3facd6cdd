//! Regularised inversion of a prototype magnitude response.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{with_planner, MagnitudeSpectrum, Rir};

/// Magnitudes below this are treated as spectral nulls.
pub const NULL_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegMode {
    /// `H* / (|H|² + β|H|²)`, which reduces to `1 / ((1 + β)|H|)`.
    #[default]
    Verbatim,
    /// `H* / (|H|² + β)`, the conventional Tikhonov form.
    Constant,
}

impl RegMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RegMode::Verbatim => "verbatim",
            RegMode::Constant => "constant",
        }
    }
}

impl fmt::Display for RegMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RegMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "verbatim" => Ok(RegMode::Verbatim),
            "constant" => Ok(RegMode::Constant),
            _ => Err(Error::param("reg_mode", format!("unknown mode `{s}`"))),
        }
    }
}

/// Zero-phase inverse filter: one real, non-negative gain per bin.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseFilter {
    pub gains: MagnitudeSpectrum,
    pub beta: f64,
    pub mode: RegMode,
}

/// Linear-phase FIR realisation of an [`InverseFilter`].
#[derive(Debug, Clone, PartialEq)]
pub struct FirTaps {
    pub taps: Vec<f64>,
    /// Group delay in samples.
    pub latency: usize,
}

pub fn invert(prototype: &MagnitudeSpectrum, beta: f64, mode: RegMode) -> Result<InverseFilter> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::param("beta", format!("{beta} must be non-negative")));
    }
    let gain = |h: f64| match mode {
        RegMode::Verbatim => h / (h * h + beta * h * h),
        RegMode::Constant => h / (h * h + beta),
    };
    let cap = prototype
        .values()
        .iter()
        .filter(|&&h| h >= NULL_FLOOR)
        .map(|&h| gain(h))
        .filter(|g| g.is_finite())
        .fold(f64::NAN, f64::max);
    if cap.is_nan() {
        return Err(Error::NoSignal);
    }
    let gains = prototype
        .values()
        .iter()
        .map(|&h| {
            if h >= NULL_FLOOR {
                gain(h).min(cap)
            } else {
                cap
            }
        })
        .collect();
    Ok(InverseFilter {
        gains: MagnitudeSpectrum::new(gains, prototype.grid())?,
        beta,
        mode,
    })
}

impl InverseFilter {
    /// Equalised magnitude `|H(ω)| · G(ω)` of a response already on the
    /// filter's grid.
    pub fn apply_spectrum(&self, response: &MagnitudeSpectrum) -> Result<MagnitudeSpectrum> {
        response.ensure_grid(self.gains.grid())?;
        let values = response
            .values()
            .iter()
            .zip(self.gains.values())
            .map(|(h, g)| h * g)
            .collect();
        MagnitudeSpectrum::new(values, self.gains.grid())
    }

    pub fn apply(&self, rir: &Rir) -> Result<MagnitudeSpectrum> {
        let grid = self.gains.grid();
        if rir.sample_rate() != grid.sample_rate() {
            return Err(Error::SampleRateMismatch {
                expected: grid.sample_rate(),
                found: rir.sample_rate(),
            });
        }
        self.apply_spectrum(&MagnitudeSpectrum::of_rir(rir, grid)?)
    }

    /// Frequency-sampling FIR design: inverse FFT of the zero-phase gains,
    /// rotated by `taps / 2` and truncated with a Hann window.
    pub fn to_fir(&self, taps: usize) -> Result<FirTaps> {
        let n = self.gains.grid().fft_size();
        if taps == 0 || !taps.is_multiple_of(2) {
            return Err(Error::param(
                "taps",
                format!("{taps} must be positive and even"),
            ));
        }
        if taps > n {
            return Err(Error::param(
                "taps",
                format!("{taps} exceeds the FFT size {n}"),
            ));
        }
        let g = self.gains.values();
        let mut buf: Vec<Complex<f64>> = (0..n)
            .map(|k| {
                let k = if k <= n / 2 { k } else { n - k };
                Complex::new(g[k], 0.0)
            })
            .collect();
        with_planner(|p| p.plan_fft_inverse(n).process(&mut buf));

        let half = taps / 2;
        let scale = 1.0 / n as f64;
        let taps = (0..taps)
            .map(|i| {
                let h = buf[(i + n - half) % n].re * scale;
                let w = 0.5 - 0.5 * (2.0 * PI * i as f64 / taps as f64).cos();
                h * w
            })
            .collect();
        Ok(FirTaps {
            taps,
            latency: half,
        })
    }
}
