//! Spectral deviation and the summary statistics used to compare
//! equalisation strategies.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::signal::{FrequencyGrid, MagnitudeSpectrum};

/// Magnitudes are floored here before taking the logarithm.
pub const MAGNITUDE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    Total,
    Low,
    High,
}

impl Band {
    pub const ALL: [Band; 3] = [Band::Total, Band::Low, Band::High];

    pub fn spec(self) -> BandSpec {
        match self {
            Band::Total => BandSpec::new(self, 50.0, 20_000.0),
            Band::Low => BandSpec::new(self, 50.0, 2_000.0),
            Band::High => BandSpec::new(self, 2_000.0, 20_000.0),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Band::Total => "total",
            Band::Low => "low",
            Band::High => "high",
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Band {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Band::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| Error::param("band", format!("unknown band `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSpec {
    pub name: Band,
    pub f_low: f64,
    pub f_high: f64,
}

impl BandSpec {
    pub const fn new(name: Band, f_low: f64, f_high: f64) -> Self {
        Self {
            name,
            f_low,
            f_high,
        }
    }

    /// Inclusive bin range `(Q_l, Q_h)` on `grid`.
    pub fn bins(&self, grid: FrequencyGrid) -> (usize, usize) {
        (grid.nearest_bin(self.f_low), grid.nearest_bin(self.f_high))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositionClass {
    Optimal,
    GridAverage,
}

impl PositionClass {
    pub const ALL: [PositionClass; 2] = [PositionClass::Optimal, PositionClass::GridAverage];

    pub fn as_str(self) -> &'static str {
        match self {
            PositionClass::Optimal => "optimal",
            PositionClass::GridAverage => "grid_average",
        }
    }
}

impl fmt::Display for PositionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationResult {
    /// Spectral deviation in dB.
    pub s_d: f64,
    pub band: BandSpec,
}

/// RMS deviation in dB of `y` about its mean level over `band`.
///
/// Both ends of the band are inclusive and the sum of squares is divided
/// by `Q_h − Q_l − 1`. The mean level `D` is the arithmetic mean of the
/// summed bins, accumulated relative to the first bin so that a constant
/// response yields exactly zero.
pub fn spectral_deviation(y: &MagnitudeSpectrum, band: BandSpec) -> Result<DeviationResult> {
    let (ql, qh) = band.bins(y.grid());
    if qh < ql + 2 {
        return Err(Error::DegenerateBand {
            name: band.name.as_str(),
            bins: (qh + 1).saturating_sub(ql),
        });
    }
    let levels: Vec<f64> = y.values()[ql..=qh]
        .iter()
        .map(|&v| 20.0 * v.max(MAGNITUDE_FLOOR).log10())
        .collect();
    let pivot = levels[0];
    let d = pivot + levels.iter().map(|l| l - pivot).sum::<f64>() / levels.len() as f64;
    let ss: f64 = levels.iter().map(|l| (l - d) * (l - d)).sum();
    Ok(DeviationResult {
        s_d: (ss / (qh - ql - 1) as f64).sqrt(),
        band,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StatSummary {
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: usize,
}

fn mean_and_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

fn students_t(dof: f64) -> StudentsT {
    StudentsT::new(0.0, 1.0, dof).expect("degrees of freedom are positive")
}

/// Mean with a two-sided 95 % Student-t confidence interval.
pub fn mean_ci95(values: &[f64]) -> Result<StatSummary> {
    if values.len() < 2 {
        return Err(Error::param(
            "values",
            format!("{} sample(s), at least 2 needed", values.len()),
        ));
    }
    let n = values.len();
    let (mean, var) = mean_and_var(values);
    let half = if var > 0.0 {
        students_t((n - 1) as f64).inverse_cdf(0.975) * (var / n as f64).sqrt()
    } else {
        0.0
    };
    Ok(StatSummary {
        mean,
        ci_low: mean - half,
        ci_high: mean + half,
        n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TTest {
    pub t: f64,
    /// Two-sided p value.
    pub p: f64,
    pub dof: usize,
}

/// Two-sample t-test with a pooled (equal) variance estimate.
///
/// With zero pooled variance the statistic is 0 / p = 1 for equal means
/// and ±∞ / p = 0 otherwise.
pub fn pooled_t_test(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::param(
            "samples",
            "each sample needs at least 2 values",
        ));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let dof = a.len() + b.len() - 2;
    let (ma, va) = mean_and_var(a);
    let (mb, vb) = mean_and_var(b);
    let pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / dof as f64;
    let diff = ma - mb;
    if pooled == 0.0 {
        return Ok(if diff == 0.0 {
            TTest {
                t: 0.0,
                p: 1.0,
                dof,
            }
        } else {
            TTest {
                t: diff.signum() * f64::INFINITY,
                p: 0.0,
                dof,
            }
        });
    }
    let t = diff / (pooled * (1.0 / na + 1.0 / nb)).sqrt();
    let p = (2.0 * students_t(dof as f64).sf(t.abs())).min(1.0);
    Ok(TTest { t, p, dof })
}
