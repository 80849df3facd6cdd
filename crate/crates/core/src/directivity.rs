//! Generalised loudspeaker directivity from the spherical head model.
//!
//! The model is a single pole-zero pair
//!
//! ```text
//! H(jω, θ) = (1 + j α(θ) ω / 2ω₀) / (1 + j ω / 2ω₀),   ω₀ = c / r
//! α(θ)     = α_min / 2 + (1 − α_min / 2)(1 + cos θ)
//! ```
//!
//! with unity gain at DC and a high-frequency asymptote of `α(θ)`: +6 dB on
//! axis, flat at 90° and a deep shelf behind the source.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DEFAULT_SPEED_OF_SOUND;
use crate::signal::{FrequencyGrid, MagnitudeSpectrum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShmParams {
    pub sphere_radius: f64,
    pub speed_of_sound: f64,
    pub alpha_min: f64,
}

impl Default for ShmParams {
    fn default() -> Self {
        Self {
            sphere_radius: 0.0875,
            speed_of_sound: DEFAULT_SPEED_OF_SOUND,
            alpha_min: 0.0,
        }
    }
}

impl ShmParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sphere_radius > 0.0) {
            return Err(Error::param("sphere_radius", "must be positive"));
        }
        if !(self.speed_of_sound > 0.0) {
            return Err(Error::param("speed_of_sound", "must be positive"));
        }
        if !(0.0..=2.0).contains(&self.alpha_min) {
            return Err(Error::param("alpha_min", "must lie in [0, 2]"));
        }
        Ok(())
    }

    /// Corner frequency ω₀ = c / r in rad/s.
    pub fn omega0(&self) -> f64 {
        self.speed_of_sound / self.sphere_radius
    }

    /// Zero coefficient for an off-axis angle; angles outside `[0, π]` are
    /// clamped.
    pub fn alpha(&self, theta: f64) -> f64 {
        let theta = theta.clamp(0.0, std::f64::consts::PI);
        let half_min = 0.5 * self.alpha_min;
        half_min + (1.0 - half_min) * (1.0 + theta.cos())
    }

    /// Analog magnitude at angular frequency `omega` (rad/s).
    pub fn magnitude_at(&self, theta: f64, omega: f64) -> f64 {
        let u = omega / (2.0 * self.omega0());
        let a = self.alpha(theta) * u;
        ((1.0 + a * a) / (1.0 + u * u)).sqrt()
    }
}

pub fn shm_magnitude(theta: f64, grid: FrequencyGrid, params: &ShmParams) -> MagnitudeSpectrum {
    let values = grid
        .frequencies()
        .map(|f| params.magnitude_at(theta, 2.0 * std::f64::consts::PI * f))
        .collect();
    MagnitudeSpectrum::new(values, grid).expect("SHM magnitudes are finite and non-negative")
}

/// SHM magnitude relative to the on-axis response, so that `θ = 0` is flat.
pub fn normalized_directivity(
    theta: f64,
    grid: FrequencyGrid,
    params: &ShmParams,
) -> MagnitudeSpectrum {
    if theta <= 0.0 {
        return MagnitudeSpectrum::flat(1.0, grid).expect("unit spectrum");
    }
    let values = grid
        .frequencies()
        .map(|f| {
            let w = 2.0 * std::f64::consts::PI * f;
            params.magnitude_at(theta, w) / params.magnitude_at(0.0, w)
        })
        .collect();
    MagnitudeSpectrum::new(values, grid).expect("SHM magnitudes are finite and non-negative")
}

/// Discrete first-order section `(b0 + b1 z⁻¹) / (1 − pole z⁻¹)`.
///
/// Built from the analog model with the bilinear transform (no
/// pre-warping). Its numerator is affine in `α`,
/// `b(z) = [w (1 + z⁻¹) + α (1 − z⁻¹)] / (1 + w)` with `w = ω₀ / fs`, while
/// the pole does not depend on the angle at all.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShmSection {
    pub b0: f64,
    pub b1: f64,
    pub pole: f64,
}

impl ShmSection {
    pub fn new(theta: f64, params: &ShmParams, sample_rate: u32) -> Self {
        Self::from_alpha(params.alpha(theta), params, sample_rate)
    }

    pub fn from_alpha(alpha: f64, params: &ShmParams, sample_rate: u32) -> Self {
        let w = Self::warped_corner(params, sample_rate);
        Self {
            b0: (alpha + w) / (1.0 + w),
            b1: (w - alpha) / (1.0 + w),
            pole: Self::pole(params, sample_rate),
        }
    }

    pub fn warped_corner(params: &ShmParams, sample_rate: u32) -> f64 {
        params.omega0() / f64::from(sample_rate)
    }

    pub fn pole(params: &ShmParams, sample_rate: u32) -> f64 {
        let w = Self::warped_corner(params, sample_rate);
        (1.0 - w) / (1.0 + w)
    }

    pub fn process_in_place(&self, x: &mut [f64]) {
        let (mut x1, mut y1) = (0.0, 0.0);
        for s in x.iter_mut() {
            let y = self.b0 * *s + self.b1 * x1 + self.pole * y1;
            x1 = *s;
            y1 = y;
            *s = y;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> FrequencyGrid {
        FrequencyGrid::new(8192, 48_000).unwrap()
    }

    fn hf_ratio(theta: f64) -> f64 {
        let p = ShmParams::default();
        p.magnitude_at(theta, 1e9) / p.magnitude_at(theta, 0.0)
    }

    #[test]
    fn asymptotes() {
        assert!((hf_ratio(0.0) - 2.0).abs() < 1e-6);
        assert!((20.0 * hf_ratio(0.0).log10() - 6.0206).abs() < 1e-3);
        assert!((hf_ratio(PI / 2.0) - 1.0).abs() < 1e-6);
        let p = ShmParams::default();
        for theta in [0.0, 0.3, 1.0, 2.0, PI] {
            assert_eq!(shm_magnitude(theta, grid(), &p).values()[0], 1.0);
        }
    }

    #[test]
    fn normalized_on_axis_is_flat() {
        let d = normalized_directivity(0.0, grid(), &ShmParams::default());
        assert!(d.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn normalized_ninety_degrees_tends_to_half() {
        let p = ShmParams::default();
        let r = p.magnitude_at(PI / 2.0, 1e9) / p.magnitude_at(0.0, 1e9);
        assert!((r - 0.5).abs() < 1e-6);
    }

    #[test]
    fn rear_response_is_monotone_low_pass() {
        let d = normalized_directivity(PI, grid(), &ShmParams::default());
        let v = d.values();
        assert!(v.windows(2).all(|w| w[1] <= w[0]));
        assert!(*v.last().unwrap() < 0.1);
        assert!(v.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn monotone_in_angle() {
        let p = ShmParams::default();
        let angles: Vec<f64> = (0..=18).map(|i| i as f64 * PI / 18.0).collect();
        for pair in angles.windows(2) {
            let lo = normalized_directivity(pair[0], grid(), &p);
            let hi = normalized_directivity(pair[1], grid(), &p);
            for (a, b) in lo.values().iter().zip(hi.values()) {
                assert!(b <= a);
            }
            assert_eq!(hi.values()[0], 1.0);
        }
    }

    #[test]
    fn positive_with_alpha_min() {
        let p = ShmParams {
            alpha_min: 0.1,
            ..Default::default()
        };
        let d = normalized_directivity(PI, grid(), &p);
        assert!(d.values().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn digital_section_matches_analog_at_dc_and_nyquist() {
        let p = ShmParams::default();
        for theta in [0.0, 1.0, PI / 2.0, 2.5] {
            let s = ShmSection::new(theta, &p, 48_000);
            let dc = (s.b0 + s.b1) / (1.0 - s.pole);
            let nyq = (s.b0 - s.b1) / (1.0 + s.pole);
            assert!((dc - 1.0).abs() < 1e-12);
            assert!((nyq - p.alpha(theta)).abs() < 1e-12);
        }
    }

    #[test]
    fn section_impulse_response_sums_to_dc_gain() {
        let p = ShmParams::default();
        let s = ShmSection::new(2.0, &p, 48_000);
        let mut x = vec![0.0; 4000];
        x[0] = 1.0;
        s.process_in_place(&mut x);
        assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}
