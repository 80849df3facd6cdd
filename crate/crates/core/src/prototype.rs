//! Prototype magnitude responses built from several receiver positions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::MagnitudeSpectrum;
use crate::weighting::WeightProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Single response at the optimal position.
    Local,
    /// Plain mean of every receiver's magnitude.
    Unweighted,
    /// Distance- and directivity-weighted mean.
    Weighted,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Local, Strategy::Unweighted, Strategy::Weighted];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Local => "local",
            Strategy::Unweighted => "unweighted",
            Strategy::Weighted => "weighted",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::param("strategy", format!("unknown strategy `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeResponse {
    pub magnitude: MagnitudeSpectrum,
    pub strategy: Strategy,
    pub receiver_count: usize,
}

/// `H_p(ω) = (1/R) Σ_r |H_r(ω)| · √W_r(ω)`, the mean of the square roots of
/// the weighted power responses. Receivers are summed in index order.
pub fn weighted_prototype(
    spectra: &[MagnitudeSpectrum],
    weights: &[WeightProfile],
) -> Result<PrototypeResponse> {
    let first = spectra
        .first()
        .ok_or(Error::Empty("no spectra for the prototype"))?;
    if weights.len() != spectra.len() {
        return Err(Error::param(
            "weights",
            format!(
                "{} weight profiles for {} spectra",
                weights.len(),
                spectra.len()
            ),
        ));
    }
    let grid = first.grid();
    let mut acc = vec![0.0; grid.bins()];
    for (spec, w) in spectra.iter().zip(weights) {
        spec.ensure_grid(grid)?;
        if w.values.len() != grid.bins() {
            return Err(Error::param(
                "weights",
                format!(
                    "profile has {} bins, grid has {}",
                    w.values.len(),
                    grid.bins()
                ),
            ));
        }
        for ((a, h), wv) in acc.iter_mut().zip(spec.values()).zip(&w.values) {
            *a += h * wv.sqrt();
        }
    }
    finish(acc, grid, Strategy::Weighted, spectra.len())
}

pub fn unweighted_prototype(spectra: &[MagnitudeSpectrum]) -> Result<PrototypeResponse> {
    let first = spectra
        .first()
        .ok_or(Error::Empty("no spectra for the prototype"))?;
    let grid = first.grid();
    let mut acc = vec![0.0; grid.bins()];
    for spec in spectra {
        spec.ensure_grid(grid)?;
        for (a, h) in acc.iter_mut().zip(spec.values()) {
            *a += h;
        }
    }
    finish(acc, grid, Strategy::Unweighted, spectra.len())
}

pub fn local_prototype(spectrum: &MagnitudeSpectrum) -> PrototypeResponse {
    PrototypeResponse {
        magnitude: spectrum.clone(),
        strategy: Strategy::Local,
        receiver_count: 1,
    }
}

fn finish(
    mut acc: Vec<f64>,
    grid: crate::signal::FrequencyGrid,
    strategy: Strategy,
    receiver_count: usize,
) -> Result<PrototypeResponse> {
    let scale = 1.0 / receiver_count as f64;
    for a in &mut acc {
        *a *= scale;
    }
    Ok(PrototypeResponse {
        magnitude: MagnitudeSpectrum::new(acc, grid)?,
        strategy,
        receiver_count,
    })
}

#[cfg(test)]
mod tests {
    use super::Strategy;
    use super::*;
    use crate::signal::FrequencyGrid;

    use proptest::prelude::*;

    fn grid() -> FrequencyGrid {
        FrequencyGrid::new(16, 48_000).unwrap()
    }

    fn flat(v: f64) -> MagnitudeSpectrum {
        MagnitudeSpectrum::flat(v, grid()).unwrap()
    }

    fn unit_weights(n: usize) -> Vec<WeightProfile> {
        (0..n)
            .map(|_| WeightProfile {
                values: vec![1.0; grid().bins()],
                z: 0.0,
                theta: 0.0,
            })
            .collect()
    }

    #[test]
    fn single_unit_weight_is_identity() {
        let s = MagnitudeSpectrum::new((0..9).map(|k| k as f64 * 0.3).collect(), grid()).unwrap();
        let p = weighted_prototype(std::slice::from_ref(&s), &unit_weights(1)).unwrap();
        assert_eq!(p.magnitude, s);
        assert_eq!(p.magnitude, local_prototype(&s).magnitude);
    }

    #[test]
    fn mean_of_flat_spectra() {
        let p = weighted_prototype(&[flat(1.0), flat(3.0)], &unit_weights(2)).unwrap();
        assert!(p.magnitude.values().iter().all(|&v| v == 2.0));
        let u = unweighted_prototype(&[flat(1.0), flat(3.0)]).unwrap();
        assert!(u.magnitude.values().iter().all(|&v| v == 2.0));
        assert_eq!(u.receiver_count, 2);
    }

    #[test]
    fn identical_spectra_average_to_themselves() {
        let s = MagnitudeSpectrum::new((0..9).map(|k| 1.0 + k as f64).collect(), grid()).unwrap();
        let u = unweighted_prototype(&[s.clone(), s.clone(), s.clone()]).unwrap();
        for (a, b) in u.magnitude.values().iter().zip(s.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_mismatched_inputs() {
        let other = MagnitudeSpectrum::flat(1.0, FrequencyGrid::new(16, 44_100).unwrap()).unwrap();
        assert!(matches!(
            unweighted_prototype(&[flat(1.0), other.clone()]),
            Err(Error::GridMismatch { .. })
        ));
        assert!(weighted_prototype(&[flat(1.0), other], &unit_weights(2)).is_err());
        assert!(weighted_prototype(&[flat(1.0)], &unit_weights(2)).is_err());
        assert!(unweighted_prototype(&[]).is_err());
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.as_str().parse::<Strategy>().unwrap(), s);
        }
        assert!("median".parse::<Strategy>().is_err());
    }

    use proptest::strategy::Strategy as _;

    fn spectra_and_weights(
    ) -> impl proptest::strategy::Strategy<Value = (Vec<Vec<f64>>, Vec<Vec<f64>>)> {
        (1usize..6).prop_flat_map(|r| {
            (
                proptest::collection::vec(proptest::collection::vec(0.0..10.0f64, 9), r),
                proptest::collection::vec(proptest::collection::vec(1e-3..1.0f64, 9), r),
            )
        })
    }

    fn build(h: &[Vec<f64>], w: &[Vec<f64>]) -> (Vec<MagnitudeSpectrum>, Vec<WeightProfile>) {
        let specs = h
            .iter()
            .map(|v| MagnitudeSpectrum::new(v.clone(), grid()).unwrap())
            .collect();
        let weights = w
            .iter()
            .map(|v| WeightProfile {
                values: v.clone(),
                z: 0.0,
                theta: 0.0,
            })
            .collect();
        (specs, weights)
    }

    proptest! {
        #[test]
        fn matches_scalar_evaluation((h, w) in spectra_and_weights()) {
            let (specs, weights) = build(&h, &w);
            let p = weighted_prototype(&specs, &weights).unwrap();
            let r = h.len() as f64;
            for k in 0..9 {
                let mut expected = 0.0;
                for i in 0..h.len() {
                    expected += h[i][k] * w[i][k].sqrt();
                }
                expected /= r;
                prop_assert!((p.magnitude.values()[k] - expected).abs() < 1e-12);
            }
        }

        #[test]
        fn unit_weights_match_unweighted((h, _w) in spectra_and_weights()) {
            let (specs, _) = build(&h, &[]);
            let p = weighted_prototype(&specs, &unit_weights(h.len())).unwrap();
            let u = unweighted_prototype(&specs).unwrap();
            for (a, b) in p.magnitude.values().iter().zip(u.magnitude.values()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn bounded_by_extremes((h, w) in spectra_and_weights()) {
            let (specs, weights) = build(&h, &w);
            let p = weighted_prototype(&specs, &weights).unwrap();
            let wmin = w.iter().flatten().copied().fold(f64::INFINITY, f64::min);
            for k in 0..9 {
                let hmin = h.iter().map(|v| v[k]).fold(f64::INFINITY, f64::min);
                let hmax = h.iter().map(|v| v[k]).fold(0.0, f64::max);
                let v = p.magnitude.values()[k];
                prop_assert!(v <= hmax + 1e-12);
                prop_assert!(v >= hmin * wmin.sqrt() - 1e-12);
            }
        }

        #[test]
        fn permutation_invariant((h, w) in spectra_and_weights()) {
            let (specs, weights) = build(&h, &w);
            let p = weighted_prototype(&specs, &weights).unwrap();
            let (mut rs, mut rw) = (specs.clone(), weights.clone());
            rs.reverse();
            rw.reverse();
            let q = weighted_prototype(&rs, &rw).unwrap();
            for (a, b) in p.magnitude.values().iter().zip(q.magnitude.values()) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
