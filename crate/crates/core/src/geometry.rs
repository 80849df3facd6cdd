//! Acoustic receiver localisation from a pair of sources with a known
//! baseline.
//!
//! Source `S1` sits at the origin and `S2` at `(base, 0)`. A receiver's
//! distances to both sources come from the time of arrival of the direct
//! sound in each impulse response. The source/receiver triangle then gives
//! the receiver height above the baseline (Heron's formula) and the
//! sub-triangle below the farther source gives its `x` coordinate.
//! Receivers are always mapped into the `y >= 0` half-plane.

use crate::error::{Error, Result};
use crate::signal::Rir;

pub const DEFAULT_SPEED_OF_SOUND: f64 = 343.0;

/// Slack allowed on the triangle inequality before distances are rejected.
pub const TRIANGLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SourceId {
    S1,
    S2,
}

impl SourceId {
    pub const BOTH: [SourceId; 2] = [SourceId::S1, SourceId::S2];

    /// One-based label used in file names.
    pub fn number(self) -> u8 {
        match self {
            SourceId::S1 => 1,
            SourceId::S2 => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(SourceId::S1),
            2 => Some(SourceId::S2),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToaEstimate {
    pub sample_index: usize,
    /// Source to receiver distance in metres.
    pub distance: f64,
}

/// Time of arrival of the direct sound: the first sample whose magnitude
/// exceeds half of the response's peak magnitude.
///
/// The peak need not be the direct sound (a receiver close to a reflective
/// boundary can see a stronger reflection), which is why the first crossing
/// is used rather than the arg-max.
pub fn estimate_toa(rir: &Rir, speed_of_sound: f64) -> Result<ToaEstimate> {
    if !(speed_of_sound > 0.0) {
        return Err(Error::param("speed_of_sound", "must be positive"));
    }
    let peak = rir.samples().iter().fold(0.0_f64, |m, s| m.max(s.abs()));
    if peak == 0.0 {
        return Err(Error::NoSignal);
    }
    let threshold = 0.5 * peak;
    let sample_index = rir
        .samples()
        .iter()
        .position(|s| s.abs() > threshold)
        .ok_or(Error::NoSignal)?;
    Ok(ToaEstimate {
        sample_index,
        distance: sample_index as f64 / f64::from(rir.sample_rate()) * speed_of_sound,
    })
}

fn check_triangle(dist_s1: f64, dist_s2: f64, base: f64) -> Result<()> {
    let sides = [dist_s1, dist_s2, base];
    let inconsistent = || Error::InconsistentDistances {
        dist_s1,
        dist_s2,
        base,
    };
    if sides.iter().any(|s| !s.is_finite() || *s < 0.0) || !(base > 0.0) {
        return Err(inconsistent());
    }
    let sum: f64 = sides.iter().sum();
    if sides.iter().any(|&s| s > sum - s + TRIANGLE_TOLERANCE) {
        return Err(inconsistent());
    }
    Ok(())
}

/// Area of a triangle from its sides, using Kahan's ordering of Heron's
/// formula so that needle-like triangles keep full precision. A slightly
/// negative discriminant (degenerate triangle) is clamped to zero.
fn heron_area(a: f64, b: f64, c: f64) -> f64 {
    let mut s = [a, b, c];
    s.sort_by(|p, q| q.total_cmp(p));
    let [a, b, c] = s;
    let d = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    0.25 * d.max(0.0).sqrt()
}

/// Receiver coordinates in the S1-origin frame.
pub fn triangulate(dist_s1: f64, dist_s2: f64, base: f64) -> Result<Point2> {
    check_triangle(dist_s1, dist_s2, base)?;
    let y = 2.0 * heron_area(dist_s1, dist_s2, base) / base;
    // Anchor the sub-triangle at the farther source; its leg along the
    // baseline then always points towards the nearer source.
    let x = if dist_s1 >= dist_s2 {
        (dist_s1 * dist_s1 - y * y).max(0.0).sqrt()
    } else {
        base - (dist_s2 * dist_s2 - y * y).max(0.0).sqrt()
    };
    Ok(Point2 { x, y })
}

/// Planar distance between two receiver estimates.
pub fn receiver_distance(opt: Point2, ext: Point2) -> f64 {
    ((opt.y - ext.y).powi(2) + (opt.x - ext.x).powi(2)).sqrt()
}

/// Angle between sides `a` and `b` of a triangle whose third side is `c`.
///
/// Evaluates the law of cosines in Kahan's cancellation-free form, so the
/// result stays accurate for angles near 0 and π. Side lengths that violate
/// the triangle inequality saturate at 0 or π.
pub fn receiver_angle(a: f64, b: f64, c: f64) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) || !(c >= 0.0) {
        return Err(Error::DegenerateTriangle(a, b));
    }
    let (a, b) = if a >= b { (a, b) } else { (b, a) };
    let mu = if b >= c { c - (a - b) } else { b - (a - c) };
    let num = ((a - b) + c) * mu;
    let den = (a + (b + c)) * ((a - c) + b);
    if den <= 0.0 {
        return Ok(std::f64::consts::PI);
    }
    if num <= 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * (num / den).sqrt().atan())
}

/// The two loudspeakers, separated by a measured baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourcePair {
    base: f64,
}

impl SourcePair {
    pub fn new(base: f64) -> Result<Self> {
        if !(base > 0.0) || !base.is_finite() {
            return Err(Error::param("base", format!("{base} m must be positive")));
        }
        Ok(Self { base })
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn source_coords(&self) -> [Point2; 2] {
        [Point2::new(0.0, 0.0), Point2::new(self.base, 0.0)]
    }

    pub fn locate(&self, dist_s1: f64, dist_s2: f64) -> Result<ReceiverEstimate> {
        let p = triangulate(dist_s1, dist_s2, self.base)?;
        Ok(ReceiverEstimate {
            x: p.x,
            y: p.y,
            dist_s1,
            dist_s2,
            base: self.base,
            theta: receiver_angle(dist_s2, self.base, dist_s1)?,
        })
    }

    /// Locates a receiver from its responses to `S1` and `S2`.
    pub fn locate_rirs(&self, s1: &Rir, s2: &Rir, speed_of_sound: f64) -> Result<ReceiverEstimate> {
        let d1 = estimate_toa(s1, speed_of_sound)?.distance;
        let d2 = estimate_toa(s2, speed_of_sound)?.distance;
        self.locate(d1, d2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverEstimate {
    pub x: f64,
    pub y: f64,
    /// Distance to `S1` (side `c`).
    pub dist_s1: f64,
    /// Distance to `S2` (side `a`).
    pub dist_s2: f64,
    pub base: f64,
    /// Angle at `S2` between the receiver and the baseline.
    pub theta: f64,
}

impl ReceiverEstimate {
    pub fn point(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    /// Angle at the given source's vertex between the baseline and the
    /// receiver.
    pub fn vertex_angle(&self, source: SourceId) -> f64 {
        match source {
            SourceId::S2 => self.theta,
            // Sides were validated in `locate`.
            SourceId::S1 => receiver_angle(self.dist_s1, self.base, self.dist_s2).unwrap_or(0.0),
        }
    }

    pub fn distance_to(&self, other: &ReceiverEstimate) -> f64 {
        receiver_distance(self.point(), other.point())
    }
}
