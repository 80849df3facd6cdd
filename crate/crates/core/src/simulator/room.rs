//! Shoebox image-source simulation with a directive source.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::directivity::{ShmParams, ShmSection};
use crate::error::{Error, Result};
use crate::signal::Rir;

/// Half-length of the windowed-sinc fractional delay kernel (16 taps).
const SINC_HALF: i64 = 8;
/// Samples appended after the last image to let the directivity filter ring out.
const TAIL: usize = 256;
/// Closest an image may come to the receiver.
const MIN_IMAGE_DISTANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Point3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, o: Point3) -> f64 {
        (self - o).norm()
    }

    pub fn normalized(self) -> Point3 {
        self * (1.0 / self.norm())
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, k: f64) -> Point3 {
        Point3::new(self.x * k, self.y * k, self.z * k)
    }
}

/// A loudspeaker: position plus unit on-axis direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Source {
    pub position: Point3,
    pub aim: Point3,
}

impl Source {
    /// Source at `position` aimed at `target`.
    pub fn aimed_at(position: Point3, target: Point3) -> Self {
        Self {
            position,
            aim: (target - position).normalized(),
        }
    }
}

/// Rectangular room. Absorption coefficients are ordered
/// `[x = 0, x = W, y = 0, y = L, z = 0, z = H]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoomSpec {
    pub width: f64,
    pub length: f64,
    pub height: f64,
    pub absorption: [f64; 6],
    pub max_reflection_order: u32,
    /// Images arriving later than this many seconds are dropped.
    pub max_delay: f64,
    pub sample_rate: u32,
    pub speed_of_sound: f64,
}

impl RoomSpec {
    pub fn new(width: f64, length: f64, height: f64) -> Self {
        Self {
            width,
            length,
            height,
            absorption: [0.3; 6],
            max_reflection_order: 30,
            max_delay: 1.0,
            sample_rate: 48_000,
            speed_of_sound: crate::geometry::DEFAULT_SPEED_OF_SOUND,
        }
    }

    pub fn dims(&self) -> [f64; 3] {
        [self.width, self.length, self.height]
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims().iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
            return Err(Error::param("room", "dimensions must be positive"));
        }
        if self.absorption.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::param(
                "absorption",
                "coefficients must lie in [0, 1]",
            ));
        }
        if self.sample_rate == 0 {
            return Err(Error::param("sample_rate", "must be positive"));
        }
        if !(self.speed_of_sound > 0.0) {
            return Err(Error::param("speed_of_sound", "must be positive"));
        }
        if !(self.max_delay > 0.0) {
            return Err(Error::param("max_delay", "must be positive"));
        }
        Ok(())
    }

    pub fn contains(&self, p: Point3) -> bool {
        (0.0..=self.width).contains(&p.x)
            && (0.0..=self.length).contains(&p.y)
            && (0.0..=self.height).contains(&p.z)
    }
}

fn windowed_sinc(x: f64) -> f64 {
    let half = SINC_HALF as f64;
    if x.abs() >= half {
        return 0.0;
    }
    let window = 0.5 * (1.0 + (PI * x / half).cos());
    let sinc = if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    };
    sinc * window
}

/// Image index along one axis: position, reflections off the near and far
/// walls, and whether the image is mirrored.
fn axis_image(k: i64, src: f64, len: f64) -> (f64, u32, u32, bool) {
    let q = k.rem_euclid(2);
    let n = (k + q) / 2;
    let pos = (1 - 2 * q) as f64 * src + 2.0 * n as f64 * len;
    (
        pos,
        (n - q).unsigned_abs() as u32,
        n.unsigned_abs() as u32,
        q == 1,
    )
}

/// Impulse response between a directive `source` and an omnidirectional
/// receiver.
///
/// Each image contributes `Π β_w^{n_w} / (4π d)` with `β = √(1 − α)`,
/// delayed by `d / c` through a 16-tap Hann-windowed sinc. The source
/// directivity is applied per image at the angle between the mirrored aim
/// direction and the image-to-receiver ray. Because every SHM section
/// shares one pole and has a numerator affine in `α`, the per-image
/// filtering collapses into two accumulators and a single recursion.
pub fn simulate_rir(
    room: &RoomSpec,
    source: &Source,
    receiver: Point3,
    shm: &ShmParams,
) -> Result<Rir> {
    room.validate()?;
    shm.validate()?;
    if !room.contains(source.position) || !room.contains(receiver) {
        return Err(Error::param(
            "position",
            "source and receiver must lie inside the room",
        ));
    }
    let fs = f64::from(room.sample_rate);
    let c = room.speed_of_sound;
    let beta: Vec<f64> = room.absorption.iter().map(|a| (1.0 - a).sqrt()).collect();
    let max_dist = room.max_delay * c;
    let order = i64::from(room.max_reflection_order);
    let src = source.position;

    let mut plain: Vec<f64> = Vec::new();
    let mut shaped: Vec<f64> = Vec::new();
    let mut deposit = |delay: f64, a: f64, alpha: f64| {
        let base = delay.floor() as i64;
        let last = (base + SINC_HALF) as usize;
        if plain.len() <= last {
            plain.resize(last + 1, 0.0);
            shaped.resize(last + 1, 0.0);
        }
        for n in (base - SINC_HALF + 1).max(0)..=base + SINC_HALF {
            let h = a * windowed_sinc(n as f64 - delay);
            plain[n as usize] += h;
            shaped[n as usize] += alpha * h;
        }
    };

    for kx in -order..=order {
        let (ix, x0, x1, mx) = axis_image(kx, src.x, room.width);
        let rx = order - kx.abs();
        for ky in -rx..=rx {
            let (iy, y0, y1, my) = axis_image(ky, src.y, room.length);
            let rz = rx - ky.abs();
            for kz in -rz..=rz {
                let (iz, z0, z1, mz) = axis_image(kz, src.z, room.height);
                let image = Point3::new(ix, iy, iz);
                let ray = receiver - image;
                let dist = ray.norm();
                if dist < MIN_IMAGE_DISTANCE {
                    return Err(Error::CoincidentImage { distance: dist });
                }
                if dist > max_dist {
                    continue;
                }
                let gain = beta[0].powi(x0 as i32)
                    * beta[1].powi(x1 as i32)
                    * beta[2].powi(y0 as i32)
                    * beta[3].powi(y1 as i32)
                    * beta[4].powi(z0 as i32)
                    * beta[5].powi(z1 as i32);
                if gain == 0.0 {
                    continue;
                }
                let aim = Point3::new(
                    if mx { -source.aim.x } else { source.aim.x },
                    if my { -source.aim.y } else { source.aim.y },
                    if mz { -source.aim.z } else { source.aim.z },
                );
                let theta = (aim.dot(ray) / dist).clamp(-1.0, 1.0).acos();
                deposit(dist / c * fs, gain / (4.0 * PI * dist), shm.alpha(theta));
            }
        }
    }

    if plain.is_empty() {
        return Err(Error::NoSignal);
    }
    let len = plain.len() + TAIL;
    plain.resize(len, 0.0);
    shaped.resize(len, 0.0);

    // b(z) = [w (1 + z⁻¹) Σ a δ + (1 − z⁻¹) Σ α a δ] / (1 + w)
    let w = ShmSection::warped_corner(shm, room.sample_rate);
    let pole = ShmSection::pole(shm, room.sample_rate);
    let norm = 1.0 / (1.0 + w);
    let mut out = vec![0.0; len];
    let (mut p1, mut s1, mut y1) = (0.0, 0.0, 0.0);
    for i in 0..len {
        let (p, s) = (plain[i], shaped[i]);
        let y = norm * (w * (p + p1) + (s - s1)) + pole * y1;
        out[i] = y;
        p1 = p;
        s1 = s;
        y1 = y;
    }
    Rir::new(out, room.sample_rate)
}
