//! Source and receiver layout of the simulation campaign.
//!
//! Sources stand at 25 % and 75 % of the room width and 70 % of its length,
//! 1.2 m above the floor. The optimal receiver completes an equilateral
//! triangle with them, and both loudspeakers are aimed at it. The listening
//! area spans the sources' `x` range and 2 m in `y` centred on the optimal
//! receiver, clipped to stay 0.5 m from the walls.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::simulator::room::{Point3, RoomSpec, Source};

/// `(W, L, H)` of the four campaign rooms in metres.
pub const ROOM_DIMENSIONS: [(f64, f64, f64); 4] = [
    (5.0, 7.0, 3.0),
    (6.0, 8.0, 3.5),
    (7.0, 9.0, 3.5),
    (8.0, 6.0, 3.5),
];

pub const SOURCE_HEIGHT: f64 = 1.2;
pub const AREA_DEPTH: f64 = 2.0;
pub const WALL_MARGIN: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ListeningArea {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl ListeningArea {
    pub fn contains(&self, p: Point3) -> bool {
        (self.x_min..=self.x_max).contains(&p.x) && (self.y_min..=self.y_max).contains(&p.y)
    }

    /// `n × n` cell-centred grid at height `z`, row-major in `y` then `x`.
    pub fn grid(&self, n: usize, z: f64) -> Vec<Point3> {
        let dx = (self.x_max - self.x_min) / n as f64;
        let dy = (self.y_max - self.y_min) / n as f64;
        (0..n)
            .flat_map(|j| {
                (0..n).map(move |i| {
                    Point3::new(
                        self.x_min + (i as f64 + 0.5) * dx,
                        self.y_min + (j as f64 + 0.5) * dy,
                        z,
                    )
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub room_index: usize,
    pub room: RoomSpec,
    pub sources: [Source; 2],
    pub optimal: Point3,
    pub external: Vec<Point3>,
    pub eval_grid: Vec<Point3>,
    pub area: ListeningArea,
    pub seed: u64,
}

impl ScenarioSpec {
    /// Measured distance between the two loudspeakers.
    pub fn base(&self) -> f64 {
        self.sources[0].position.distance(self.sources[1].position)
    }
}

pub fn room_spec(room_index: usize, config: &ExperimentConfig) -> Result<RoomSpec> {
    let &(w, l, h) = ROOM_DIMENSIONS
        .get(room_index)
        .ok_or_else(|| Error::param("room_index", format!("{room_index} out of range")))?;
    Ok(RoomSpec {
        width: w,
        length: l,
        height: h,
        absorption: config.absorption.coefficients(),
        max_reflection_order: config.max_reflection_order,
        max_delay: config.max_delay,
        sample_rate: config.sample_rate,
        speed_of_sound: config.speed_of_sound,
    })
}

/// Deterministic layout for `room_index`; `seed` only moves the external
/// receivers.
pub fn generate_scenario(
    room_index: usize,
    seed: u64,
    config: &ExperimentConfig,
) -> Result<ScenarioSpec> {
    let room = room_spec(room_index, config)?;
    let (w, l) = (room.width, room.length);
    let s1 = Point3::new(0.25 * w, 0.7 * l, SOURCE_HEIGHT);
    let s2 = Point3::new(0.75 * w, 0.7 * l, SOURCE_HEIGHT);
    let base = s2.x - s1.x;
    let optimal = Point3::new(0.5 * w, s1.y - base * 3f64.sqrt() / 2.0, SOURCE_HEIGHT);

    let area = ListeningArea {
        x_min: s1.x,
        x_max: s2.x,
        y_min: (optimal.y - 0.5 * AREA_DEPTH).max(WALL_MARGIN),
        y_max: (optimal.y + 0.5 * AREA_DEPTH).min(l - WALL_MARGIN),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(room_index as u64);
    let external = (0..config.external_receivers)
        .map(|_| {
            Point3::new(
                rng.random_range(area.x_min..area.x_max),
                rng.random_range(area.y_min..area.y_max),
                SOURCE_HEIGHT,
            )
        })
        .collect();

    Ok(ScenarioSpec {
        room_index,
        sources: [Source::aimed_at(s1, optimal), Source::aimed_at(s2, optimal)],
        optimal,
        external,
        eval_grid: area.grid(config.grid_size, SOURCE_HEIGHT),
        area,
        room,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_room_layout() {
        let c = ExperimentConfig::default();
        let s = generate_scenario(0, 1, &c).unwrap();
        assert!(s.sources[0].position.distance(Point3::new(1.25, 4.9, 1.2)) < 1e-12);
        assert!(s.sources[1].position.distance(Point3::new(3.75, 4.9, 1.2)) < 1e-12);
        assert!((s.base() - 2.5).abs() < 1e-12);
        assert!((s.optimal.x - 2.5).abs() < 1e-12);
        assert!((s.optimal.y - 2.7349).abs() < 1e-4);
        for src in &s.sources {
            assert!((src.position.distance(s.optimal) - 2.5).abs() < 1e-12);
            let to_opt = (s.optimal - src.position).normalized();
            assert!((src.aim.dot(to_opt) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn receivers_inside_listening_area() {
        let c = ExperimentConfig::default();
        for room in 0..4 {
            for seed in 0..5 {
                let s = generate_scenario(room, seed, &c).unwrap();
                assert_eq!(s.external.len(), 6);
                assert_eq!(s.eval_grid.len(), 100);
                for p in s.external.iter().chain(&s.eval_grid) {
                    assert!(s.area.contains(*p));
                    assert!(s.room.contains(*p));
                }
                assert!(s.area.y_min >= WALL_MARGIN && s.area.y_max <= s.room.length - WALL_MARGIN);
            }
        }
    }

    #[test]
    fn short_room_clips_area() {
        let s = generate_scenario(3, 0, &ExperimentConfig::default()).unwrap();
        assert_eq!(s.area.y_min, WALL_MARGIN);
        assert!(s.area.y_max - s.area.y_min < AREA_DEPTH);
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let c = ExperimentConfig::default();
        assert_eq!(
            generate_scenario(2, 9, &c).unwrap(),
            generate_scenario(2, 9, &c).unwrap()
        );
        assert_ne!(
            generate_scenario(2, 9, &c).unwrap().external,
            generate_scenario(2, 10, &c).unwrap().external
        );
        assert!(generate_scenario(4, 0, &c).is_err());
    }
}
