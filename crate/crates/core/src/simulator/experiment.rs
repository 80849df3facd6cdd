//! End-to-end simulation campaign: simulate, localise, prototype, invert and
//! score every strategy.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use rayon::prelude::*;

use crate::config::{ExperimentConfig, ThetaReference};
use crate::equalizer::invert;
use crate::error::{Error, Result};
use crate::geometry::{estimate_toa, ReceiverEstimate, SourceId, SourcePair};
use crate::metrics::{
    mean_ci95, pooled_t_test, spectral_deviation, Band, PositionClass, StatSummary, TTest,
};
use crate::prototype::{local_prototype, unweighted_prototype, weighted_prototype, Strategy};
use crate::signal::MagnitudeSpectrum;
use crate::simulator::room::{simulate_rir, Point3};
use crate::simulator::scenario::{generate_scenario, ScenarioSpec};
use crate::weighting::{combined_weights, WeightingParams};

/// Columns of the results table: no equalisation plus one per prototype.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EqStrategy {
    NoEq,
    Prototype(Strategy),
}

impl EqStrategy {
    pub const ALL: [EqStrategy; 4] = [
        EqStrategy::NoEq,
        EqStrategy::Prototype(Strategy::Local),
        EqStrategy::Prototype(Strategy::Unweighted),
        EqStrategy::Prototype(Strategy::Weighted),
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EqStrategy::NoEq => "no_eq",
            EqStrategy::Prototype(s) => s.as_str(),
        }
    }
}

impl fmt::Display for EqStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub type SampleKey = (EqStrategy, PositionClass, Band);

/// Per-position data shared by every repetition in a room.
struct RoomData {
    scenario: ScenarioSpec,
    /// Indexed by source.
    optimal: [Arc<MagnitudeSpectrum>; 2],
    optimal_distances: [f64; 2],
    grid: [Vec<MagnitudeSpectrum>; 2],
}

/// One repetition: a fresh draw of external receivers.
struct Case {
    room: Arc<RoomData>,
    repetition: usize,
    external: [Vec<Arc<MagnitudeSpectrum>>; 2],
    optimal_estimate: ReceiverEstimate,
    external_estimates: Vec<ReceiverEstimate>,
    /// True and estimated distances from the optimal position.
    true_z: Vec<f64>,
}

/// Simulated responses for a whole campaign, ready to be evaluated under
/// any weighting parameters.
pub struct Campaign {
    config: ExperimentConfig,
    cases: Vec<Case>,
}

fn source_index(s: SourceId) -> usize {
    match s {
        SourceId::S1 => 0,
        SourceId::S2 => 1,
    }
}

/// Seed of repetition `rep`; the room index selects the RNG stream.
pub fn repetition_seed(seed: u64, rep: usize) -> u64 {
    seed.wrapping_add(rep as u64)
}

struct Simulated {
    spectrum: MagnitudeSpectrum,
    toa_distance: f64,
}

fn simulate_points(
    scenario: &ScenarioSpec,
    points: &[Point3],
    config: &ExperimentConfig,
) -> Result<Vec<[Simulated; 2]>> {
    let grid = config.grid();
    let shm = config.shm();
    points
        .par_iter()
        .map(|&p| {
            let run = |k: usize| -> Result<Simulated> {
                let rir = simulate_rir(&scenario.room, &scenario.sources[k], p, &shm)?;
                Ok(Simulated {
                    toa_distance: estimate_toa(&rir, config.speed_of_sound)?.distance,
                    spectrum: MagnitudeSpectrum::of_rir(&rir, grid)?,
                })
            };
            Ok([run(0)?, run(1)?])
        })
        .collect()
}

impl Campaign {
    pub fn simulate(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let mut cases = Vec::new();
        for &room_index in &config.rooms {
            let base_scenario =
                generate_scenario(room_index, repetition_seed(config.seed, 0), config)?;
            let mut fixed = vec![base_scenario.optimal];
            fixed.extend_from_slice(&base_scenario.eval_grid);
            let mut sims = simulate_points(&base_scenario, &fixed, config)?.into_iter();
            let [o1, o2] = sims.next().expect("optimal receiver simulated");
            let (mut g1, mut g2) = (Vec::new(), Vec::new());
            for [a, b] in sims {
                g1.push(a.spectrum);
                g2.push(b.spectrum);
            }
            let room = Arc::new(RoomData {
                optimal_distances: [o1.toa_distance, o2.toa_distance],
                optimal: [Arc::new(o1.spectrum), Arc::new(o2.spectrum)],
                grid: [g1, g2],
                scenario: base_scenario,
            });

            for repetition in 0..config.repetitions {
                let scenario = generate_scenario(
                    room_index,
                    repetition_seed(config.seed, repetition),
                    config,
                )?;
                let pair = SourcePair::new(scenario.base())?;
                let optimal_estimate =
                    pair.locate(room.optimal_distances[0], room.optimal_distances[1])?;
                let sims = simulate_points(&scenario, &scenario.external, config)?;
                let mut external: [Vec<Arc<MagnitudeSpectrum>>; 2] = [Vec::new(), Vec::new()];
                let mut external_estimates = Vec::new();
                for [a, b] in sims {
                    external_estimates.push(pair.locate(a.toa_distance, b.toa_distance)?);
                    external[0].push(Arc::new(a.spectrum));
                    external[1].push(Arc::new(b.spectrum));
                }
                let true_z = scenario
                    .external
                    .iter()
                    .map(|p| p.distance(scenario.optimal))
                    .collect();
                cases.push(Case {
                    room: Arc::clone(&room),
                    repetition,
                    external,
                    optimal_estimate,
                    external_estimates,
                    true_z,
                });
            }
        }
        Ok(Self {
            config: config.clone(),
            cases,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn case_count(&self) -> usize {
        self.cases.len()
    }

    /// Absolute error of every estimated optimal-to-external distance.
    pub fn localization_errors(&self) -> Vec<f64> {
        self.cases
            .iter()
            .flat_map(|c| {
                c.external_estimates
                    .iter()
                    .zip(&c.true_z)
                    .map(|(e, z)| (c.optimal_estimate.distance_to(e) - z).abs())
            })
            .collect()
    }

    fn evaluate_case(
        &self,
        case: &Case,
        source: SourceId,
        params: &WeightingParams,
        strategies: &[EqStrategy],
    ) -> Result<BTreeMap<SampleKey, f64>> {
        let cfg = &self.config;
        let grid = cfg.grid();
        let k = source_index(source);
        let optimal = &case.room.optimal[k];

        let mut spectra: Vec<MagnitudeSpectrum> = vec![(**optimal).clone()];
        spectra.extend(case.external[k].iter().map(|s| (**s).clone()));

        let opt_angle = case.optimal_estimate.vertex_angle(source);
        let angle = |e: &ReceiverEstimate| match cfg.theta_reference {
            ThetaReference::Vertex => e.vertex_angle(source),
            ThetaReference::Aim => (e.vertex_angle(source) - opt_angle).abs(),
        };
        let mut receivers = vec![(0.0, angle(&case.optimal_estimate))];
        receivers.extend(
            case.external_estimates
                .iter()
                .map(|e| (case.optimal_estimate.distance_to(e), angle(e))),
        );

        let mut out = BTreeMap::new();
        for &strategy in strategies {
            let filter = match strategy {
                EqStrategy::NoEq => None,
                EqStrategy::Prototype(s) => {
                    let proto = match s {
                        Strategy::Local => local_prototype(optimal),
                        Strategy::Unweighted => unweighted_prototype(&spectra)?,
                        Strategy::Weighted => {
                            let w = combined_weights(&receivers, grid, params, &cfg.shm())?;
                            weighted_prototype(&spectra, &w)?
                        }
                    };
                    Some(invert(&proto.magnitude, cfg.beta, cfg.reg_mode)?)
                }
            };
            let equalize = |y: &MagnitudeSpectrum| -> Result<MagnitudeSpectrum> {
                match &filter {
                    Some(f) => f.apply_spectrum(y),
                    None => Ok(y.clone()),
                }
            };

            let at_opt = equalize(optimal)?;
            let mut grid_sums = [0.0; 3];
            for y in &case.room.grid[k] {
                let eq = equalize(y)?;
                for (sum, band) in grid_sums.iter_mut().zip(Band::ALL) {
                    *sum += spectral_deviation(&eq, band.spec())?.s_d;
                }
            }
            let n = case.room.grid[k].len() as f64;
            for (i, band) in Band::ALL.into_iter().enumerate() {
                out.insert(
                    (strategy, PositionClass::Optimal, band),
                    spectral_deviation(&at_opt, band.spec())?.s_d,
                );
                out.insert(
                    (strategy, PositionClass::GridAverage, band),
                    grid_sums[i] / n,
                );
            }
        }
        Ok(out)
    }

    /// Spectral-deviation samples, one per (room, repetition, source), in
    /// that order.
    pub fn samples(
        &self,
        params: &WeightingParams,
        strategies: &[EqStrategy],
    ) -> Result<BTreeMap<SampleKey, Vec<f64>>> {
        params.validate()?;
        let jobs: Vec<(&Case, SourceId)> = self
            .cases
            .iter()
            .flat_map(|c| SourceId::BOTH.into_iter().map(move |s| (c, s)))
            .collect();
        let results: Vec<BTreeMap<SampleKey, f64>> = jobs
            .par_iter()
            .map(|&(c, s)| self.evaluate_case(c, s, params, strategies))
            .collect::<Result<_>>()?;

        let mut samples: BTreeMap<SampleKey, Vec<f64>> = BTreeMap::new();
        for r in results {
            for (key, v) in r {
                samples.entry(key).or_default().push(v);
            }
        }
        Ok(samples)
    }

    pub fn evaluate(&self, params: &WeightingParams) -> Result<EvalReport> {
        let samples = self.samples(params, &EqStrategy::ALL)?;
        let mut rows = Vec::new();
        for strategy in EqStrategy::ALL {
            for position in PositionClass::ALL {
                for band in Band::ALL {
                    let values = &samples[&(strategy, position, band)];
                    rows.push(ReportRow {
                        strategy,
                        position,
                        band,
                        summary: summarize(values)?,
                    });
                }
            }
        }
        let mut t_tests = Vec::new();
        for position in PositionClass::ALL {
            for band in Band::ALL {
                let w = &samples[&(EqStrategy::Prototype(Strategy::Weighted), position, band)];
                let u = &samples[&(EqStrategy::Prototype(Strategy::Unweighted), position, band)];
                t_tests.push(TTestRow {
                    position,
                    band,
                    test: pooled_t_test(w, u)?,
                });
            }
        }
        Ok(EvalReport {
            rows,
            t_tests,
            samples,
            localization_errors: self.localization_errors(),
            cases: self
                .cases
                .iter()
                .map(|c| (c.room.scenario.room_index, c.repetition))
                .collect(),
        })
    }

    /// One-dimensional sweeps of δ (at the configured ζ) and ζ (at the
    /// configured δ), scoring the weighted prototype.
    pub fn sweep(&self, deltas: &[f64], zetas: &[f64]) -> Result<SweepReport> {
        if deltas.is_empty() || zetas.is_empty() {
            return Err(Error::Empty("sweep grid"));
        }
        let cell = |delta: f64, zeta: f64| -> Result<SweepRow> {
            let params = WeightingParams::new(delta, zeta)?;
            let s = self.samples(&params, &[EqStrategy::Prototype(Strategy::Weighted)])?;
            let mean = |p| {
                let v = &s[&(EqStrategy::Prototype(Strategy::Weighted), p, Band::Total)];
                v.iter().sum::<f64>() / v.len() as f64
            };
            Ok(SweepRow {
                delta,
                zeta,
                ref_sd: mean(PositionClass::Optimal),
                avg_sd: mean(PositionClass::GridAverage),
            })
        };
        Ok(SweepReport {
            delta_rows: deltas
                .iter()
                .map(|&d| cell(d, self.config.zeta))
                .collect::<Result<_>>()?,
            zeta_rows: zetas
                .iter()
                .map(|&z| cell(self.config.delta, z))
                .collect::<Result<_>>()?,
        })
    }
}

fn summarize(values: &[f64]) -> Result<StatSummary> {
    if values.len() == 1 {
        let v = values[0];
        return Ok(StatSummary {
            mean: v,
            ci_low: v,
            ci_high: v,
            n: 1,
        });
    }
    mean_ci95(values)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub strategy: EqStrategy,
    pub position: PositionClass,
    pub band: Band,
    pub summary: StatSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TTestRow {
    pub position: PositionClass,
    pub band: Band,
    /// Weighted against unweighted.
    pub test: TTest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub rows: Vec<ReportRow>,
    pub t_tests: Vec<TTestRow>,
    pub samples: BTreeMap<SampleKey, Vec<f64>>,
    pub localization_errors: Vec<f64>,
    /// `(room, repetition)` of every case, in sample order.
    pub cases: Vec<(usize, usize)>,
}

impl EvalReport {
    pub fn row(&self, strategy: EqStrategy, position: PositionClass, band: Band) -> &StatSummary {
        &self
            .rows
            .iter()
            .find(|r| r.strategy == strategy && r.position == position && r.band == band)
            .expect("every combination is reported")
            .summary
    }

    pub fn t_test(&self, position: PositionClass, band: Band) -> &TTest {
        &self
            .t_tests
            .iter()
            .find(|r| r.position == position && r.band == band)
            .expect("every combination is tested")
            .test
    }

    pub fn table_csv(&self) -> String {
        let mut s = String::from("strategy,position_class,band,mean_db,ci_low,ci_high,n\n");
        for r in &self.rows {
            let m = &r.summary;
            let _ = writeln!(
                s,
                "{},{},{},{:.6},{:.6},{:.6},{}",
                r.strategy, r.position, r.band, m.mean, m.ci_low, m.ci_high, m.n
            );
        }
        s
    }

    pub fn t_test_csv(&self) -> String {
        let mut s = String::from("comparison,position_class,band,t,p,dof\n");
        for r in &self.t_tests {
            let _ = writeln!(
                s,
                "weighted_vs_unweighted,{},{},{:.6},{:.6e},{}",
                r.position, r.band, r.test.t, r.test.p, r.test.dof
            );
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub delta: f64,
    pub zeta: f64,
    /// Mean total-band deviation at the optimal position.
    pub ref_sd: f64,
    /// Mean total-band deviation averaged over the evaluation grid.
    pub avg_sd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub delta_rows: Vec<SweepRow>,
    pub zeta_rows: Vec<SweepRow>,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("delta,zeta,ref_sd,avg_sd\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{:.6},{:.6}", r.delta, r.zeta, r.ref_sd, r.avg_sd);
    }
    s
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<EvalReport> {
    Campaign::simulate(config)?.evaluate(&config.weighting())
}

pub fn parameter_sweep(
    config: &ExperimentConfig,
    deltas: &[f64],
    zetas: &[f64],
) -> Result<SweepReport> {
    if deltas.is_empty() || zetas.is_empty() {
        return Err(Error::Empty("sweep grid"));
    }
    Campaign::simulate(config)?.sweep(deltas, zetas)
}
