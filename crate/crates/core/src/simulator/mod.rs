//! Shoebox-room simulation and the evaluation campaign built on it.

pub mod experiment;
pub mod room;
pub mod scenario;

pub use experiment::{
    parameter_sweep, run_experiment, sweep_csv, Campaign, EqStrategy, EvalReport, ReportRow,
    SweepReport, SweepRow, TTestRow,
};
pub use room::{simulate_rir, Point3, RoomSpec, Source};
pub use scenario::{generate_scenario, room_spec, ListeningArea, ScenarioSpec, ROOM_DIMENSIONS};
