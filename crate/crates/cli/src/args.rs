use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use roomeq::{Absorption, ExperimentConfig, RegMode, SourceId, Strategy, ThetaReference};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "roomeq",
    version,
    about = "Multi-position room equalisation from prototype responses"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate receiver coordinates from paired source responses.
    Locate(LocateArgs),
    /// Build a prototype magnitude response and its inverse filter.
    Prototype(PrototypeArgs),
    /// Invert a magnitude response.
    Invert(InvertArgs),
    /// Report spectral deviation, optionally after equalisation.
    Evaluate(EvaluateArgs),
    /// Render the campaign's impulse responses to WAV files.
    Simulate(SimulateArgs),
    /// Run the full simulation campaign and parameter sweeps.
    Experiment(ExperimentArgs),
    /// Run only the weighting-parameter sweeps.
    Sweep(ExperimentArgs),
}

/// Flags mirroring the JSON configuration keys. Flags win over the file.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Room indices, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub rooms: Option<Vec<usize>>,
    #[arg(long = "reps")]
    pub repetitions: Option<usize>,
    #[arg(long)]
    pub external_receivers: Option<usize>,
    #[arg(long)]
    pub grid_size: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub sample_rate: Option<u32>,
    #[arg(long)]
    pub speed_of_sound: Option<f64>,
    #[arg(long)]
    pub fft_size: Option<usize>,
    /// Absorption coefficient applied to every surface.
    #[arg(long)]
    pub absorption: Option<f64>,
    #[arg(long)]
    pub max_reflection_order: Option<u32>,
    /// Longest simulated path in seconds.
    #[arg(long)]
    pub max_delay: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub zeta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// `verbatim` or `constant`.
    #[arg(long)]
    pub reg_mode: Option<RegMode>,
    #[arg(long)]
    pub taps: Option<usize>,
    /// `vertex` or `aim`.
    #[arg(long)]
    pub theta_reference: Option<String>,
    #[arg(long)]
    pub sphere_radius: Option<f64>,
    #[arg(long)]
    pub alpha_min: Option<f64>,
    /// δ values of the sweep, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub deltas: Option<Vec<f64>>,
    /// ζ values of the sweep, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub zetas: Option<Vec<f64>>,
}

impl ConfigArgs {
    /// Loads the file (or the defaults), applies the flags and validates.
    pub fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::from_path(path)?,
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(v) = &self.$field { c.$field = v.clone(); })*
            };
        }
        set!(
            rooms,
            repetitions,
            external_receivers,
            grid_size,
            seed,
            sample_rate,
            speed_of_sound,
            fft_size,
            max_reflection_order,
            max_delay,
            delta,
            zeta,
            beta,
            reg_mode,
            taps
        );
        if let Some(a) = self.absorption {
            c.absorption = Absorption::Uniform(a);
        }
        if let Some(t) = &self.theta_reference {
            c.theta_reference = match t.as_str() {
                "vertex" => ThetaReference::Vertex,
                "aim" => ThetaReference::Aim,
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown theta reference `{other}`"
                    )))
                }
            };
        }
        if let Some(r) = self.sphere_radius {
            c.shm.sphere_radius = r;
        }
        if let Some(a) = self.alpha_min {
            c.shm.alpha_min = a;
        }
        if let Some(d) = &self.deltas {
            c.sweep.deltas = d.clone();
        }
        if let Some(z) = &self.zetas {
            c.sweep.zetas = z.clone();
        }
        c.validate()?;
        Ok(c)
    }
}

fn parse_source(s: &str) -> Result<SourceId, String> {
    s.parse::<u8>()
        .ok()
        .and_then(SourceId::from_number)
        .ok_or_else(|| format!("source must be 1 or 2, got `{s}`"))
}

#[derive(Debug, Args)]
pub struct LocateArgs {
    /// Directory of `*_s1_*.wav` / `*_s2_*.wav` response pairs.
    #[arg(long)]
    pub input: PathBuf,
    /// Measured distance between the loudspeakers in metres.
    #[arg(long)]
    pub base: f64,
    /// Coordinates CSV to write.
    #[arg(long)]
    pub output: PathBuf,
    /// Receiver id of the optimal position. Defaults to `r0` of each group.
    #[arg(long)]
    pub optimal: Option<String>,
    /// Only use files whose name starts with this prefix.
    #[arg(long)]
    pub prefix: Option<String>,
    /// Source whose vertex angle is reported as `theta_deg`.
    #[arg(long, default_value = "2", value_parser = parse_source)]
    pub angle_source: SourceId,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Args)]
pub struct PrototypeArgs {
    /// Directory of receiver responses.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub strategy: Strategy,
    /// Coordinates CSV from `locate`, required by the weighted strategy.
    #[arg(long)]
    pub coords: Option<PathBuf>,
    /// Source whose responses are combined.
    #[arg(long, default_value = "1", value_parser = parse_source)]
    pub source: SourceId,
    #[arg(long)]
    pub optimal: Option<String>,
    #[arg(long)]
    pub prefix: Option<String>,
    #[arg(long)]
    pub output_dir: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    /// Magnitude CSV (`freq_hz,magnitude`).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output_dir: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// WAV responses or magnitude CSVs; directories are expanded to their
    /// WAV files.
    #[arg(long, num_args = 1.., required = true)]
    pub input: Vec<PathBuf>,
    /// Inverse filter as a magnitude CSV, applied before scoring.
    #[arg(long)]
    pub filter: Option<PathBuf>,
    /// Report CSV; printed to stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub output_dir: PathBuf,
    /// Also render the evaluation grid after the external receivers.
    #[arg(long)]
    pub grid: bool,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub output_dir: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
}
