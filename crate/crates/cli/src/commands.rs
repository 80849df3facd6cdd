use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use roomeq::io::{
    list_wavs, read_coordinates_csv, read_magnitude_csv, read_wav, rir_filename,
    write_coordinates_csv, write_fir_csv, write_magnitude_csv, write_rir, write_text, write_wav,
    CoordinateRow,
};
use roomeq::simulator::experiment::repetition_seed;
use roomeq::simulator::{sweep_csv, SweepRow};
use roomeq::{
    combined_weights, estimate_toa, generate_scenario, invert, local_prototype, simulate_rir,
    spectral_deviation, unweighted_prototype, weighted_prototype, Band, Campaign, EqStrategy,
    ExperimentConfig, FrequencyGrid, InverseFilter, MagnitudeSpectrum, PositionClass,
    ReceiverEstimate, SourceId, SourcePair, Strategy, ThetaReference,
};

use crate::args::{
    EvaluateArgs, ExperimentArgs, InvertArgs, LocateArgs, PrototypeArgs, SimulateArgs,
};
use crate::error::CliError;
use crate::svg::{bar_chart, LinePlot, Series};

type Result<T> = std::result::Result<T, CliError>;

/// A WAV file named `<tokens>_s<k>_<tokens>.wav`.
struct ResponseFile {
    path: PathBuf,
    receiver: String,
    source: Option<SourceId>,
}

impl ResponseFile {
    fn parse(path: PathBuf) -> Self {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let tokens: Vec<&str> = stem.split('_').collect();
        let source_at = tokens.iter().position(|t| *t == "s1" || *t == "s2");
        let source = source_at.and_then(|i| SourceId::from_number(tokens[i][1..].parse().ok()?));
        let receiver = tokens
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != source_at)
            .map(|(_, t)| *t)
            .collect::<Vec<_>>()
            .join("_");
        Self {
            path,
            receiver,
            source,
        }
    }
}

/// Splits `room0_rep1_r3` into the group `room0_rep1` and receiver index 3.
fn receiver_group(id: &str) -> (&str, Option<usize>) {
    let (group, last) = id.rsplit_once('_').unwrap_or(("", id));
    match last.strip_prefix('r').and_then(|n| n.parse().ok()) {
        Some(n) => (group, Some(n)),
        None => (id, None),
    }
}

/// Orders `r2` before `r10`.
fn natural_key(s: &str) -> Vec<(String, u64)> {
    let mut out = Vec::new();
    let mut text = String::new();
    let mut digits = String::new();
    for c in s.chars() {
        if c.is_ascii_digit() {
            digits.push(c);
        } else {
            if !digits.is_empty() {
                out.push((
                    std::mem::take(&mut text),
                    digits.parse().unwrap_or(u64::MAX),
                ));
                digits.clear();
            }
            text.push(c);
        }
    }
    out.push((text, digits.parse().unwrap_or(0)));
    out
}

fn response_files(dir: &Path, prefix: Option<&str>) -> Result<Vec<ResponseFile>> {
    let files: Vec<ResponseFile> = list_wavs(dir)?
        .into_iter()
        .filter(|p| {
            prefix.is_none_or(|pre| {
                p.file_name()
                    .is_some_and(|n| n.to_string_lossy().starts_with(pre))
            })
        })
        .map(ResponseFile::parse)
        .collect();
    if files.is_empty() {
        return Err(CliError::Usage(format!(
            "no WAV files found in {}",
            dir.display()
        )));
    }
    Ok(files)
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| {
        roomeq::Error::Io {
            path: dir.to_owned(),
            source,
        }
        .into()
    })
}

/// The optimal receiver of each group: `explicit` if given, else `r0`,
/// else the only receiver.
fn optimal_of<'a>(
    ids: impl Iterator<Item = &'a str> + Clone,
    id: &str,
    explicit: Option<&'a str>,
) -> Option<String> {
    if let Some(o) = explicit {
        return Some(o.to_owned());
    }
    let (group, _) = receiver_group(id);
    if let Some(r0) = ids
        .clone()
        .find(|other| receiver_group(other) == (group, Some(0)))
    {
        return Some(r0.to_owned());
    }
    let mut all = ids;
    match (all.next(), all.next()) {
        (Some(only), None) => Some(only.to_owned()),
        _ => None,
    }
}

pub fn locate(args: &LocateArgs) -> Result<()> {
    let config = args.config.resolve()?;
    let pair = SourcePair::new(args.base)?;
    let files = response_files(&args.input, args.prefix.as_deref())?;

    let mut pairs: BTreeMap<String, [Option<PathBuf>; 2]> = BTreeMap::new();
    for f in files {
        match f.source {
            Some(s) => {
                pairs.entry(f.receiver).or_default()[(s.number() - 1) as usize] = Some(f.path)
            }
            None => eprintln!(
                "skipping {}: no `_s1_` or `_s2_` in the file name",
                f.path.display()
            ),
        }
    }
    if pairs.is_empty() {
        return Err(CliError::Usage(format!(
            "no source-tagged WAV files in {}",
            args.input.display()
        )));
    }
    let mut ids: Vec<String> = pairs.keys().cloned().collect();
    ids.sort_by_key(|id| natural_key(id));

    let estimates: BTreeMap<&str, std::result::Result<ReceiverEstimate, String>> = ids
        .iter()
        .map(|id| {
            let est = match &pairs[id] {
                [Some(a), Some(b)] => (|| -> roomeq::Result<ReceiverEstimate> {
                    let d1 = estimate_toa(&read_wav(a)?, config.speed_of_sound)?.distance;
                    let d2 = estimate_toa(&read_wav(b)?, config.speed_of_sound)?.distance;
                    pair.locate(d1, d2)
                })()
                .map_err(|e| e.to_string()),
                [None, _] => Err("missing source 1 response".to_owned()),
                [_, None] => Err("missing source 2 response".to_owned()),
            };
            (id.as_str(), est)
        })
        .collect();

    let mut rows = Vec::new();
    let mut failed = 0;
    for id in &ids {
        let result = (|| -> std::result::Result<CoordinateRow, String> {
            let est = estimates[id.as_str()].clone()?;
            let opt_id = optimal_of(ids.iter().map(String::as_str), id, args.optimal.as_deref())
                .ok_or("no optimal receiver (name it `r0` or pass --optimal)")?;
            let opt = match estimates.get(opt_id.as_str()) {
                Some(Ok(o)) => o,
                Some(Err(e)) => return Err(format!("optimal receiver {opt_id}: {e}")),
                None => return Err(format!("optimal receiver {opt_id} not found")),
            };
            Ok(CoordinateRow {
                receiver: id.clone(),
                x: Some(est.x),
                y: Some(est.y),
                z_from_optimal: Some(opt.distance_to(&est)),
                theta_deg: Some(est.vertex_angle(args.angle_source).to_degrees()),
            })
        })();
        rows.push(result.unwrap_or_else(|e| {
            eprintln!("receiver {id}: {e}");
            failed += 1;
            CoordinateRow {
                receiver: id.clone(),
                x: None,
                y: None,
                z_from_optimal: None,
                theta_deg: None,
            }
        }));
    }
    write_coordinates_csv(&args.output, &rows)?;
    if failed > 0 {
        return Err(CliError::Incomplete {
            failed,
            total: rows.len(),
        });
    }
    Ok(())
}

fn db(v: f64) -> f64 {
    20.0 * v.max(1e-12).log10()
}

/// Log-spaced subset of the spectrum in dB, for plotting.
fn plot_points(m: &MagnitudeSpectrum) -> Vec<(f64, f64)> {
    let grid = m.grid();
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut last = 0;
    for i in 0..=800 {
        let f = 20.0 * (grid.sample_rate() as f64 / 2.0 / 20.0).powf(i as f64 / 800.0);
        let k = grid.nearest_bin(f);
        if k > last || out.is_empty() {
            out.push((grid.frequency(k).max(1e-3), db(m.values()[k])));
            last = k;
        }
    }
    out
}

fn magnitude_plot(title: &str, curves: &[(&str, &MagnitudeSpectrum)]) -> String {
    LinePlot {
        title: title.to_owned(),
        x_label: "Frequency (Hz)".into(),
        y_label: "Magnitude (dB)".into(),
        log_x: true,
        x_categories: None,
        series: curves
            .iter()
            .map(|(name, m)| Series {
                name: (*name).to_owned(),
                points: plot_points(m),
            })
            .collect(),
    }
    .render()
}

fn write_filter(dir: &Path, filter: &InverseFilter, taps: usize) -> Result<()> {
    let fir = filter.to_fir(taps)?;
    write_magnitude_csv(&dir.join("inverse.csv"), &filter.gains)?;
    write_wav(
        &dir.join("inverse_fir.wav"),
        &fir.taps,
        filter.gains.grid().sample_rate(),
    )?;
    write_fir_csv(&dir.join("inverse_fir.csv"), &fir)?;
    Ok(())
}

fn band_report(m: &MagnitudeSpectrum) -> Result<String> {
    let mut s = String::new();
    for band in Band::ALL {
        let _ = write!(
            s,
            " {band}={:.4} dB",
            spectral_deviation(m, band.spec())?.s_d
        );
    }
    Ok(s)
}

pub fn prototype(args: &PrototypeArgs) -> Result<()> {
    let config = args.config.resolve()?;
    let files: Vec<ResponseFile> = response_files(&args.input, args.prefix.as_deref())?
        .into_iter()
        .filter(|f| f.source.is_none_or(|s| s == args.source))
        .collect();
    if files.is_empty() {
        return Err(CliError::Usage(format!(
            "no responses for source {} in {}",
            args.source.number(),
            args.input.display()
        )));
    }
    if args.strategy == Strategy::Weighted && args.coords.is_none() {
        return Err(CliError::Usage(
            "the weighted strategy requires --coords".into(),
        ));
    }

    let mut spectra = Vec::new();
    let mut grid: Option<FrequencyGrid> = None;
    for f in &files {
        let rir = read_wav(&f.path)?;
        let g = *grid.get_or_insert(FrequencyGrid::new(config.fft_size, rir.sample_rate())?);
        spectra.push(MagnitudeSpectrum::of_rir(&rir, g)?);
    }
    let grid = grid.expect("at least one response");
    let ids: Vec<&str> = files.iter().map(|f| f.receiver.as_str()).collect();
    let optimal_index = || -> Result<usize> {
        let id =
            optimal_of(ids.iter().copied(), ids[0], args.optimal.as_deref()).ok_or_else(|| {
                CliError::Usage("no optimal receiver (name it `r0` or pass --optimal)".into())
            })?;
        ids.iter()
            .position(|i| *i == id)
            .ok_or_else(|| CliError::Usage(format!("optimal receiver {id} not among the inputs")))
    };

    let proto = match args.strategy {
        Strategy::Local => local_prototype(&spectra[optimal_index()?]),
        Strategy::Unweighted => unweighted_prototype(&spectra)?,
        Strategy::Weighted => {
            let path = args.coords.as_deref().expect("checked above");
            let rows: BTreeMap<String, CoordinateRow> = read_coordinates_csv(path)?
                .into_iter()
                .map(|r| (r.receiver.clone(), r))
                .collect();
            let located = |id: &str| -> Result<(f64, f64)> {
                match rows.get(id) {
                    Some(CoordinateRow {
                        z_from_optimal: Some(z),
                        theta_deg: Some(t),
                        ..
                    }) => Ok((*z, t.to_radians())),
                    Some(_) => Err(CliError::Usage(format!(
                        "receiver {id} has no coordinates in {}",
                        path.display()
                    ))),
                    None => Err(CliError::Usage(format!(
                        "receiver {id} missing from {}",
                        path.display()
                    ))),
                }
            };
            let mut receivers = ids
                .iter()
                .map(|id| located(id))
                .collect::<Result<Vec<_>>>()?;
            if config.theta_reference == ThetaReference::Aim {
                let opt_theta = receivers[optimal_index()?].1;
                for r in &mut receivers {
                    r.1 = (r.1 - opt_theta).abs();
                }
            }
            let weights = combined_weights(&receivers, grid, &config.weighting(), &config.shm())?;
            weighted_prototype(&spectra, &weights)?
        }
    };

    let filter = invert(&proto.magnitude, config.beta, config.reg_mode)?;
    create_dir(&args.output_dir)?;
    write_magnitude_csv(&args.output_dir.join("prototype.csv"), &proto.magnitude)?;
    write_filter(&args.output_dir, &filter, config.taps)?;
    write_text(
        &args.output_dir.join("prototype.svg"),
        &magnitude_plot(
            &format!(
                "{} prototype, source {}",
                args.strategy,
                args.source.number()
            ),
            &[("prototype", &proto.magnitude), ("inverse", &filter.gains)],
        ),
    )?;
    println!(
        "{} prototype from {} responses; deviation{}",
        args.strategy,
        proto.receiver_count,
        band_report(&proto.magnitude)?
    );
    Ok(())
}

pub fn invert_cmd(args: &InvertArgs) -> Result<()> {
    let config = args.config.resolve()?;
    let magnitude = read_magnitude_csv(&args.input)?;
    let filter = invert(&magnitude, config.beta, config.reg_mode)?;
    create_dir(&args.output_dir)?;
    write_filter(&args.output_dir, &filter, config.taps)?;
    write_text(
        &args.output_dir.join("inverse.svg"),
        &magnitude_plot(
            "Inverse filter",
            &[("input", &magnitude), ("inverse", &filter.gains)],
        ),
    )?;
    let equalized = filter.apply_spectrum(&magnitude)?;
    println!("post-equalisation deviation{}", band_report(&equalized)?);
    Ok(())
}

pub fn evaluate(args: &EvaluateArgs) -> Result<()> {
    let config = args.config.resolve()?;
    let filter = args.filter.as_deref().map(read_magnitude_csv).transpose()?;
    let mut inputs = Vec::new();
    for p in &args.input {
        if p.is_dir() {
            let wavs = list_wavs(p)?;
            if wavs.is_empty() {
                return Err(CliError::Usage(format!(
                    "no WAV files found in {}",
                    p.display()
                )));
            }
            inputs.extend(wavs);
        } else {
            inputs.push(p.clone());
        }
    }

    let mut out = String::from("input,band,s_d_db\n");
    for path in &inputs {
        let is_csv = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        let spectrum = if is_csv {
            read_magnitude_csv(path)?
        } else {
            let rir = read_wav(path)?;
            let grid = match &filter {
                Some(f) => f.grid(),
                None => FrequencyGrid::new(config.fft_size, rir.sample_rate())?,
            };
            MagnitudeSpectrum::of_rir(&rir, grid)?
        };
        let spectrum = match &filter {
            Some(f) => {
                let gains = InverseFilter {
                    gains: f.clone(),
                    beta: 0.0,
                    mode: config.reg_mode,
                };
                gains.apply_spectrum(&spectrum)?
            }
            None => spectrum,
        };
        for band in Band::ALL {
            let s_d = spectral_deviation(&spectrum, band.spec())?.s_d;
            let _ = writeln!(out, "{},{band},{s_d:.6}", path.display());
        }
    }
    match &args.output {
        Some(p) => write_text(p, &out)?,
        None => print!("{out}"),
    }
    Ok(())
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let config = args.config.resolve()?;
    create_dir(&args.output_dir)?;
    let shm = config.shm();
    let mut positions = String::from("room,rep,receiver,x,y,z,z_from_optimal,base\n");
    let mut count = 0;
    for &room in &config.rooms {
        for rep in 0..config.repetitions {
            let s = generate_scenario(room, repetition_seed(config.seed, rep), &config)?;
            let mut points = vec![s.optimal];
            points.extend_from_slice(&s.external);
            if args.grid {
                points.extend_from_slice(&s.eval_grid);
            }
            let jobs: Vec<(usize, usize)> =
                (0..points.len()).flat_map(|r| [(r, 0), (r, 1)]).collect();
            jobs.par_iter()
                .map(|&(r, k)| -> Result<()> {
                    let rir = simulate_rir(&s.room, &s.sources[k], points[r], &shm)?;
                    let name = rir_filename(room, rep, k as u8 + 1, r);
                    write_rir(&args.output_dir.join(name), &rir)?;
                    Ok(())
                })
                .collect::<Result<Vec<()>>>()?;
            count += jobs.len();
            for (r, p) in points.iter().enumerate() {
                let _ = writeln!(
                    positions,
                    "{room},{rep},r{r},{},{},{},{},{}",
                    p.x,
                    p.y,
                    p.z,
                    p.distance(s.optimal),
                    s.base()
                );
            }
        }
    }
    write_text(&args.output_dir.join("positions.csv"), &positions)?;
    println!("wrote {count} responses to {}", args.output_dir.display());
    Ok(())
}

fn sweep_plot(title: &str, label: &str, rows: &[SweepRow], x: impl Fn(&SweepRow) -> f64) -> String {
    LinePlot {
        title: title.to_owned(),
        x_label: label.to_owned(),
        y_label: "Spectral deviation (dB)".into(),
        log_x: false,
        x_categories: Some(rows.iter().map(|r| format!("{}", x(r))).collect()),
        series: vec![
            Series {
                name: "Ref.".into(),
                points: rows
                    .iter()
                    .enumerate()
                    .map(|(i, r)| (i as f64, r.ref_sd))
                    .collect(),
            },
            Series {
                name: "Avg.".into(),
                points: rows
                    .iter()
                    .enumerate()
                    .map(|(i, r)| (i as f64, r.avg_sd))
                    .collect(),
            },
        ],
    }
    .render()
}

fn write_sweeps(dir: &Path, campaign: &Campaign, config: &ExperimentConfig) -> Result<()> {
    let sweep = campaign.sweep(&config.sweep.deltas, &config.sweep.zetas)?;
    write_text(&dir.join("sweep_delta.csv"), &sweep_csv(&sweep.delta_rows))?;
    write_text(&dir.join("sweep_zeta.csv"), &sweep_csv(&sweep.zeta_rows))?;
    write_text(
        &dir.join("sweep_delta.svg"),
        &sweep_plot(
            &format!("δ sweep (ζ = {})", config.zeta),
            "δ",
            &sweep.delta_rows,
            |r| r.delta,
        ),
    )?;
    write_text(
        &dir.join("sweep_zeta.svg"),
        &sweep_plot(
            &format!("ζ sweep (δ = {})", config.delta),
            "ζ",
            &sweep.zeta_rows,
            |r| r.zeta,
        ),
    )?;
    Ok(())
}

pub fn experiment(args: &ExperimentArgs) -> Result<()> {
    let config = args.config.resolve()?;
    create_dir(&args.output_dir)?;
    let campaign = Campaign::simulate(&config)?;
    let report = campaign.evaluate(&config.weighting())?;
    let dir = &args.output_dir;
    write_text(&dir.join("table1.csv"), &report.table_csv())?;
    write_text(&dir.join("ttest.csv"), &report.t_test_csv())?;

    let strategies: Vec<String> = EqStrategy::ALL.iter().map(|s| s.to_string()).collect();
    let series: Vec<(String, Vec<f64>)> = PositionClass::ALL
        .iter()
        .map(|&p| {
            (
                p.to_string(),
                EqStrategy::ALL
                    .iter()
                    .map(|&s| report.row(s, p, Band::Total).mean)
                    .collect(),
            )
        })
        .collect();
    write_text(
        &dir.join("table1.svg"),
        &bar_chart(
            "Total-band spectral deviation",
            "Spectral deviation (dB)",
            &strategies,
            &series,
        ),
    )?;
    write_sweeps(dir, &campaign, &config)?;

    for s in EqStrategy::ALL {
        println!(
            "{:<10} optimal {:>8.4} dB   grid {:>8.4} dB",
            s.as_str(),
            report.row(s, PositionClass::Optimal, Band::Total).mean,
            report.row(s, PositionClass::GridAverage, Band::Total).mean
        );
    }
    let t = report.t_test(PositionClass::Optimal, Band::Total);
    println!(
        "weighted vs unweighted at optimal: t = {:.4}, p = {:.3e}",
        t.t, t.p
    );
    Ok(())
}

pub fn sweep(args: &ExperimentArgs) -> Result<()> {
    let config = args.config.resolve()?;
    create_dir(&args.output_dir)?;
    let campaign = Campaign::simulate(&config)?;
    write_sweeps(&args.output_dir, &campaign, &config)
}
