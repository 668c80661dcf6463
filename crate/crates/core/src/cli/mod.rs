//! The `aerostack` command line: argument parsing and the six commands.
//!
//! Every command reads CSV inputs, writes its results to `--out` (written
//! to a temporary file, then renamed into place) and reports diagnostics on
//! stderr. Errors map to exit code 2 (input or configuration) or 3
//! (computation) through [`Error::exit_code`].

pub mod config;
pub mod report;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate, TimeDelta, Utc};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use serde::Serialize;

use crate::data::{
    format_timestamp, hourly_aggregate, join_hourly, parse_indoor_csv, parse_outdoor_csv, parse_timestamp,
    split_by_sensor, summary_stats, write_indoor_csv, write_outdoor_csv, HourlyRecord, OutdoorObservation,
    SensorReading,
};
use crate::error::{Error, Result};
use crate::evaluation::{
    loess_smooth, permutation_importance, plan_windows, r_squared, rmse, rolling_backtest, spearman,
    BacktestConfig, EvalModel, ImportanceEntry, ModelReport,
};
use crate::features::{sensor_matrices, SensorMatrix};
use crate::synth::{generate, Bushfire, SynthConfig};
pub use config::{Band, RunConfig, ThresholdBands, Thresholds};
use report::{render_html, ReportInput, ReportRow};

#[derive(Debug, Parser)]
#[command(name = "aerostack", version, about = "Indoor PM2.5 forecasting toolkit")]
pub struct Cli {
    /// JSON run configuration (features, models, stack, backtest, thresholds).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for model fitting, permutations and synthesis.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (directory for `synth`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Descriptive statistics of hourly PM2.5 per building.
    Stats {
        #[arg(long)]
        indoor: PathBuf,
    },
    /// Rolling-origin backtest of the benchmark models and the stack.
    Backtest(Inputs),
    /// Spearman correlation of hourly indoor and outdoor PM2.5 per building.
    Correlate(Inputs),
    /// Permutation importance for one fitted model.
    Importance(ImportanceArgs),
    /// Color-coded HTML report for one building and date range.
    Report(ReportArgs),
    /// Write a synthetic indoor.csv and outdoor.csv.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct Inputs {
    #[arg(long)]
    pub indoor: PathBuf,
    #[arg(long)]
    pub outdoor: PathBuf,
}

#[derive(Debug, Args)]
pub struct ImportanceArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    /// rf, gbt, svr, glm or deml.
    #[arg(long, default_value = "rf")]
    pub model: EvalModel,
    #[arg(long, default_value_t = 10)]
    pub n_perm: usize,
    /// Sensor to analyse; defaults to the first one in the file.
    #[arg(long)]
    pub sensor: Option<String>,
    /// Also write a bar chart here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Append an exact copy of the target as a feature (sanity check).
    #[arg(long)]
    pub inject_target_copy: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub indoor: PathBuf,
    #[arg(long)]
    pub outdoor: Option<PathBuf>,
    /// Defaults to the first building in the file.
    #[arg(long)]
    pub building: Option<String>,
    /// First day (YYYY-MM-DD) or instant (RFC 3339), inclusive.
    #[arg(long)]
    pub from: Option<String>,
    /// Last day (YYYY-MM-DD) or instant (RFC 3339), inclusive.
    #[arg(long)]
    pub to: Option<String>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 60)]
    pub n_days: u32,
    #[arg(long, default_value_t = 0.6)]
    pub alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    pub diurnal_amplitude: f64,
    #[arg(long, default_value_t = 0.8)]
    pub ar: f64,
    #[arg(long, default_value_t = 0.5)]
    pub noise_sd: f64,
    /// start_day:len_days:spike, e.g. 30:3:40.
    #[arg(long)]
    pub bushfire: Option<Bushfire>,
}

pub const TOP_FEATURES: usize = 15;

pub fn run(cli: &Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.stack.seed = seed;
    }
    let out = |default: &str| cli.out.clone().unwrap_or_else(|| PathBuf::from(default));
    match &cli.command {
        Command::Stats { indoor } => cmd_stats(indoor, &out("stats.csv")),
        Command::Backtest(i) => cmd_backtest(&i.indoor, &i.outdoor, &cfg, &out("backtest.json")),
        Command::Correlate(i) => cmd_correlate(&i.indoor, &i.outdoor, &out("correlate.csv")),
        Command::Importance(a) => cmd_importance(a, &cfg, &out("importance.csv")),
        Command::Report(a) => cmd_report(a, &cfg, &out("report.html")),
        Command::Synth(a) => {
            let synth = SynthConfig {
                seed: cli.seed.unwrap_or(SynthConfig::default().seed),
                n_days: a.n_days,
                outdoor_coupling: a.alpha,
                diurnal_amplitude: a.diurnal_amplitude,
                ar_coefficient: a.ar,
                noise_sd: a.noise_sd,
                bushfire: a.bushfire,
                ..SynthConfig::default()
            };
            cmd_synth(&synth, &out("."))
        }
    }
}

/// Writes `bytes` to a temporary file next to `path`, then renames it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    info!("wrote {}", path.display());
    Ok(())
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn hourly_by_sensor(readings: Vec<SensorReading>) -> Result<Vec<Vec<HourlyRecord>>> {
    split_by_sensor(readings)
        .into_iter()
        .map(|(_, r)| hourly_aggregate(&r))
        .collect()
}

fn nonempty<T>(v: Vec<T>, what: &'static str) -> Result<Vec<T>> {
    if v.is_empty() {
        Err(Error::EmptyInput(what))
    } else {
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsRow {
    pub building_id: String,
    pub start_time: String,
    pub end_time: String,
    pub sensors: usize,
    pub study_days: usize,
    pub study_hours: usize,
    pub min: f64,
    pub max: f64,
    pub median: f64,
    pub iqr: f64,
    pub mean: f64,
    pub sd: f64,
}

/// One row per building over the sensor-hours that have PM2.5. Study days
/// count distinct UTC dates; study hours count sensor-hours.
pub fn stats_table(readings: Vec<SensorReading>) -> Result<Vec<StatsRow>> {
    let readings = nonempty(readings, "indoor file has no rows")?;
    let mut per_building: BTreeMap<String, Vec<HourlyRecord>> = BTreeMap::new();
    for hours in hourly_by_sensor(readings)? {
        for h in hours.into_iter().filter(|h| h.pm25.is_some()) {
            per_building.entry(h.building_id.clone()).or_default().push(h);
        }
    }
    per_building
        .into_iter()
        .map(|(building_id, hours)| {
            let s = summary_stats(&hours.iter().map(|h| h.pm25).collect::<Vec<_>>())?;
            let start = hours.iter().map(|h| h.timestamp).min().expect("non-empty");
            let end = hours.iter().map(|h| h.timestamp).max().expect("non-empty");
            let sensors: BTreeSet<&str> = hours.iter().map(|h| h.sensor_id.as_str()).collect();
            let days: BTreeSet<NaiveDate> = hours.iter().map(|h| h.timestamp.date_naive()).collect();
            Ok(StatsRow {
                start_time: format_timestamp(&start),
                end_time: format_timestamp(&end),
                sensors: sensors.len(),
                study_days: days.len(),
                study_hours: hours.len(),
                building_id,
                min: s.min,
                max: s.max,
                median: s.median,
                iqr: s.iqr,
                mean: s.mean,
                sd: s.sd,
            })
        })
        .collect()
}

pub fn cmd_stats(indoor: &Path, out: &Path) -> Result<()> {
    let rows = stats_table(parse_indoor_csv(indoor)?)?;
    if rows.is_empty() {
        return Err(Error::EmptyInput("no PM2.5 values in the indoor file"));
    }
    write_atomic(out, &csv_bytes(&rows)?)
}

/// Per-sensor backtest reports, flattened in sensor order then model order.
pub fn backtest_reports(
    indoor: Vec<SensorReading>,
    outdoor: &[OutdoorObservation],
    cfg: &RunConfig,
) -> Result<Vec<(String, ModelReport)>> {
    let sensors = sensor_matrices(nonempty(indoor, "indoor file has no rows")?, outdoor, &cfg.features)?;
    let learners = cfg.backtest.learners(&cfg.stack, &cfg.models);
    let mut out = Vec::new();
    for SensorMatrix {
        sensor_id,
        building_id,
        matrix,
    } in sensors
    {
        info!("backtesting sensor {sensor_id} ({} rows)", matrix.n_rows());
        let report = rolling_backtest(&matrix, &learners, &cfg.backtest)?;
        for mut m in report.models {
            m.sensor_id = Some(sensor_id.clone());
            out.push((building_id.clone(), m));
        }
    }
    Ok(out)
}

/// Table-2 style rows: per building, pooled R² and RMSE of every model over
/// all of its sensors' test hours, and `*` when the stack is strictly best.
pub fn performance_table(reports: &[(String, ModelReport)], models: &[EvalModel]) -> Result<Vec<Vec<String>>> {
    let mut header = vec!["building_id".to_string(), "test_hours".to_string()];
    for m in models {
        header.push(format!("{m}_r2"));
        header.push(format!("{m}_rmse"));
    }
    let has_deml = models.contains(&EvalModel::Deml);
    if has_deml {
        header.push("deml_best".into());
    }
    let buildings: BTreeSet<&str> = reports.iter().map(|(b, _)| b.as_str()).collect();
    let mut rows = vec![header];
    for b in buildings {
        let mut row = vec![b.to_string()];
        let mut scores = Vec::new();
        let mut test_hours = 0;
        for m in models {
            let (mut pred, mut obs) = (Vec::new(), Vec::new());
            for (_, r) in reports.iter().filter(|(rb, r)| rb == b && r.model == m.as_str()) {
                pred.extend(r.predictions());
                obs.extend(r.observations());
            }
            test_hours = obs.len();
            let e = rmse(&pred, &obs)?;
            scores.push((*m, r_squared(&pred, &obs)?, e));
        }
        row.push(test_hours.to_string());
        for (_, r2, e) in &scores {
            row.push(r2.to_string());
            row.push(e.to_string());
        }
        if has_deml {
            let deml = scores.iter().find(|s| s.0 == EvalModel::Deml).expect("deml scored").2;
            let best = scores.iter().filter(|s| s.0 != EvalModel::Deml).all(|s| deml < s.2);
            row.push(if best { "*".into() } else { String::new() });
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn cmd_backtest(indoor: &Path, outdoor: &Path, cfg: &RunConfig, out: &Path) -> Result<()> {
    let indoor = parse_indoor_csv(indoor)?;
    let outdoor = parse_outdoor_csv(outdoor)?;
    let reports = backtest_reports(indoor, &outdoor, cfg)?;
    let models: Vec<&ModelReport> = reports.iter().map(|(_, m)| m).collect();
    let mut json = serde_json::to_vec_pretty(&models)?;
    json.push(b'\n');
    let (json_path, csv_path) = if out.extension().is_some_and(|e| e == "csv") {
        (out.with_extension("json"), out.to_path_buf())
    } else {
        (out.to_path_buf(), out.with_extension("csv"))
    };
    let table = performance_table(&reports, &cfg.backtest.models)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &table {
        w.write_record(r)?;
    }
    let table = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    write_atomic(&json_path, &json)?;
    write_atomic(&csv_path, &table)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationRow {
    pub building_id: String,
    pub matched_hours: usize,
    pub indoor_mean: f64,
    pub indoor_sd: f64,
    pub outdoor_mean: f64,
    pub outdoor_sd: f64,
    pub spearman_r: f64,
}

/// Building-level hourly means of one indoor field across sensors.
fn building_hourly_means(
    hours: &[Vec<HourlyRecord>],
    field: impl Fn(&HourlyRecord) -> Option<f64>,
) -> BTreeMap<(String, DateTime<Utc>), f64> {
    let mut acc: BTreeMap<(String, DateTime<Utc>), (f64, usize)> = BTreeMap::new();
    for h in hours.iter().flatten() {
        if let Some(v) = field(h) {
            let e = acc.entry((h.building_id.clone(), h.timestamp)).or_default();
            e.0 += v;
            e.1 += 1;
        }
    }
    acc.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect()
}

/// Spearman correlation between the building's hourly mean indoor PM2.5
/// and outdoor PM2.5 at the same hour. Buildings with fewer than two
/// matched hours are left out with a warning.
pub fn correlation_table(indoor: Vec<SensorReading>, outdoor: &[OutdoorObservation]) -> Result<Vec<CorrelationRow>> {
    let indoor = nonempty(indoor, "indoor file has no rows")?;
    let buildings: BTreeSet<String> = indoor.iter().map(|r| r.building_id.clone()).collect();
    let means = building_hourly_means(&hourly_by_sensor(indoor)?, |h| h.pm25);
    let out: BTreeMap<(&str, DateTime<Utc>), f64> = outdoor
        .iter()
        .filter_map(|o| o.pm25_out.map(|v| ((o.building_id.as_str(), o.timestamp), v)))
        .collect();
    let mut rows = Vec::new();
    for b in buildings {
        let pairs: Vec<(f64, f64)> = means
            .iter()
            .filter(|((mb, _), _)| *mb == b)
            .filter_map(|((_, t), &i)| out.get(&(b.as_str(), *t)).map(|&o| (i, o)))
            .collect();
        if pairs.len() < 2 {
            warn!("building {b}: {} matched indoor/outdoor hours, row omitted", pairs.len());
            continue;
        }
        let (xi, xo): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let si = summary_stats(&xi.iter().map(|&v| Some(v)).collect::<Vec<_>>())?;
        let so = summary_stats(&xo.iter().map(|&v| Some(v)).collect::<Vec<_>>())?;
        rows.push(CorrelationRow {
            building_id: b,
            matched_hours: xi.len(),
            indoor_mean: si.mean,
            indoor_sd: si.sd,
            outdoor_mean: so.mean,
            outdoor_sd: so.sd,
            spearman_r: spearman(&xi, &xo)?,
        });
    }
    Ok(rows)
}

pub fn cmd_correlate(indoor: &Path, outdoor: &Path, out: &Path) -> Result<()> {
    let rows = correlation_table(parse_indoor_csv(indoor)?, &parse_outdoor_csv(outdoor)?)?;
    write_atomic(out, &csv_bytes(&rows)?)
}

/// Fits `model` on the rows before the backtest test period of one sensor
/// and ranks the features by permutation importance on the test rows.
pub fn importance_ranking(
    sensors: Vec<SensorMatrix>,
    args: &ImportanceArgs,
    cfg: &RunConfig,
) -> Result<Vec<ImportanceEntry>> {
    let sensor = match &args.sensor {
        Some(id) => sensors
            .into_iter()
            .find(|s| &s.sensor_id == id)
            .ok_or_else(|| Error::InvalidParam(format!("sensor {id:?} not found")))?,
        None => sensors.into_iter().next().ok_or(Error::EmptyInput("indoor file has no sensors"))?,
    };
    let mut x = sensor.matrix;
    if args.inject_target_copy {
        let y = x.target().to_vec();
        x = x.with_appended_column("target_copy", &y)?;
    }
    let plan = plan_windows(x.timestamps(), &cfg.backtest)?;
    if plan.test_start == 0 {
        return Err(Error::EmptyInput("no training rows before the test period"));
    }
    let train = x.select_rows(&(0..plan.test_start).collect::<Vec<_>>());
    let test = x.select_rows(&(plan.test_start..x.n_rows()).collect::<Vec<_>>());
    let learner = BacktestConfig::learner(args.model, &cfg.stack, &cfg.models);
    let model = learner.fit(&train)?;
    permutation_importance(model.as_ref(), &test, args.n_perm, cfg.stack.seed)
}

pub fn cmd_importance(args: &ImportanceArgs, cfg: &RunConfig, out: &Path) -> Result<()> {
    let sensors = sensor_matrices(
        parse_indoor_csv(&args.inputs.indoor)?,
        &parse_outdoor_csv(&args.inputs.outdoor)?,
        &cfg.features,
    )?;
    let mut entries = importance_ranking(sensors, args, cfg)?;
    entries.truncate(TOP_FEATURES);
    write_atomic(out, &csv_bytes(&entries)?)?;
    if let Some(svg) = &args.svg {
        write_atomic(svg, report::importance_svg(&entries).as_bytes())?;
    }
    Ok(())
}

/// Parses a report bound. A bare date covers the whole day, so `to` moves
/// to the following midnight; the returned bound is exclusive for `to`.
pub fn parse_bound(s: &str, is_end: bool) -> Result<DateTime<Utc>> {
    if let Ok(d) = NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d") {
        let day = if is_end { d.succ_opt().unwrap_or(d) } else { d };
        return Ok(day.and_hms_opt(0, 0, 0).expect("midnight exists").and_utc());
    }
    let t = parse_timestamp(s, 0)?;
    Ok(if is_end { t + TimeDelta::seconds(1) } else { t })
}

/// Building-level hourly means of the report parameters within `[from, to)`.
pub fn report_rows(
    indoor: Vec<SensorReading>,
    outdoor: &[OutdoorObservation],
    building: &str,
    from: Option<DateTime<Utc>>,
    to: Option<DateTime<Utc>>,
) -> Result<Vec<ReportRow>> {
    let readings: Vec<SensorReading> = indoor.into_iter().filter(|r| r.building_id == building).collect();
    let hours: Vec<Vec<HourlyRecord>> = hourly_by_sensor(readings)?
        .into_iter()
        .map(|h| join_hourly(&h, outdoor))
        .collect();
    let in_range = |t: &DateTime<Utc>| from.is_none_or(|f| *t >= f) && to.is_none_or(|e| *t < e);
    let mut rows: BTreeMap<DateTime<Utc>, [Option<f64>; 6]> = BTreeMap::new();
    for (k, p) in Thresholds::PARAMETERS.iter().enumerate() {
        let means = building_hourly_means(&hours, |h| h.field(p).ok().flatten());
        for ((_, t), v) in means {
            if in_range(&t) {
                rows.entry(t).or_default()[k] = Some(v);
            }
        }
    }
    for t in hours.iter().flatten().map(|h| h.timestamp).filter(|t| in_range(t)) {
        rows.entry(t).or_default();
    }
    Ok(rows
        .into_iter()
        .map(|(timestamp, values)| ReportRow { timestamp, values })
        .collect())
}

pub fn cmd_report(args: &ReportArgs, cfg: &RunConfig, out: &Path) -> Result<()> {
    let indoor = parse_indoor_csv(&args.indoor)?;
    let outdoor = match &args.outdoor {
        Some(p) => parse_outdoor_csv(p)?,
        None => Vec::new(),
    };
    let building = match &args.building {
        Some(b) => b.clone(),
        None => indoor
            .first()
            .map(|r| r.building_id.clone())
            .ok_or(Error::EmptyInput("indoor file has no rows"))?,
    };
    let from = args.from.as_deref().map(|s| parse_bound(s, false)).transpose()?;
    let to = args.to.as_deref().map(|s| parse_bound(s, true)).transpose()?;
    let rows = report_rows(indoor, &outdoor, &building, from, to)?;
    if rows.is_empty() {
        warn!("no data for building {building} in the selected range");
    }

    let pm: Vec<(DateTime<Utc>, f64)> = rows.iter().filter_map(|r| r.values[0].map(|v| (r.timestamp, v))).collect();
    let trend: Vec<(DateTime<Utc>, f64, f64)> = if pm.is_empty() {
        Vec::new()
    } else {
        let t0 = pm[0].0;
        let x: Vec<f64> = pm.iter().map(|(t, _)| (*t - t0).num_seconds() as f64 / 3600.0).collect();
        let y: Vec<f64> = pm.iter().map(|p| p.1).collect();
        let fit = loess_smooth(&x, &y, 0.2)?;
        pm.iter().zip(fit).map(|(&(t, v), f)| (t, v, f)).collect()
    };
    let html = render_html(&ReportInput {
        building_id: &building,
        from,
        to: to.map(|t| t - TimeDelta::seconds(1)),
        rows: &rows,
        thresholds: &cfg.thresholds,
        trend: &trend,
    });
    write_atomic(out, html.as_bytes())
}

pub fn cmd_synth(cfg: &SynthConfig, out_dir: &Path) -> Result<()> {
    let data = generate(cfg)?;
    std::fs::create_dir_all(out_dir)?;
    let mut indoor = Vec::new();
    write_indoor_csv(&mut indoor, &data.indoor)?;
    let mut outdoor = Vec::new();
    write_outdoor_csv(&mut outdoor, &data.outdoor)?;
    write_atomic(&out_dir.join("indoor.csv"), &indoor)?;
    write_atomic(&out_dir.join("outdoor.csv"), &outdoor)
}
