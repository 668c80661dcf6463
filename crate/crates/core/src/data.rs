//! Sensor and outdoor record types, CSV ingestion, hourly aggregation and
//! the indoor/outdoor join.
//!
//! Indoor CSV columns: `timestamp,sensor_id,building_id,lat,lon,pm25,pm10,tvoc,temp_c,rh_pct`.
//! Outdoor CSV columns: `timestamp,building_id,pm25_out,t2m_c,d2m_c,wind10m_ms,sp_pa,ssrd_wm2,tp_mm`.
//!
//! Timestamps are ISO-8601 UTC. An empty cell or `NA` (any case) marks a
//! missing value; so does a cell that fails to parse as a number or a value
//! outside its physical range.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};
use std::path::Path;

use chrono::{DateTime, DurationRound, TimeDelta, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const INDOOR_COLUMNS: [&str; 10] = [
    "timestamp",
    "sensor_id",
    "building_id",
    "lat",
    "lon",
    "pm25",
    "pm10",
    "tvoc",
    "temp_c",
    "rh_pct",
];

pub const OUTDOOR_COLUMNS: [&str; 9] = [
    "timestamp",
    "building_id",
    "pm25_out",
    "t2m_c",
    "d2m_c",
    "wind10m_ms",
    "sp_pa",
    "ssrd_wm2",
    "tp_mm",
];

/// One raw indoor sensor sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorReading {
    pub timestamp: DateTime<Utc>,
    pub sensor_id: String,
    pub building_id: String,
    pub lat: Option<f64>,
    pub lon: Option<f64>,
    pub pm25: Option<f64>,
    pub pm10: Option<f64>,
    pub tvoc: Option<f64>,
    pub temp_c: Option<f64>,
    pub rh_pct: Option<f64>,
}

/// One hourly outdoor observation for a building.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutdoorObservation {
    pub timestamp: DateTime<Utc>,
    pub building_id: String,
    pub pm25_out: Option<f64>,
    pub t2m_c: Option<f64>,
    pub d2m_c: Option<f64>,
    pub wind10m_ms: Option<f64>,
    pub sp_pa: Option<f64>,
    pub ssrd_wm2: Option<f64>,
    pub tp_mm: Option<f64>,
}

/// Joined sensor-hour: hourly means of the indoor readings plus the
/// matching outdoor covariates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourlyRecord {
    pub timestamp: DateTime<Utc>,
    pub sensor_id: String,
    pub building_id: String,
    pub lat: Option<f64>,
    pub lon: Option<f64>,
    pub pm25: Option<f64>,
    pub pm10: Option<f64>,
    pub tvoc: Option<f64>,
    pub temp_c: Option<f64>,
    pub rh_pct: Option<f64>,
    pub pm25_out: Option<f64>,
    pub t2m_c: Option<f64>,
    pub d2m_c: Option<f64>,
    pub wind10m_ms: Option<f64>,
    pub sp_pa: Option<f64>,
    pub ssrd_wm2: Option<f64>,
    pub tp_mm: Option<f64>,
}

impl HourlyRecord {
    /// Names accepted by [`HourlyRecord::field`].
    pub const NUMERIC_FIELDS: [&'static str; 14] = [
        "lat",
        "lon",
        "pm25",
        "pm10",
        "tvoc",
        "temp_c",
        "rh_pct",
        "pm25_out",
        "t2m_c",
        "d2m_c",
        "wind10m_ms",
        "sp_pa",
        "ssrd_wm2",
        "tp_mm",
    ];

    /// Numeric field by column name. `Err` for names that are not numeric fields.
    pub fn field(&self, name: &str) -> Result<Option<f64>> {
        Ok(match name {
            "lat" => self.lat,
            "lon" => self.lon,
            "pm25" => self.pm25,
            "pm10" => self.pm10,
            "tvoc" => self.tvoc,
            "temp_c" => self.temp_c,
            "rh_pct" => self.rh_pct,
            "pm25_out" => self.pm25_out,
            "t2m_c" => self.t2m_c,
            "d2m_c" => self.d2m_c,
            "wind10m_ms" => self.wind10m_ms,
            "sp_pa" => self.sp_pa,
            "ssrd_wm2" => self.ssrd_wm2,
            "tp_mm" => self.tp_mm,
            other => return Err(Error::UnknownColumn(other.to_string())),
        })
    }

    fn clear_outdoor(&mut self) {
        self.pm25_out = None;
        self.t2m_c = None;
        self.d2m_c = None;
        self.wind10m_ms = None;
        self.sp_pa = None;
        self.ssrd_wm2 = None;
        self.tp_mm = None;
    }

    fn set_outdoor(&mut self, obs: &OutdoorObservation) {
        self.pm25_out = obs.pm25_out;
        self.t2m_c = obs.t2m_c;
        self.d2m_c = obs.d2m_c;
        self.wind10m_ms = obs.wind10m_ms;
        self.sp_pa = obs.sp_pa;
        self.ssrd_wm2 = obs.ssrd_wm2;
        self.tp_mm = obs.tp_mm;
    }
}

/// Table-1 style descriptive statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n: usize,
    pub min: f64,
    pub max: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub iqr: f64,
    pub mean: f64,
    pub sd: f64,
}

pub fn is_missing_token(cell: &str) -> bool {
    let cell = cell.trim();
    cell.is_empty() || cell.eq_ignore_ascii_case("na")
}

fn parse_cell(cell: &str) -> Option<f64> {
    if is_missing_token(cell) {
        return None;
    }
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

fn in_range(v: Option<f64>, lo: f64, hi: f64) -> Option<f64> {
    v.filter(|x| (lo..=hi).contains(x))
}

fn nonneg(v: Option<f64>) -> Option<f64> {
    v.filter(|x| *x >= 0.0)
}

pub fn parse_timestamp(value: &str, row: usize) -> Result<DateTime<Utc>> {
    DateTime::parse_from_rfc3339(value.trim())
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| Error::BadTimestamp {
            row,
            value: value.to_string(),
            reason: e.to_string(),
        })
}

pub fn format_timestamp(t: &DateTime<Utc>) -> String {
    t.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

pub fn floor_hour(t: DateTime<Utc>) -> DateTime<Utc> {
    t.duration_trunc(TimeDelta::hours(1))
        .expect("hour truncation is in range for any parsed timestamp")
}

/// Maps each required column to its index, or lists the missing ones.
fn column_index(headers: &csv::StringRecord, required: &[&str]) -> Result<Vec<usize>> {
    let position: HashMap<&str, usize> = headers
        .iter()
        .enumerate()
        .map(|(i, h)| (h.trim(), i))
        .collect();
    let missing: Vec<String> = required
        .iter()
        .filter(|c| !position.contains_key(*c))
        .map(|c| c.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::SchemaMismatch { missing });
    }
    Ok(required.iter().map(|c| position[c]).collect())
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
        _ => Error::Io(e),
    })
}

pub fn parse_indoor_csv(path: impl AsRef<Path>) -> Result<Vec<SensorReading>> {
    read_indoor_csv(open(path.as_ref())?)
}

pub fn read_indoor_csv<R: Read>(reader: R) -> Result<Vec<SensorReading>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let idx = column_index(rdr.headers()?, &INDOOR_COLUMNS)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let cell = |k: usize| rec.get(idx[k]).unwrap_or("");
        let num = |k: usize| parse_cell(cell(k));
        out.push(SensorReading {
            timestamp: parse_timestamp(cell(0), i + 1)?,
            sensor_id: cell(1).to_string(),
            building_id: cell(2).to_string(),
            lat: in_range(num(3), -90.0, 90.0),
            lon: in_range(num(4), -180.0, 180.0),
            pm25: nonneg(num(5)),
            pm10: nonneg(num(6)),
            tvoc: nonneg(num(7)),
            temp_c: num(8),
            rh_pct: in_range(num(9), 0.0, 100.0),
        });
    }
    Ok(out)
}

pub fn parse_outdoor_csv(path: impl AsRef<Path>) -> Result<Vec<OutdoorObservation>> {
    read_outdoor_csv(open(path.as_ref())?)
}

pub fn read_outdoor_csv<R: Read>(reader: R) -> Result<Vec<OutdoorObservation>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let idx = column_index(rdr.headers()?, &OUTDOOR_COLUMNS)?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let cell = |k: usize| rec.get(idx[k]).unwrap_or("");
        let num = |k: usize| parse_cell(cell(k));
        let timestamp = parse_timestamp(cell(0), i + 1)?;
        if floor_hour(timestamp) != timestamp {
            return Err(Error::BadTimestamp {
                row: i + 1,
                value: cell(0).to_string(),
                reason: "outdoor timestamps must be hour-aligned".into(),
            });
        }
        out.push(OutdoorObservation {
            timestamp,
            building_id: cell(1).to_string(),
            pm25_out: nonneg(num(2)),
            t2m_c: num(3),
            d2m_c: num(4),
            wind10m_ms: nonneg(num(5)),
            sp_pa: nonneg(num(6)),
            ssrd_wm2: num(7),
            tp_mm: nonneg(num(8)),
        });
    }
    Ok(out)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "NA".into())
}

pub fn write_indoor_csv<W: Write>(writer: W, readings: &[SensorReading]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(INDOOR_COLUMNS)?;
    for r in readings {
        w.write_record([
            format_timestamp(&r.timestamp),
            r.sensor_id.clone(),
            r.building_id.clone(),
            fmt_opt(r.lat),
            fmt_opt(r.lon),
            fmt_opt(r.pm25),
            fmt_opt(r.pm10),
            fmt_opt(r.tvoc),
            fmt_opt(r.temp_c),
            fmt_opt(r.rh_pct),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_outdoor_csv<W: Write>(writer: W, obs: &[OutdoorObservation]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(OUTDOOR_COLUMNS)?;
    for o in obs {
        w.write_record([
            format_timestamp(&o.timestamp),
            o.building_id.clone(),
            fmt_opt(o.pm25_out),
            fmt_opt(o.t2m_c),
            fmt_opt(o.d2m_c),
            fmt_opt(o.wind10m_ms),
            fmt_opt(o.sp_pa),
            fmt_opt(o.ssrd_wm2),
            fmt_opt(o.tp_mm),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Default, Clone, Copy)]
struct MeanAcc {
    sum: f64,
    n: usize,
}

impl MeanAcc {
    fn push(&mut self, v: Option<f64>) {
        if let Some(v) = v {
            self.sum += v;
            self.n += 1;
        }
    }

    fn mean(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum / self.n as f64)
    }
}

/// Averages one sensor's readings into hourly records (indoor fields only).
///
/// Hours without readings are left out, so gaps survive. Output is sorted
/// by timestamp.
pub fn hourly_aggregate(readings: &[SensorReading]) -> Result<Vec<HourlyRecord>> {
    let Some(first) = readings.first() else {
        return Ok(Vec::new());
    };
    if let Some(other) = readings.iter().find(|r| r.sensor_id != first.sensor_id) {
        return Err(Error::MixedSensors(
            first.sensor_id.clone(),
            other.sensor_id.clone(),
        ));
    }

    let mut hours: BTreeMap<DateTime<Utc>, (String, [MeanAcc; 7])> = BTreeMap::new();
    for r in readings {
        let (_, acc) = hours
            .entry(floor_hour(r.timestamp))
            .or_insert_with(|| (r.building_id.clone(), [MeanAcc::default(); 7]));
        for (a, v) in acc
            .iter_mut()
            .zip([r.lat, r.lon, r.pm25, r.pm10, r.tvoc, r.temp_c, r.rh_pct])
        {
            a.push(v);
        }
    }

    Ok(hours
        .into_iter()
        .map(|(timestamp, (building_id, acc))| HourlyRecord {
            timestamp,
            sensor_id: first.sensor_id.clone(),
            building_id,
            lat: acc[0].mean(),
            lon: acc[1].mean(),
            pm25: acc[2].mean(),
            pm10: acc[3].mean(),
            tvoc: acc[4].mean(),
            temp_c: acc[5].mean(),
            rh_pct: acc[6].mean(),
            pm25_out: None,
            t2m_c: None,
            d2m_c: None,
            wind10m_ms: None,
            sp_pa: None,
            ssrd_wm2: None,
            tp_mm: None,
        })
        .collect())
}

/// Left join of hourly indoor records onto outdoor observations keyed by
/// `(building_id, timestamp)`. Unmatched indoor hours keep missing outdoor
/// fields; unmatched outdoor hours are dropped.
pub fn join_hourly(indoor: &[HourlyRecord], outdoor: &[OutdoorObservation]) -> Vec<HourlyRecord> {
    let mut lookup: HashMap<(&str, DateTime<Utc>), &OutdoorObservation> = HashMap::new();
    for o in outdoor {
        lookup.entry((o.building_id.as_str(), o.timestamp)).or_insert(o);
    }
    indoor
        .iter()
        .map(|rec| {
            let mut joined = rec.clone();
            match lookup.get(&(rec.building_id.as_str(), rec.timestamp)) {
                Some(obs) => joined.set_outdoor(obs),
                None => joined.clear_outdoor(),
            }
            joined
        })
        .collect()
}

/// Groups readings per sensor, preserving first-seen order of sensors.
pub fn split_by_sensor(readings: Vec<SensorReading>) -> Vec<(String, Vec<SensorReading>)> {
    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, Vec<SensorReading>> = HashMap::new();
    for r in readings {
        if !groups.contains_key(&r.sensor_id) {
            order.push(r.sensor_id.clone());
        }
        groups.entry(r.sensor_id.clone()).or_default().push(r);
    }
    order
        .into_iter()
        .map(|id| {
            let rows = groups.remove(&id).unwrap_or_default();
            (id, rows)
        })
        .collect()
}

/// Linear-interpolation quantile of sorted data (`h = (n-1)p`).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Descriptive statistics of the present values; `None` entries are skipped.
pub fn summary_stats(values: &[Option<f64>]) -> Result<SummaryStats> {
    let mut v: Vec<f64> = values.iter().flatten().copied().collect();
    if v.is_empty() {
        return Err(Error::EmptyInput("no values after removing missing cells"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("summary input"));
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let mean = v.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let q1 = quantile_sorted(&v, 0.25);
    let q3 = quantile_sorted(&v, 0.75);
    Ok(SummaryStats {
        n,
        min: v[0],
        max: v[n - 1],
        q1,
        median: quantile_sorted(&v, 0.5),
        q3,
        iqr: q3 - q1,
        mean,
        sd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn ts(h: u32, m: u32) -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2020, 3, 16, h, m, 0).unwrap()
    }

    fn reading(t: DateTime<Utc>, pm25: Option<f64>) -> SensorReading {
        SensorReading {
            timestamp: t,
            sensor_id: "S1".into(),
            building_id: "B1".into(),
            lat: Some(-35.3),
            lon: Some(149.1),
            pm25,
            pm10: pm25.map(|v| v * 1.5),
            tvoc: Some(100.0),
            temp_c: Some(21.0),
            rh_pct: Some(45.0),
        }
    }

    #[test]
    fn parses_well_formed_rows() {
        let text = "timestamp,sensor_id,building_id,lat,lon,pm25,pm10,tvoc,temp_c,rh_pct\n\
                    2020-03-16T14:00:00Z,S1,B1,-35.3,149.1,1.5,2.5,120,21.5,40\n\
                    2020-03-16T14:10:00Z,S1,B1,-35.3,149.1,1.7,2.9,118,21.4,41\n";
        let rows = read_indoor_csv(text.as_bytes()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].timestamp, ts(14, 0));
        assert_eq!(rows[0].sensor_id, "S1");
        assert_eq!(rows[0].pm25, Some(1.5));
        assert_eq!(rows[1].tvoc, Some(118.0));
        assert_eq!(rows[1].rh_pct, Some(41.0));
    }

    #[test]
    fn header_only_is_empty() {
        let text = INDOOR_COLUMNS.join(",") + "\n";
        assert!(read_indoor_csv(text.as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn na_cell_is_missing() {
        let text = "timestamp,sensor_id,building_id,lat,lon,pm25,pm10,tvoc,temp_c,rh_pct\n\
                    2020-03-16T14:00:00Z,S1,B1,-35.3,149.1,na,2.5,,21.5,40\n";
        let rows = read_indoor_csv(text.as_bytes()).unwrap();
        assert_eq!(rows[0].pm25, None);
        assert_eq!(rows[0].tvoc, None);
        assert_eq!(rows[0].pm10, Some(2.5));
        assert_eq!(rows[0].lat, Some(-35.3));
    }

    #[test]
    fn missing_columns_are_listed() {
        let text = "timestamp,sensor_id,building_id,lat,lon,pm25\n";
        match read_indoor_csv(text.as_bytes()) {
            Err(Error::SchemaMismatch { missing }) => {
                assert_eq!(missing, vec!["pm10", "tvoc", "temp_c", "rh_pct"])
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_timestamp_reports_row() {
        let text = "timestamp,sensor_id,building_id,lat,lon,pm25,pm10,tvoc,temp_c,rh_pct\n\
                    2020-03-16T14:00:00Z,S1,B1,-35.3,149.1,1,2,3,4,5\n\
                    16/03/2020 14:00,S1,B1,-35.3,149.1,1,2,3,4,5\n";
        match read_indoor_csv(text.as_bytes()) {
            Err(Error::BadTimestamp { row, .. }) => assert_eq!(row, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_file() {
        assert!(matches!(
            parse_indoor_csv("/nonexistent/indoor.csv"),
            Err(Error::MissingFile(_))
        ));
    }

    #[test]
    fn out_of_range_values_become_missing() {
        let text = "timestamp,sensor_id,building_id,lat,lon,pm25,pm10,tvoc,temp_c,rh_pct\n\
                    2020-03-16T14:00:00Z,S1,B1,-95,149.1,-1,2,3,4,120\n";
        let r = &read_indoor_csv(text.as_bytes()).unwrap()[0];
        assert_eq!((r.lat, r.pm25, r.rh_pct), (None, None, None));
    }

    #[test]
    fn outdoor_requires_hour_alignment() {
        let text = OUTDOOR_COLUMNS.join(",") + "\n2020-03-16T14:30:00Z,B1,5,20,10,2,101000,0,0\n";
        assert!(matches!(
            read_outdoor_csv(text.as_bytes()),
            Err(Error::BadTimestamp { row: 1, .. })
        ));
    }

    #[test]
    fn hourly_mean_of_two() {
        let out = hourly_aggregate(&[
            reading(ts(10, 5), Some(5.0)),
            reading(ts(10, 40), Some(7.0)),
        ])
        .unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].timestamp, ts(10, 0));
        assert_eq!(out[0].pm25, Some(6.0));
    }

    #[test]
    fn hourly_gap_preserved() {
        let out = hourly_aggregate(&[
            reading(ts(12, 5), Some(1.0)),
            reading(ts(10, 5), Some(1.0)),
        ])
        .unwrap();
        let hours: Vec<_> = out.iter().map(|r| r.timestamp).collect();
        assert_eq!(hours, vec![ts(10, 0), ts(12, 0)]);
    }

    #[test]
    fn hourly_mean_of_three() {
        let out = hourly_aggregate(&[
            reading(ts(9, 0), Some(1.0)),
            reading(ts(9, 20), Some(2.0)),
            reading(ts(9, 59), Some(4.0)),
            reading(ts(9, 30), None),
        ])
        .unwrap();
        let expected = (1.0 + 2.0 + 4.0) / 3.0;
        assert!((out[0].pm25.unwrap() - expected).abs() < 1e-12);
        assert!((out[0].pm25.unwrap() - 2.333_333_333_333).abs() < 1e-9);
    }

    #[test]
    fn hourly_rejects_mixed_sensors() {
        let mut b = reading(ts(9, 0), Some(1.0));
        b.sensor_id = "S2".into();
        assert!(matches!(
            hourly_aggregate(&[reading(ts(9, 0), Some(1.0)), b]),
            Err(Error::MixedSensors(..))
        ));
    }

    fn outdoor(t: DateTime<Utc>, v: f64) -> OutdoorObservation {
        OutdoorObservation {
            timestamp: t,
            building_id: "B1".into(),
            pm25_out: Some(v),
            t2m_c: Some(20.0),
            d2m_c: Some(10.0),
            wind10m_ms: Some(3.0),
            sp_pa: Some(101_000.0),
            ssrd_wm2: Some(0.0),
            tp_mm: Some(0.0),
        }
    }

    #[test]
    fn join_fills_matching_hours() {
        let indoor = hourly_aggregate(&[
            reading(ts(1, 0), Some(1.0)),
            reading(ts(2, 0), Some(1.0)),
            reading(ts(3, 0), Some(1.0)),
        ])
        .unwrap();
        let out = join_hourly(
            &indoor,
            &[outdoor(ts(1, 0), 4.0), outdoor(ts(2, 0), 5.0), outdoor(ts(3, 0), 6.0)],
        );
        assert_eq!(out.len(), 3);
        assert_eq!(out[2].pm25_out, Some(6.0));
        assert!(out.iter().all(|r| r.tp_mm.is_some()));
    }

    #[test]
    fn join_is_left_join() {
        let indoor = hourly_aggregate(&[
            reading(ts(1, 0), Some(1.0)),
            reading(ts(2, 0), Some(1.0)),
        ])
        .unwrap();
        let out = join_hourly(&indoor, &[outdoor(ts(2, 0), 5.0), outdoor(ts(7, 0), 9.0)]);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].pm25_out, None);
        assert_eq!(out[0].sp_pa, None);
        assert_eq!(out[1].pm25_out, Some(5.0));
    }

    #[test]
    fn join_keys_on_building() {
        let indoor = hourly_aggregate(&[reading(ts(1, 0), Some(1.0))]).unwrap();
        let mut other = outdoor(ts(1, 0), 5.0);
        other.building_id = "B9".into();
        assert_eq!(join_hourly(&indoor, &[other])[0].pm25_out, None);
    }

    #[test]
    fn stats_constant() {
        let s = summary_stats(&[Some(2.0); 5]).unwrap();
        assert_eq!((s.min, s.max, s.median, s.mean), (2.0, 2.0, 2.0, 2.0));
        assert_eq!((s.iqr, s.sd), (0.0, 0.0));
    }

    #[test]
    fn stats_one_to_four() {
        let s = summary_stats(&[Some(4.0), Some(1.0), None, Some(3.0), Some(2.0)]).unwrap();
        assert_eq!(s.n, 4);
        assert!((s.median - 2.5).abs() < 1e-12);
        assert!((s.mean - 2.5).abs() < 1e-12);
        assert!((s.q1 - 1.75).abs() < 1e-12);
        assert!((s.q3 - 3.25).abs() < 1e-12);
        assert!((s.iqr - 1.5).abs() < 1e-12);
        // sqrt(5/3)
        assert!((s.sd - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((s.sd - 1.2910).abs() < 1e-4);
    }

    #[test]
    fn stats_empty() {
        assert!(matches!(summary_stats(&[None, None]), Err(Error::EmptyInput(_))));
        assert!(matches!(summary_stats(&[]), Err(Error::EmptyInput(_))));
    }
}
