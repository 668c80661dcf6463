//! Feature matrix construction: lagged indoor PM2.5, calendar fields,
//! coordinates and lagged covariates, plus column standardization.

use std::collections::{BTreeSet, HashMap};

use chrono::{DateTime, Datelike, TimeDelta, TimeZone, Timelike, Utc};
use serde::{Deserialize, Serialize};

use crate::data::{
    hourly_aggregate, join_hourly, split_by_sensor, HourlyRecord, OutdoorObservation, SensorReading,
};
use crate::error::{Error, Result};

pub const CALENDAR_COLUMNS: [&str; 6] = ["year", "month", "day", "day_of_week", "hour", "season"];
pub const COORDINATE_COLUMNS: [&str; 2] = ["lat", "lon"];

fn default_lags() -> Vec<u32> {
    vec![1, 2, 3, 4, 5, 6, 24]
}

fn default_covariates() -> Vec<String> {
    [
        "pm10", "tvoc", "temp_c", "rh_pct", "pm25_out", "t2m_c", "d2m_c", "wind10m_ms", "sp_pa",
        "ssrd_wm2", "tp_mm",
    ]
    .into_iter()
    .map(String::from)
    .collect()
}

/// Which features to build. Serialized under the `features` config key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureSchema {
    #[serde(default = "default_lags")]
    pub lags: Vec<u32>,
    #[serde(default = "crate::features::yes")]
    pub calendar: bool,
    #[serde(default = "default_covariates")]
    pub covariates: Vec<String>,
}

fn yes() -> bool {
    true
}

impl Default for FeatureSchema {
    fn default() -> Self {
        Self {
            lags: default_lags(),
            calendar: true,
            covariates: default_covariates(),
        }
    }
}

pub fn lag_column(k: u32) -> String {
    format!("pm25_lag_{k}")
}

/// Covariates enter the matrix at t-1 so that row t never reads hour t.
pub fn covariate_column(name: &str) -> String {
    format!("{name}_lag_1")
}

impl FeatureSchema {
    pub fn validate(&self) -> Result<()> {
        if self.lags.is_empty() {
            return Err(Error::InvalidParam("lag set must not be empty".into()));
        }
        if self.lags.contains(&0) {
            return Err(Error::InvalidParam("lags must be >= 1 hour".into()));
        }
        for c in &self.covariates {
            if c == "pm25" || !HourlyRecord::NUMERIC_FIELDS.contains(&c.as_str()) {
                return Err(Error::UnknownColumn(c.clone()));
            }
        }
        let names = self.column_names();
        let unique: BTreeSet<&String> = names.iter().collect();
        if unique.len() != names.len() {
            return Err(Error::InvalidParam("feature names must be unique".into()));
        }
        Ok(())
    }

    /// Ordered column names: lags, calendar, coordinates, covariates.
    pub fn column_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.lags.iter().map(|&k| lag_column(k)).collect();
        if self.calendar {
            names.extend(CALENDAR_COLUMNS.iter().map(|s| s.to_string()));
        }
        names.extend(COORDINATE_COLUMNS.iter().map(|s| s.to_string()));
        names.extend(self.covariates.iter().map(|c| covariate_column(c)));
        names
    }
}

/// Dense row-major design matrix with aligned timestamps and target.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    columns: Vec<String>,
    values: Vec<f64>,
    timestamps: Vec<DateTime<Utc>>,
    target: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(
        columns: Vec<String>,
        values: Vec<f64>,
        timestamps: Vec<DateTime<Utc>>,
        target: Vec<f64>,
    ) -> Result<Self> {
        let n = target.len();
        if timestamps.len() != n {
            return Err(Error::LengthMismatch(timestamps.len(), n));
        }
        if values.len() != n * columns.len() {
            return Err(Error::LengthMismatch(values.len(), n * columns.len()));
        }
        if values.iter().chain(&target).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("feature matrix"));
        }
        if timestamps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParam(
                "feature matrix timestamps must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            columns,
            values,
            timestamps,
            target,
        })
    }

    /// Builds a matrix from rows, stamping consecutive hours from the Unix
    /// epoch. Handy when timestamps do not matter.
    pub fn from_rows(columns: Vec<String>, rows: &[Vec<f64>], target: Vec<f64>) -> Result<Self> {
        if rows.len() != target.len() {
            return Err(Error::LengthMismatch(rows.len(), target.len()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != columns.len()) {
            return Err(Error::LengthMismatch(bad.len(), columns.len()));
        }
        let epoch = Utc.timestamp_opt(0, 0).unwrap();
        let timestamps = (0..rows.len())
            .map(|i| epoch + TimeDelta::hours(i as i64))
            .collect();
        Self::new(columns, rows.concat(), timestamps, target)
    }

    pub fn empty(columns: Vec<String>) -> Self {
        Self {
            columns,
            values: Vec::new(),
            timestamps: Vec::new(),
            target: Vec::new(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.target.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.target.is_empty()
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let p = self.n_cols();
        &self.values[i * p..(i + 1) * p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.n_rows()).map(move |i| self.row(i))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_cols() + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows()).map(|i| self.get(i, j)).collect()
    }

    pub fn timestamps(&self) -> &[DateTime<Utc>] {
        &self.timestamps
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    /// Rows at the given (ascending) positions.
    pub fn select_rows(&self, idx: &[usize]) -> FeatureMatrix {
        let p = self.n_cols();
        let mut values = Vec::with_capacity(idx.len() * p);
        for &i in idx {
            values.extend_from_slice(self.row(i));
        }
        FeatureMatrix {
            columns: self.columns.clone(),
            values,
            timestamps: idx.iter().map(|&i| self.timestamps[i]).collect(),
            target: idx.iter().map(|&i| self.target[i]).collect(),
        }
    }

    /// Copy with column `j` replaced.
    pub fn with_column(&self, j: usize, column: &[f64]) -> FeatureMatrix {
        let p = self.n_cols();
        let mut values = self.values.clone();
        for (i, v) in column.iter().enumerate() {
            values[i * p + j] = *v;
        }
        FeatureMatrix {
            values,
            ..self.clone()
        }
    }

    /// Copy with an extra trailing column.
    pub fn with_appended_column(&self, name: &str, column: &[f64]) -> Result<FeatureMatrix> {
        if column.len() != self.n_rows() {
            return Err(Error::LengthMismatch(column.len(), self.n_rows()));
        }
        let mut columns = self.columns.clone();
        columns.push(name.to_string());
        let mut values = Vec::with_capacity(self.values.len() + column.len());
        for (i, v) in column.iter().enumerate() {
            values.extend_from_slice(self.row(i));
            values.push(*v);
        }
        FeatureMatrix::new(columns, values, self.timestamps.clone(), self.target.clone())
    }

    /// Same rows and timestamps with a different set of feature columns
    /// (`columns[j]` holds column j).
    pub fn with_features(&self, names: Vec<String>, columns: &[Vec<f64>]) -> Result<FeatureMatrix> {
        if names.len() != columns.len() {
            return Err(Error::LengthMismatch(names.len(), columns.len()));
        }
        let n = self.n_rows();
        if let Some(c) = columns.iter().find(|c| c.len() != n) {
            return Err(Error::LengthMismatch(c.len(), n));
        }
        let values = (0..n)
            .flat_map(|i| columns.iter().map(move |c| c[i]))
            .collect();
        FeatureMatrix::new(names, values, self.timestamps.clone(), self.target.clone())
    }

    /// Same features with a replacement target.
    pub fn with_target(&self, target: Vec<f64>) -> Result<FeatureMatrix> {
        if target.len() != self.n_rows() {
            return Err(Error::LengthMismatch(target.len(), self.n_rows()));
        }
        FeatureMatrix::new(
            self.columns.clone(),
            self.values.clone(),
            self.timestamps.clone(),
            target,
        )
    }
}

/// Southern-hemisphere season: DJF summer 1, MAM autumn 2, JJA winter 3, SON spring 4.
pub fn southern_season(month: u32) -> u32 {
    match month {
        12 | 1 | 2 => 1,
        3..=5 => 2,
        6..=8 => 3,
        _ => 4,
    }
}

pub fn calendar_values(t: &DateTime<Utc>) -> [f64; 6] {
    [
        t.year() as f64,
        t.month() as f64,
        t.day() as f64,
        t.weekday().num_days_from_monday() as f64,
        t.hour() as f64,
        southern_season(t.month()) as f64,
    ]
}

/// Builds the model matrix for one sensor's joined hourly series.
///
/// A row is emitted for hour `t` only when the target, every lag `t-k`
/// (exact hour present), the coordinates and every covariate at `t-1` are
/// all present.
pub fn build_feature_matrix(records: &[HourlyRecord], schema: &FeatureSchema) -> Result<FeatureMatrix> {
    if schema.lags.is_empty() {
        return Err(Error::EmptySchema);
    }
    schema.validate()?;
    let columns = schema.column_names();

    let by_time: HashMap<DateTime<Utc>, &HourlyRecord> =
        records.iter().map(|r| (r.timestamp, r)).collect();
    let at = |t: DateTime<Utc>, k: u32| by_time.get(&(t - TimeDelta::hours(k as i64))).copied();

    let mut values = Vec::new();
    let mut timestamps = Vec::new();
    let mut target = Vec::new();
    let mut row = Vec::with_capacity(columns.len());

    'records: for rec in records {
        let Some(y) = rec.pm25 else { continue };
        row.clear();
        for &k in &schema.lags {
            match at(rec.timestamp, k).and_then(|r| r.pm25) {
                Some(v) => row.push(v),
                None => continue 'records,
            }
        }
        if schema.calendar {
            row.extend(calendar_values(&rec.timestamp));
        }
        match (rec.lat, rec.lon) {
            (Some(lat), Some(lon)) => row.extend([lat, lon]),
            _ => continue,
        }
        if !schema.covariates.is_empty() {
            let Some(prev) = at(rec.timestamp, 1) else { continue };
            for c in &schema.covariates {
                match prev.field(c)? {
                    Some(v) => row.push(v),
                    None => continue 'records,
                }
            }
        }
        if row.iter().any(|v| !v.is_finite()) || !y.is_finite() {
            continue;
        }
        values.extend_from_slice(&row);
        timestamps.push(rec.timestamp);
        target.push(y);
    }

    FeatureMatrix::new(columns, values, timestamps, target)
}

/// Per-column centering and scaling learned from training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    columns: Vec<String>,
    mean: Vec<f64>,
    sd: Vec<f64>,
}

impl Standardizer {
    /// Learns mean and sample SD of the named columns. A constant column
    /// (or a single row) stores SD 1.
    pub fn fit(matrix: &FeatureMatrix, columns: &[String]) -> Result<Self> {
        if matrix.is_empty() {
            return Err(Error::EmptyInput("standardizer needs at least one row"));
        }
        let n = matrix.n_rows() as f64;
        let mut mean = Vec::with_capacity(columns.len());
        let mut sd = Vec::with_capacity(columns.len());
        for name in columns {
            let j = matrix.column_index(name)?;
            let col = matrix.column(j);
            let m = col.iter().sum::<f64>() / n;
            let var = if col.len() > 1 {
                col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            let s = var.sqrt();
            mean.push(m);
            sd.push(if s > 0.0 && s.is_finite() { s } else { 1.0 });
        }
        Ok(Self {
            columns: columns.to_vec(),
            mean,
            sd,
        })
    }

    /// Fits on every column of the matrix.
    pub fn fit_all(matrix: &FeatureMatrix) -> Result<Self> {
        Self::fit(matrix, matrix.columns())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn sd(&self) -> &[f64] {
        &self.sd
    }

    fn positions(&self, matrix: &FeatureMatrix) -> Result<Vec<usize>> {
        self.columns.iter().map(|c| matrix.column_index(c)).collect()
    }

    pub fn apply(&self, matrix: &FeatureMatrix) -> Result<FeatureMatrix> {
        self.map(matrix, |v, m, s| (v - m) / s)
    }

    pub fn invert(&self, matrix: &FeatureMatrix) -> Result<FeatureMatrix> {
        self.map(matrix, |v, m, s| v * s + m)
    }

    fn map(&self, matrix: &FeatureMatrix, f: impl Fn(f64, f64, f64) -> f64) -> Result<FeatureMatrix> {
        let pos = self.positions(matrix)?;
        let p = matrix.n_cols();
        let mut values = matrix.values.clone();
        for i in 0..matrix.n_rows() {
            for (k, &j) in pos.iter().enumerate() {
                let v = &mut values[i * p + j];
                *v = f(*v, self.mean[k], self.sd[k]);
            }
        }
        Ok(FeatureMatrix {
            values,
            ..matrix.clone()
        })
    }

    /// Standardized copy of a single row, in the standardizer's column order.
    /// Assumes the row's column order equals the standardizer's.
    pub fn transform_row(&self, row: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            row.iter()
                .zip(self.mean.iter().zip(&self.sd))
                .map(|(v, (m, s))| (v - m) / s),
        );
    }
}

/// One sensor's model matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorMatrix {
    pub sensor_id: String,
    pub building_id: String,
    pub matrix: FeatureMatrix,
}

/// Splits raw readings per sensor, aggregates to hours, joins the outdoor
/// observations and builds each sensor's matrix. Sensors keep first-seen
/// order.
pub fn sensor_matrices(
    indoor: Vec<SensorReading>,
    outdoor: &[OutdoorObservation],
    schema: &FeatureSchema,
) -> Result<Vec<SensorMatrix>> {
    split_by_sensor(indoor)
        .into_iter()
        .map(|(sensor_id, readings)| {
            let building_id = readings[0].building_id.clone();
            let hourly = join_hourly(&hourly_aggregate(&readings)?, outdoor);
            Ok(SensorMatrix {
                sensor_id,
                building_id,
                matrix: build_feature_matrix(&hourly, schema)?,
            })
        })
        .collect()
}
