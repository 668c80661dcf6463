//! Expanding-window backtest.
//!
//! The test set is the last `ceil(test_fraction * distinct UTC days)` days
//! of the matrix. It is cut into consecutive `horizon_hours` windows from
//! the first test timestamp. Every model is refit for each window on all
//! rows strictly before the window start, predicts the window, and the
//! window then joins the training data for the next step.

use std::collections::BTreeSet;
use std::ops::Range;
use std::sync::Arc;

use chrono::{DateTime, NaiveDate, TimeDelta, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{r_squared, rmse};
use crate::ensemble::StackConfig;
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::learners::{Learner, ModelKind, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalModel {
    Rf,
    Gbt,
    Svr,
    Glm,
    Deml,
}

impl EvalModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            EvalModel::Rf => "rf",
            EvalModel::Gbt => "gbt",
            EvalModel::Svr => "svr",
            EvalModel::Glm => "glm",
            EvalModel::Deml => "deml",
        }
    }

    pub fn kind(&self) -> Option<ModelKind> {
        match self {
            EvalModel::Rf => Some(ModelKind::Rf),
            EvalModel::Gbt => Some(ModelKind::Gbt),
            EvalModel::Svr => Some(ModelKind::Svr),
            EvalModel::Glm => Some(ModelKind::Glm),
            EvalModel::Deml => None,
        }
    }
}

impl std::str::FromStr for EvalModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rf" => Ok(EvalModel::Rf),
            "gbt" => Ok(EvalModel::Gbt),
            "svr" => Ok(EvalModel::Svr),
            "glm" => Ok(EvalModel::Glm),
            "deml" => Ok(EvalModel::Deml),
            other => Err(Error::InvalidParam(format!(
                "unknown model {other:?}; expected rf, gbt, svr, glm or deml"
            ))),
        }
    }
}

impl std::fmt::Display for EvalModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The `backtest` config key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BacktestConfig {
    pub horizon_hours: u32,
    pub step_days: u32,
    pub test_fraction: f64,
    pub models: Vec<EvalModel>,
}

impl Default for BacktestConfig {
    fn default() -> Self {
        Self {
            horizon_hours: 24,
            step_days: 1,
            test_fraction: 0.10,
            models: vec![EvalModel::Rf, EvalModel::Gbt, EvalModel::Svr, EvalModel::Deml],
        }
    }
}

impl BacktestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.horizon_hours == 0 {
            return Err(Error::Config("backtest.horizon_hours must be >= 1".into()));
        }
        if u64::from(self.horizon_hours) != 24 * u64::from(self.step_days) {
            return Err(Error::Config(
                "backtest windows must tile the test set: horizon_hours = 24 * step_days".into(),
            ));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::Config("backtest.test_fraction must lie in (0, 1)".into()));
        }
        if self.models.is_empty() {
            return Err(Error::Config("backtest.models is empty".into()));
        }
        Ok(())
    }

    /// Learner for one model kind.
    pub fn learner(model: EvalModel, stack: &StackConfig, params: &ModelParams) -> Arc<dyn Learner> {
        match model.kind() {
            Some(kind) => Arc::new(params.spec(kind, stack.seed)),
            None => Arc::new(stack.build(params)),
        }
    }

    /// Named learners for every configured model.
    pub fn learners(&self, stack: &StackConfig, params: &ModelParams) -> Vec<(String, Arc<dyn Learner>)> {
        self.models
            .iter()
            .map(|&m| (m.as_str().to_string(), Self::learner(m, stack, params)))
            .collect()
    }
}

/// Number of trailing calendar days held out for testing.
pub fn test_day_count(distinct_days: usize, test_fraction: f64) -> usize {
    // The slack keeps 0.1 * 60 = 6.000000000000001 from rounding up to 7.
    let raw = (test_fraction * distinct_days as f64 - 1e-9).ceil();
    (raw.max(1.0) as usize).min(distinct_days)
}

/// Row ranges of the test windows over a sorted timestamp column.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowPlan {
    pub test_days: Vec<NaiveDate>,
    pub test_start: usize,
    pub windows: Vec<(DateTime<Utc>, Range<usize>)>,
}

pub fn plan_windows(timestamps: &[DateTime<Utc>], cfg: &BacktestConfig) -> Result<WindowPlan> {
    let days: BTreeSet<NaiveDate> = timestamps.iter().map(|t| t.date_naive()).collect();
    if days.is_empty() {
        return Err(Error::EmptyTest);
    }
    let n_test = test_day_count(days.len(), cfg.test_fraction);
    let test_days: Vec<NaiveDate> = days.iter().rev().take(n_test).rev().copied().collect();
    let first_day = test_days[0];
    let test_start = timestamps
        .iter()
        .position(|t| t.date_naive() >= first_day)
        .ok_or(Error::EmptyTest)?;

    let horizon = TimeDelta::hours(i64::from(cfg.horizon_hours));
    let mut windows = Vec::new();
    let mut start = timestamps[test_start];
    let mut i = test_start;
    while i < timestamps.len() {
        let end = start + horizon;
        let j = i + timestamps[i..].iter().take_while(|t| **t < end).count();
        if j > i {
            windows.push((start, i..j));
        }
        i = j;
        start = end;
    }
    Ok(WindowPlan {
        test_days,
        test_start,
        windows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    #[serde(with = "crate::evaluation::iso")]
    pub start: DateTime<Utc>,
    pub pred: Vec<f64>,
    pub obs: Vec<f64>,
    #[serde(skip)]
    pub timestamps: Vec<DateTime<Utc>>,
    /// Rows the models were trained on for this window.
    #[serde(skip)]
    pub n_train: usize,
    #[serde(skip)]
    pub last_train: Option<DateTime<Utc>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensor_id: Option<String>,
    pub windows: Vec<Window>,
    pub rmse: f64,
    pub r2: f64,
}

impl ModelReport {
    pub fn predictions(&self) -> Vec<f64> {
        self.windows.iter().flat_map(|w| w.pred.iter().copied()).collect()
    }

    pub fn observations(&self) -> Vec<f64> {
        self.windows.iter().flat_map(|w| w.obs.iter().copied()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestReport {
    pub models: Vec<ModelReport>,
    pub plan: WindowPlan,
}

impl BacktestReport {
    pub fn model(&self, name: &str) -> Option<&ModelReport> {
        self.models.iter().find(|m| m.model == name)
    }

    /// Checks window bookkeeping against the matrix the backtest ran on:
    /// every test row is predicted exactly once per model, and no window's
    /// training set reaches its own start.
    pub fn verify(&self, data: &FeatureMatrix) -> Result<()> {
        let ts = data.timestamps();
        let test = &ts[self.plan.test_start..];
        for m in &self.models {
            let predicted: Vec<DateTime<Utc>> =
                m.windows.iter().flat_map(|w| w.timestamps.iter().copied()).collect();
            if predicted != test {
                return Err(Error::InvalidParam(format!(
                    "{}: predicted rows do not cover the test set exactly once",
                    m.model
                )));
            }
            for w in &m.windows {
                let before = ts.iter().take_while(|t| **t < w.start).count();
                if w.n_train != before || w.last_train.is_some_and(|t| t >= w.start) {
                    return Err(Error::InvalidParam(format!(
                        "{}: window at {} trained on rows at or after its start",
                        m.model, w.start
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Runs the expanding-window backtest for each named learner.
pub fn rolling_backtest(
    data: &FeatureMatrix,
    learners: &[(String, Arc<dyn Learner>)],
    cfg: &BacktestConfig,
) -> Result<BacktestReport> {
    cfg.validate()?;
    let plan = plan_windows(data.timestamps(), cfg)?;
    if plan.windows.is_empty() {
        return Err(Error::EmptyTest);
    }
    if plan.test_start == 0 {
        return Err(Error::EmptyInput("no training rows before the test set"));
    }

    let mut per_model: Vec<Vec<Window>> = vec![Vec::new(); learners.len()];
    for (start, rows) in &plan.windows {
        let train_idx: Vec<usize> = (0..rows.start).collect();
        let train = data.select_rows(&train_idx);
        let test_idx: Vec<usize> = rows.clone().collect();
        let test = data.select_rows(&test_idx);
        let preds: Vec<Vec<f64>> = learners
            .par_iter()
            .map(|(_, l)| l.fit(&train)?.predict(&test))
            .collect::<Result<_>>()?;
        for (k, pred) in preds.into_iter().enumerate() {
            per_model[k].push(Window {
                start: *start,
                pred,
                obs: test.target().to_vec(),
                timestamps: test.timestamps().to_vec(),
                n_train: train.n_rows(),
                last_train: train.timestamps().last().copied(),
            });
        }
    }

    let models = learners
        .iter()
        .zip(per_model)
        .map(|((name, _), windows)| {
            let pred: Vec<f64> = windows.iter().flat_map(|w| w.pred.iter().copied()).collect();
            let obs: Vec<f64> = windows.iter().flat_map(|w| w.obs.iter().copied()).collect();
            Ok(ModelReport {
                model: name.clone(),
                sensor_id: None,
                rmse: rmse(&pred, &obs)?,
                r2: r_squared(&pred, &obs)?,
                windows,
            })
        })
        .collect::<Result<_>>()?;
    Ok(BacktestReport { models, plan })
}
