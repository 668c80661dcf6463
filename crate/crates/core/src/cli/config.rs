use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ensemble::StackConfig;
use crate::error::{Error, Result};
use crate::evaluation::BacktestConfig;
use crate::features::FeatureSchema;
use crate::learners::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Good,
    Moderate,
    Poor,
}

impl Band {
    pub fn as_str(&self) -> &'static str {
        match self {
            Band::Good => "good",
            Band::Moderate => "moderate",
            Band::Poor => "poor",
        }
    }
}

/// Breakpoints `b_0 < b_1 < ...` and one band per interval.
///
/// A value below `b_0` falls in `bands[0]`; otherwise it falls in
/// `bands[1 + #{j >= 1 : v > b_j}]`. So `b_0` is inclusive on the upper
/// side and every later breakpoint is inclusive on the lower side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdBands {
    pub breakpoints: Vec<f64>,
    pub bands: Vec<Band>,
}

impl ThresholdBands {
    pub fn new(breakpoints: Vec<f64>, bands: Vec<Band>) -> Result<Self> {
        let t = Self { breakpoints, bands };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.breakpoints.is_empty() {
            return Err(Error::Config("threshold breakpoints must not be empty".into()));
        }
        if self.breakpoints.iter().any(|b| !b.is_finite())
            || self.breakpoints.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::Config("threshold breakpoints must be finite and strictly increasing".into()));
        }
        if self.bands.len() != self.breakpoints.len() + 1 {
            return Err(Error::Config("thresholds need exactly one more band than breakpoints".into()));
        }
        Ok(())
    }

    pub fn classify(&self, v: f64) -> Band {
        if v < self.breakpoints[0] {
            return self.bands[0];
        }
        let above = self.breakpoints[1..].iter().filter(|&&b| v > b).count();
        self.bands[1 + above]
    }
}

fn bands(breakpoints: &[f64], bands: &[Band]) -> ThresholdBands {
    ThresholdBands {
        breakpoints: breakpoints.to_vec(),
        bands: bands.to_vec(),
    }
}

use Band::{Good, Moderate, Poor};

fn default_pm25() -> ThresholdBands {
    bands(&[12.0, 35.0], &[Good, Moderate, Poor])
}
fn default_pm10() -> ThresholdBands {
    bands(&[54.0, 154.0], &[Good, Moderate, Poor])
}
fn default_tvoc() -> ThresholdBands {
    bands(&[220.0, 660.0], &[Good, Moderate, Poor])
}
fn default_temp() -> ThresholdBands {
    bands(&[16.0, 18.0, 24.0, 27.0], &[Poor, Moderate, Good, Moderate, Poor])
}
fn default_rh() -> ThresholdBands {
    bands(&[25.0, 30.0, 60.0, 70.0], &[Poor, Moderate, Good, Moderate, Poor])
}
fn default_sp() -> ThresholdBands {
    bands(&[97000.0, 105000.0], &[Moderate, Good, Moderate])
}

/// Report color bands, per parameter. Defaults are common indoor air
/// quality breakpoints; override any of them in the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    #[serde(default = "default_pm25")]
    pub pm25: ThresholdBands,
    #[serde(default = "default_pm10")]
    pub pm10: ThresholdBands,
    #[serde(default = "default_tvoc")]
    pub tvoc: ThresholdBands,
    #[serde(default = "default_temp")]
    pub temp_c: ThresholdBands,
    #[serde(default = "default_rh")]
    pub rh_pct: ThresholdBands,
    #[serde(default = "default_sp")]
    pub sp_pa: ThresholdBands,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            pm25: default_pm25(),
            pm10: default_pm10(),
            tvoc: default_tvoc(),
            temp_c: default_temp(),
            rh_pct: default_rh(),
            sp_pa: default_sp(),
        }
    }
}

impl Thresholds {
    pub const PARAMETERS: [&'static str; 6] = ["pm25", "pm10", "tvoc", "temp_c", "rh_pct", "sp_pa"];

    pub fn get(&self, parameter: &str) -> Option<&ThresholdBands> {
        match parameter {
            "pm25" => Some(&self.pm25),
            "pm10" => Some(&self.pm10),
            "tvoc" => Some(&self.tvoc),
            "temp_c" => Some(&self.temp_c),
            "rh_pct" => Some(&self.rh_pct),
            "sp_pa" => Some(&self.sp_pa),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for p in Self::PARAMETERS {
            self.get(p)
                .expect("every listed parameter has bands")
                .validate()
                .map_err(|e| Error::Config(format!("thresholds.{p}: {e}")))?;
        }
        Ok(())
    }
}

/// The `--config` document. Every key is optional.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub features: FeatureSchema,
    pub models: ModelParams,
    pub stack: StackConfig,
    pub backtest: BacktestConfig,
    pub thresholds: Thresholds,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
            _ => Error::Io(e),
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |e: Error| match e {
            Error::Config(_) => e,
            other => Error::Config(other.to_string()),
        };
        self.features.validate().map_err(cfg)?;
        self.models.validate().map_err(cfg)?;
        self.stack.validate()?;
        self.backtest.validate()?;
        self.thresholds.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pm25_bands() {
        let t = Thresholds::default();
        assert_eq!(t.pm25.classify(5.0), Band::Good);
        assert_eq!(t.pm25.classify(12.0), Band::Moderate);
        assert_eq!(t.pm25.classify(35.0), Band::Moderate);
        assert_eq!(t.pm25.classify(35.1), Band::Poor);
    }

    #[test]
    fn comfort_ranges_are_two_sided() {
        let t = Thresholds::default();
        assert_eq!(t.temp_c.classify(15.0), Band::Poor);
        assert_eq!(t.temp_c.classify(17.0), Band::Moderate);
        assert_eq!(t.temp_c.classify(21.0), Band::Good);
        assert_eq!(t.temp_c.classify(25.0), Band::Moderate);
        assert_eq!(t.temp_c.classify(30.0), Band::Poor);
    }

    #[test]
    fn breakpoints_must_increase() {
        assert!(ThresholdBands::new(vec![5.0, 5.0], vec![Good, Moderate, Poor]).is_err());
        assert!(ThresholdBands::new(vec![5.0], vec![Good]).is_err());
    }

    #[test]
    fn config_parsing() {
        let cfg = RunConfig::from_json("{}").unwrap();
        assert_eq!(cfg, RunConfig::default());
        let cfg = RunConfig::from_json(
            r#"{"thresholds":{"pm25":{"breakpoints":[10,20],"bands":["good","moderate","poor"]}},
                "stack":{"oof_folds":3}}"#,
        )
        .unwrap();
        assert_eq!(cfg.thresholds.pm25.breakpoints, vec![10.0, 20.0]);
        assert_eq!(cfg.thresholds.pm10, default_pm10());
        assert_eq!(cfg.stack.oof_folds, 3);
        assert!(RunConfig::from_json(r#"{"model":{}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"backtest":{"horizon_hours":12}}"#).is_err());
        let bad = RunConfig::from_json(r#"{"thresholds":{"pm25":{"breakpoints":[20,10],"bands":["good","moderate","poor"]}}}"#);
        assert!(matches!(bad, Err(Error::Config(_))));
    }
}
