//! Metrics, the rolling backtest, permutation importance and LOESS smoothing.

pub mod backtest;
pub mod importance;
pub mod loess;
pub mod metrics;

pub use backtest::{
    plan_windows, rolling_backtest, test_day_count, BacktestConfig, BacktestReport, EvalModel,
    ModelReport, Window, WindowPlan,
};
pub use importance::{permutation_importance, ImportanceEntry};
pub use loess::loess_smooth;
pub use metrics::{fractional_ranks, pearson, r_squared, rmse, spearman};

/// `YYYY-MM-DDTHH:MM:SSZ` serde format for timestamps.
pub(crate) mod iso {
    use chrono::{DateTime, Utc};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&crate::data::format_timestamp(t))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DateTime<Utc>, D::Error> {
        let raw = String::deserialize(d)?;
        crate::data::parse_timestamp(&raw, 0).map_err(serde::de::Error::custom)
    }
}
