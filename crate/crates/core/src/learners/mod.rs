//! Regressors sharing one fit/predict contract.
//!
//! [`Learner`] is anything that can be fit to a [`FeatureMatrix`];
//! [`Model`] is the fitted result. The four built-in kinds are configured
//! through [`RegressorSpec`]. The stacking and evaluation code only sees
//! the traits, so oracle learners used in tests plug in the same way.

mod forest;
mod boosting;
mod glm;
mod svr;
pub mod tree;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

pub use boosting::BoostedTrees;
pub use forest::RandomForest;
pub use glm::RidgeGlm;
pub use svr::LinearSvr;

/// A fitted predictor.
pub trait Model: Send + Sync + fmt::Debug {
    /// Columns the model was trained on, in order.
    fn columns(&self) -> &[String];

    fn predict(&self, x: &FeatureMatrix) -> Result<Vec<f64>>;
}

/// Something that can be trained on a feature matrix.
pub trait Learner: Send + Sync + fmt::Debug {
    fn name(&self) -> String;

    fn fit(&self, x: &FeatureMatrix) -> Result<Box<dyn Model>>;
}

pub(crate) fn check_columns(expected: &[String], x: &FeatureMatrix) -> Result<()> {
    if expected != x.columns() {
        return Err(Error::FeatureMismatch {
            expected: expected.to_vec(),
            found: x.columns().to_vec(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Rf,
    Gbt,
    Svr,
    Glm,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Rf => "rf",
            ModelKind::Gbt => "gbt",
            ModelKind::Svr => "svr",
            ModelKind::Glm => "glm",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rf" => Ok(ModelKind::Rf),
            "gbt" => Ok(ModelKind::Gbt),
            "svr" => Ok(ModelKind::Svr),
            "glm" => Ok(ModelKind::Glm),
            other => Err(Error::Config(format!("unknown model kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RfParams {
    pub n_trees: usize,
    /// Features tried per split; `None` means `ceil(p / 3)`.
    pub mtry: Option<usize>,
    pub min_leaf: usize,
    /// `None` grows trees until leaves hit `min_leaf` or go pure.
    pub max_depth: Option<usize>,
    pub bootstrap: bool,
}

impl Default for RfParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            mtry: None,
            min_leaf: 2,
            max_depth: None,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GbtParams {
    pub n_rounds: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub l2_leaf: f64,
}

impl Default for GbtParams {
    fn default() -> Self {
        Self {
            n_rounds: 200,
            learning_rate: 0.05,
            max_depth: 3,
            min_leaf: 5,
            l2_leaf: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvrParams {
    pub c: f64,
    pub epsilon: f64,
    pub max_epochs: usize,
    pub tol: f64,
}

impl Default for SvrParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            epsilon: 0.1,
            max_epochs: 500,
            tol: 1e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GlmParams {
    pub ridge_lambda: f64,
}

impl Default for GlmParams {
    fn default() -> Self {
        Self { ridge_lambda: 1e-6 }
    }
}

/// Parameter blocks for every kind; the `models` config key.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    pub rf: RfParams,
    pub gbt: GbtParams,
    pub svr: SvrParams,
    pub glm: GlmParams,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let rf = &self.rf;
        if rf.n_trees == 0 {
            return Err(Error::InvalidParam("rf.n_trees must be >= 1".into()));
        }
        if rf.min_leaf == 0 {
            return Err(Error::InvalidParam("rf.min_leaf must be >= 1".into()));
        }
        if rf.mtry == Some(0) {
            return Err(Error::InvalidParam("rf.mtry must be >= 1".into()));
        }
        let gbt = &self.gbt;
        if !(gbt.learning_rate >= 0.0 && gbt.learning_rate.is_finite()) {
            return Err(Error::InvalidParam("gbt.learning_rate must be >= 0".into()));
        }
        if !(gbt.l2_leaf >= 0.0 && gbt.l2_leaf.is_finite()) {
            return Err(Error::InvalidParam("gbt.l2_leaf must be >= 0".into()));
        }
        if gbt.min_leaf == 0 {
            return Err(Error::InvalidParam("gbt.min_leaf must be >= 1".into()));
        }
        let svr = &self.svr;
        if !(svr.c > 0.0 && svr.c.is_finite()) {
            return Err(Error::InvalidParam("svr.c must be > 0".into()));
        }
        if !(svr.epsilon >= 0.0 && svr.epsilon.is_finite()) {
            return Err(Error::InvalidParam("svr.epsilon must be >= 0".into()));
        }
        if !(svr.tol > 0.0) {
            return Err(Error::InvalidParam("svr.tol must be > 0".into()));
        }
        if !(self.glm.ridge_lambda >= 0.0 && self.glm.ridge_lambda.is_finite()) {
            return Err(Error::InvalidParam("glm.ridge_lambda must be >= 0".into()));
        }
        Ok(())
    }

    pub fn spec(&self, kind: ModelKind, seed: u64) -> RegressorSpec {
        let params = match kind {
            ModelKind::Rf => Params::Rf(self.rf.clone()),
            ModelKind::Gbt => Params::Gbt(self.gbt.clone()),
            ModelKind::Svr => Params::Svr(self.svr.clone()),
            ModelKind::Glm => Params::Glm(self.glm.clone()),
        };
        RegressorSpec { params, seed }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Rf(RfParams),
    Gbt(GbtParams),
    Svr(SvrParams),
    Glm(GlmParams),
}

/// A built-in regressor kind with its parameters and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressorSpec {
    pub params: Params,
    pub seed: u64,
}

impl RegressorSpec {
    pub fn rf(params: RfParams, seed: u64) -> Self {
        Self {
            params: Params::Rf(params),
            seed,
        }
    }

    pub fn gbt(params: GbtParams) -> Self {
        Self {
            params: Params::Gbt(params),
            seed: 0,
        }
    }

    pub fn svr(params: SvrParams) -> Self {
        Self {
            params: Params::Svr(params),
            seed: 0,
        }
    }

    pub fn glm(params: GlmParams) -> Self {
        Self {
            params: Params::Glm(params),
            seed: 0,
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self.params {
            Params::Rf(_) => ModelKind::Rf,
            Params::Gbt(_) => ModelKind::Gbt,
            Params::Svr(_) => ModelKind::Svr,
            Params::Glm(_) => ModelKind::Glm,
        }
    }

    /// Fits the concrete model type.
    pub fn fit_regressor(&self, x: &FeatureMatrix) -> Result<FittedRegressor> {
        if x.is_empty() {
            return Err(Error::EmptyInput("cannot fit on an empty matrix"));
        }
        if x.n_cols() == 0 {
            return Err(Error::InvalidParam("matrix has no feature columns".into()));
        }
        if x.target().iter().any(|v| !v.is_finite())
            || x.rows().flatten().any(|v| !v.is_finite())
        {
            return Err(Error::NonFinite("training matrix"));
        }
        let body = match &self.params {
            Params::Rf(p) => Fitted::Forest(RandomForest::fit(x, p, self.seed)?),
            Params::Gbt(p) => Fitted::Boosted(BoostedTrees::fit(x, p)?),
            Params::Svr(p) => Fitted::Svr(LinearSvr::fit(x, p)?),
            Params::Glm(p) => Fitted::Glm(RidgeGlm::fit(x, p)?),
        };
        let (lo, hi) = x
            .target()
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        Ok(FittedRegressor {
            columns: x.columns().to_vec(),
            target_range: (lo, hi),
            body,
        })
    }
}

impl Learner for RegressorSpec {
    fn name(&self) -> String {
        self.kind().to_string()
    }

    fn fit(&self, x: &FeatureMatrix) -> Result<Box<dyn Model>> {
        Ok(Box::new(self.fit_regressor(x)?))
    }
}

#[derive(Debug, Clone)]
pub enum Fitted {
    Forest(RandomForest),
    Boosted(BoostedTrees),
    Svr(LinearSvr),
    Glm(RidgeGlm),
}

#[derive(Debug, Clone)]
pub struct FittedRegressor {
    columns: Vec<String>,
    target_range: (f64, f64),
    body: Fitted,
}

impl FittedRegressor {
    pub fn kind(&self) -> ModelKind {
        match self.body {
            Fitted::Forest(_) => ModelKind::Rf,
            Fitted::Boosted(_) => ModelKind::Gbt,
            Fitted::Svr(_) => ModelKind::Svr,
            Fitted::Glm(_) => ModelKind::Glm,
        }
    }

    /// `[min, max]` of the training targets.
    pub fn target_range(&self) -> (f64, f64) {
        self.target_range
    }

    pub fn body(&self) -> &Fitted {
        &self.body
    }

    fn predict_row(&self, row: &[f64]) -> f64 {
        match &self.body {
            Fitted::Forest(m) => m.predict_row(row),
            Fitted::Boosted(m) => m.predict_row(row),
            Fitted::Svr(m) => m.predict_row(row),
            Fitted::Glm(m) => m.predict_row(row),
        }
    }
}

impl Model for FittedRegressor {
    fn columns(&self) -> &[String] {
        &self.columns
    }

    fn predict(&self, x: &FeatureMatrix) -> Result<Vec<f64>> {
        check_columns(&self.columns, x)?;
        let out: Vec<f64> = x.rows().map(|r| self.predict_row(r)).collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("predictions"));
        }
        Ok(out)
    }
}

/// Column-major copy of a matrix's features.
pub(crate) fn column_major(x: &FeatureMatrix) -> Vec<Vec<f64>> {
    (0..x.n_cols()).map(|j| x.column(j)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(xs: &[f64], ys: &[f64]) -> FeatureMatrix {
        let rows: Vec<Vec<f64>> = xs.iter().map(|&v| vec![v]).collect();
        FeatureMatrix::from_rows(vec!["x".into()], &rows, ys.to_vec()).unwrap()
    }

    #[test]
    fn schema_mismatch_on_predict() {
        let x = matrix(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]);
        let m = RegressorSpec::glm(GlmParams::default()).fit_regressor(&x).unwrap();
        let other = FeatureMatrix::from_rows(vec!["z".into()], &[vec![1.0]], vec![0.0]).unwrap();
        assert!(matches!(m.predict(&other), Err(Error::FeatureMismatch { .. })));
    }

    #[test]
    fn empty_matrix_rejected() {
        let x = FeatureMatrix::empty(vec!["x".into()]);
        assert!(matches!(
            RegressorSpec::rf(RfParams::default(), 1).fit_regressor(&x),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn params_json_round_trip() {
        let json = r#"{"rf":{"n_trees":50,"mtry":3},"gbt":{"learning_rate":0.1},"svr":{"c":2.0},"glm":{"ridge_lambda":0.5}}"#;
        let p: ModelParams = serde_json::from_str(json).unwrap();
        assert_eq!(p.rf.n_trees, 50);
        assert_eq!(p.rf.mtry, Some(3));
        assert_eq!(p.rf.min_leaf, 2);
        assert_eq!(p.gbt.n_rounds, 200);
        let back: ModelParams = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<ModelParams>(r#"{"rf":{"trees":5}}"#).is_err());
    }

    #[test]
    fn invalid_params_rejected() {
        let mut p = ModelParams::default();
        p.svr.c = 0.0;
        assert!(p.validate().is_err());
        let mut p = ModelParams::default();
        p.rf.n_trees = 0;
        assert!(p.validate().is_err());
        let mut p = ModelParams::default();
        p.glm.ridge_lambda = -1.0;
        assert!(p.validate().is_err());
        assert!(ModelParams::default().validate().is_ok());
    }
}
