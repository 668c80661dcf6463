//! The three-stage stack.
//!
//! 1. Each base learner produces out-of-fold predictions over contiguous
//!    time blocks, then is refit on every training row.
//! 2. Each meta learner is fit on the base out-of-fold columns (and nothing
//!    else) against the original target.
//! 3. The meta learners' own out-of-fold predictions, produced with the
//!    same block scheme over the base columns, are combined by
//!    nonnegative least squares. The final forecast is `sum(w_i * meta_i)`
//!    with no intercept and no renormalization.

pub mod nnls;
mod oof;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::learners::{check_columns, Learner, Model, ModelKind, ModelParams};

pub use nnls::{kkt_tolerance, kkt_violation, nnls, NnlsSolution};
pub use oof::{oof_predictions, oof_with_plan, Fold, FoldAudit, FoldPlan, OofColumn};

fn default_base() -> Vec<ModelKind> {
    vec![ModelKind::Rf, ModelKind::Gbt, ModelKind::Svr]
}

fn default_meta() -> Vec<ModelKind> {
    vec![ModelKind::Rf, ModelKind::Glm]
}

/// Stack layout; the `stack` config key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StackConfig {
    pub base: Vec<ModelKind>,
    pub meta: Vec<ModelKind>,
    pub oof_folds: usize,
    pub seed: u64,
}

impl Default for StackConfig {
    fn default() -> Self {
        Self {
            base: default_base(),
            meta: default_meta(),
            oof_folds: 5,
            seed: 42,
        }
    }
}

impl StackConfig {
    pub fn validate(&self) -> Result<()> {
        if self.base.is_empty() || self.meta.is_empty() {
            return Err(Error::Config("stack needs at least one base and one meta model".into()));
        }
        if self.oof_folds < 2 {
            return Err(Error::Config("stack.oof_folds must be >= 2".into()));
        }
        Ok(())
    }

    /// Instantiates the learners. Base model `i` is seeded with `seed + i`
    /// and meta model `j` with `seed + 100 + j`.
    pub fn build(&self, params: &ModelParams) -> Stack {
        let base = self
            .base
            .iter()
            .enumerate()
            .map(|(i, &k)| Arc::new(params.spec(k, self.seed.wrapping_add(i as u64))) as Arc<dyn Learner>)
            .collect();
        let meta = self
            .meta
            .iter()
            .enumerate()
            .map(|(j, &k)| {
                Arc::new(params.spec(k, self.seed.wrapping_add(100 + j as u64))) as Arc<dyn Learner>
            })
            .collect();
        Stack {
            base,
            meta,
            oof_folds: self.oof_folds,
        }
    }
}

/// A stack of concrete learners. Also a [`Learner`] itself, producing a
/// [`DemlModel`].
#[derive(Debug, Clone)]
pub struct Stack {
    pub base: Vec<Arc<dyn Learner>>,
    pub meta: Vec<Arc<dyn Learner>>,
    pub oof_folds: usize,
}

impl Learner for Stack {
    fn name(&self) -> String {
        "deml".into()
    }

    fn fit(&self, x: &FeatureMatrix) -> Result<Box<dyn Model>> {
        Ok(Box::new(fit_deml(self, x)?))
    }
}

/// Fitted three-stage model.
#[derive(Debug, Clone)]
pub struct DemlModel {
    columns: Vec<String>,
    base_names: Vec<String>,
    base: Vec<Arc<dyn Model>>,
    meta: Vec<Arc<dyn Model>>,
    weights: Vec<f64>,
    base_oof: Vec<OofColumn>,
    meta_oof: Vec<OofColumn>,
}

fn stage_names(learners: &[Arc<dyn Learner>], prefix: &str) -> Vec<String> {
    learners
        .iter()
        .enumerate()
        .map(|(i, l)| format!("{prefix}{i}_{}", l.name()))
        .collect()
}

/// Fits base, meta and weighting stages on `x`.
pub fn fit_deml(stack: &Stack, x: &FeatureMatrix) -> Result<DemlModel> {
    if stack.base.is_empty() || stack.meta.is_empty() {
        return Err(Error::Config("stack needs at least one base and one meta model".into()));
    }
    let folds = stack.oof_folds;
    if folds < 2 {
        return Err(Error::InvalidParam("oof_folds must be >= 2".into()));
    }
    if x.n_rows() < 2 * folds {
        return Err(Error::TooFewRows {
            n: x.n_rows(),
            folds,
        });
    }
    let plan = FoldPlan::contiguous(x.n_rows(), folds)?;

    // Stage 1
    let base_names = stage_names(&stack.base, "base");
    let stage1: Vec<(OofColumn, Arc<dyn Model>)> = stack
        .base
        .par_iter()
        .map(|learner| -> Result<_> {
            let oof = oof_with_plan(learner.as_ref(), x, &plan)?;
            oof.audit.check()?;
            let full: Arc<dyn Model> = Arc::from(learner.fit(x)?);
            Ok((oof, full))
        })
        .collect::<Result<_>>()?;
    let (base_oof, base): (Vec<_>, Vec<_>) = stage1.into_iter().unzip();

    // Stage 2
    let oof_cols: Vec<Vec<f64>> = base_oof.iter().map(|c| c.predictions.clone()).collect();
    let meta_x = x.with_features(base_names.clone(), &oof_cols)?;
    let stage2: Vec<(OofColumn, Arc<dyn Model>)> = stack
        .meta
        .par_iter()
        .map(|learner| -> Result<_> {
            let oof = oof_with_plan(learner.as_ref(), &meta_x, &plan)?;
            oof.audit.check()?;
            let full: Arc<dyn Model> = Arc::from(learner.fit(&meta_x)?);
            Ok((oof, full))
        })
        .collect::<Result<_>>()?;
    let (meta_oof, meta): (Vec<_>, Vec<_>) = stage2.into_iter().unzip();

    // Stage 3
    let n = x.n_rows();
    let k = meta_oof.len();
    let a = DMatrix::from_fn(n, k, |i, j| meta_oof[j].predictions[i]);
    let b = DVector::from_column_slice(x.target());
    let weights = nnls(&a, &b)?.weights;

    Ok(DemlModel {
        columns: x.columns().to_vec(),
        base_names,
        base,
        meta,
        weights,
        base_oof,
        meta_oof,
    })
}

impl DemlModel {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn base_oof(&self) -> &[OofColumn] {
        &self.base_oof
    }

    pub fn meta_oof(&self) -> &[OofColumn] {
        &self.meta_oof
    }

    /// Leakage audits of every out-of-fold column, base then meta.
    pub fn audits(&self) -> impl Iterator<Item = &FoldAudit> {
        self.base_oof.iter().chain(&self.meta_oof).map(|c| &c.audit)
    }

    /// Weighted meta out-of-fold predictions on the training rows.
    pub fn training_oof_predictions(&self) -> Vec<f64> {
        let n = self.meta_oof.first().map_or(0, |c| c.predictions.len());
        (0..n)
            .map(|i| {
                self.meta_oof
                    .iter()
                    .zip(&self.weights)
                    .map(|(c, w)| w * c.predictions[i])
                    .sum()
            })
            .collect()
    }

    /// Stage-1 predictions on `x`, packaged as the meta learners' input.
    pub fn base_predictions(&self, x: &FeatureMatrix) -> Result<FeatureMatrix> {
        check_columns(&self.columns, x)?;
        let cols: Vec<Vec<f64>> = self
            .base
            .iter()
            .map(|m| m.predict(x))
            .collect::<Result<_>>()?;
        x.with_features(self.base_names.clone(), &cols)
    }

    /// Per-meta-model predictions on `x` (one vector per meta model).
    pub fn meta_predictions(&self, x: &FeatureMatrix) -> Result<Vec<Vec<f64>>> {
        let meta_x = self.base_predictions(x)?;
        self.meta.iter().map(|m| m.predict(&meta_x)).collect()
    }

    /// Copy with different stage-3 weights.
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.meta.len() {
            return Err(Error::LengthMismatch(weights.len(), self.meta.len()));
        }
        Ok(Self {
            weights,
            ..self.clone()
        })
    }

    /// Copy without meta model `j`.
    pub fn without_meta(&self, j: usize) -> Result<Self> {
        if j >= self.meta.len() || self.meta.len() == 1 {
            return Err(Error::InvalidParam(format!("cannot remove meta model {j}")));
        }
        let mut out = self.clone();
        out.meta.remove(j);
        out.weights.remove(j);
        out.meta_oof.remove(j);
        Ok(out)
    }
}

impl Model for DemlModel {
    fn columns(&self) -> &[String] {
        &self.columns
    }

    fn predict(&self, x: &FeatureMatrix) -> Result<Vec<f64>> {
        let metas = self.meta_predictions(x)?;
        Ok((0..x.n_rows())
            .map(|i| {
                metas
                    .iter()
                    .zip(&self.weights)
                    .map(|(m, w)| w * m[i])
                    .sum()
            })
            .collect())
    }
}
