use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::learners::Learner;

/// One fold: the rows it predicts and the rows its model is trained on.
#[derive(Debug, Clone, PartialEq)]
pub struct Fold {
    pub holdout: Range<usize>,
    pub train: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldPlan {
    folds: Vec<Fold>,
    n_rows: usize,
}

impl FoldPlan {
    /// Contiguous blocks of near-equal size; the first `n % folds` blocks
    /// get one extra row. Each block is predicted by a model trained on all
    /// other blocks.
    pub fn contiguous(n_rows: usize, folds: usize) -> Result<Self> {
        if folds < 2 {
            return Err(Error::InvalidParam("need at least 2 folds".into()));
        }
        if n_rows < folds {
            return Err(Error::TooFewRows { n: n_rows, folds });
        }
        let base = n_rows / folds;
        let extra = n_rows % folds;
        let mut start = 0;
        let mut out = Vec::with_capacity(folds);
        for k in 0..folds {
            let len = base + usize::from(k < extra);
            let holdout = start..start + len;
            let train = (0..n_rows).filter(|i| !holdout.contains(i)).collect();
            out.push(Fold { holdout, train });
            start += len;
        }
        Ok(Self {
            folds: out,
            n_rows,
        })
    }

    /// Arbitrary plan. Holdouts must partition `0..n_rows`; training sets
    /// are taken as given, which is what the leakage audit is for.
    pub fn from_folds(n_rows: usize, folds: Vec<Fold>) -> Result<Self> {
        let mut seen = vec![false; n_rows];
        for f in &folds {
            for i in f.holdout.clone() {
                if i >= n_rows || seen[i] {
                    return Err(Error::InvalidParam("fold holdouts must partition the rows".into()));
                }
                seen[i] = true;
            }
            if f.train.iter().any(|&i| i >= n_rows) || f.train.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParam("fold training rows must be ascending and in range".into()));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidParam("fold holdouts must cover every row".into()));
        }
        Ok(Self { folds, n_rows })
    }

    pub fn folds(&self) -> &[Fold] {
        &self.folds
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }
}

/// Bookkeeping of which rows each fold's model actually saw.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldAudit {
    /// Fold index of every row.
    pub fold_of_row: Vec<usize>,
    /// Row indices handed to each fold's fit.
    pub trained_on: Vec<Vec<usize>>,
}

impl FoldAudit {
    /// Fails with [`Error::Leakage`] if any row's out-of-fold value came
    /// from a model whose training set contained that row.
    pub fn check(&self) -> Result<()> {
        let n = self.fold_of_row.len();
        for (fold, rows) in self.trained_on.iter().enumerate() {
            let mut seen = vec![false; n];
            for &i in rows {
                seen[i] = true;
            }
            if let Some(row) = (0..n).find(|&i| self.fold_of_row[i] == fold && seen[i]) {
                return Err(Error::Leakage { row, fold });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OofColumn {
    pub name: String,
    pub predictions: Vec<f64>,
    pub audit: FoldAudit,
}

/// Out-of-fold predictions of one learner over contiguous time blocks.
pub fn oof_predictions(learner: &dyn Learner, x: &FeatureMatrix, folds: usize) -> Result<OofColumn> {
    let plan = FoldPlan::contiguous(x.n_rows(), folds)?;
    oof_with_plan(learner, x, &plan)
}

/// Out-of-fold predictions under an explicit plan. Folds are fit
/// concurrently and assembled in fold order.
pub fn oof_with_plan(learner: &dyn Learner, x: &FeatureMatrix, plan: &FoldPlan) -> Result<OofColumn> {
    if plan.n_rows() != x.n_rows() {
        return Err(Error::LengthMismatch(plan.n_rows(), x.n_rows()));
    }
    let per_fold: Vec<Vec<f64>> = plan
        .folds()
        .par_iter()
        .map(|fold| {
            let model = learner.fit(&x.select_rows(&fold.train))?;
            let rows: Vec<usize> = fold.holdout.clone().collect();
            model.predict(&x.select_rows(&rows))
        })
        .collect::<Result<_>>()?;

    let mut predictions = vec![0.0; x.n_rows()];
    let mut fold_of_row = vec![0; x.n_rows()];
    for (k, (fold, preds)) in plan.folds().iter().zip(per_fold).enumerate() {
        for (i, p) in fold.holdout.clone().zip(preds) {
            predictions[i] = p;
            fold_of_row[i] = k;
        }
    }
    Ok(OofColumn {
        name: learner.name(),
        predictions,
        audit: FoldAudit {
            fold_of_row,
            trained_on: plan.folds().iter().map(|f| f.train.clone()).collect(),
        },
    })
}
