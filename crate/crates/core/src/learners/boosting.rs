use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::tree::{RegressionTree, TreeParams};
use super::{column_major, GbtParams};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

/// Stage-wise boosted regression trees under squared loss.
///
/// Each round fits a tree to the current residuals with leaf weights
/// `sum(residual) / (count + l2_leaf)`, which is `-G / (H + lambda)` for
/// squared loss, and adds it scaled by the learning rate. The base score is
/// the training mean.
#[derive(Debug, Clone)]
pub struct BoostedTrees {
    base_score: f64,
    learning_rate: f64,
    trees: Vec<RegressionTree>,
}

impl BoostedTrees {
    pub fn fit(x: &FeatureMatrix, params: &GbtParams) -> Result<Self> {
        if params.min_leaf == 0 || params.learning_rate < 0.0 || params.l2_leaf < 0.0 {
            return Err(Error::InvalidParam("gbt parameters out of range".into()));
        }
        let cols = column_major(x);
        let y = x.target();
        let n = y.len();
        let base_score = y.iter().sum::<f64>() / n as f64;
        let tree_params = TreeParams {
            max_depth: Some(params.max_depth),
            min_leaf: params.min_leaf,
            mtry: usize::MAX,
            l2: params.l2_leaf,
        };
        // Never drawn from: every split sees all features.
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut fitted = vec![base_score; n];
        let mut residual = vec![0.0; n];
        let mut trees = Vec::with_capacity(params.n_rounds);
        for _ in 0..params.n_rounds {
            for i in 0..n {
                residual[i] = y[i] - fitted[i];
            }
            let tree = RegressionTree::fit(&cols, &residual, (0..n).collect(), &tree_params, &mut rng);
            for (i, f) in fitted.iter_mut().enumerate() {
                *f += params.learning_rate * tree.predict_row(x.row(i));
            }
            trees.push(tree);
        }
        Ok(Self {
            base_score,
            learning_rate: params.learning_rate,
            trees,
        })
    }

    pub fn base_score(&self) -> f64 {
        self.base_score
    }

    pub fn trees(&self) -> &[RegressionTree] {
        &self.trees
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.trees
            .iter()
            .fold(self.base_score, |acc, t| acc + self.learning_rate * t.predict_row(row))
    }
}
