use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::tree::{RegressionTree, TreeParams};
use super::{column_major, RfParams};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

/// Bagged regression trees with per-split feature subsampling.
///
/// Tree `t` draws its bootstrap sample and feature subsets from a stream
/// seeded with `seed + t`, so the forest does not depend on how many
/// worker threads build it.
#[derive(Debug, Clone)]
pub struct RandomForest {
    trees: Vec<RegressionTree>,
}

impl RandomForest {
    pub fn fit(x: &FeatureMatrix, params: &RfParams, seed: u64) -> Result<Self> {
        let p = x.n_cols();
        let mtry = params.mtry.unwrap_or(p.div_ceil(3));
        if mtry == 0 || mtry > p {
            return Err(Error::InvalidParam(format!(
                "rf.mtry = {mtry} outside 1..={p}"
            )));
        }
        if params.n_trees == 0 || params.min_leaf == 0 {
            return Err(Error::InvalidParam(
                "rf needs n_trees >= 1 and min_leaf >= 1".into(),
            ));
        }
        let cols = column_major(x);
        let y = x.target();
        let n = y.len();
        let tree_params = TreeParams {
            max_depth: params.max_depth,
            min_leaf: params.min_leaf,
            mtry,
            l2: 0.0,
        };
        let trees = (0..params.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
                let rows: Vec<usize> = if params.bootstrap {
                    (0..n).map(|_| rng.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                RegressionTree::fit(&cols, y, rows, &tree_params, &mut rng)
            })
            .collect();
        Ok(Self { trees })
    }

    pub fn trees(&self) -> &[RegressionTree] {
        &self.trees
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict_row(row)).sum();
        sum / self.trees.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Learner, RegressorSpec};
    use super::*;

    fn data(n: usize) -> FeatureMatrix {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let a = (i as f64 * 0.37).sin();
                let b = (i as f64 * 0.11).cos();
                vec![a, b, i as f64 % 7.0]
            })
            .collect();
        let y = rows.iter().map(|r| 3.0 * r[0] - r[1] * r[1] + 0.1 * r[2]).collect();
        FeatureMatrix::from_rows(vec!["a".into(), "b".into(), "c".into()], &rows, y).unwrap()
    }

    #[test]
    fn depth_zero_predicts_training_mean() {
        let x = data(60);
        let mean = x.target().iter().sum::<f64>() / 60.0;
        let params = RfParams {
            max_depth: Some(0),
            bootstrap: false,
            n_trees: 5,
            ..Default::default()
        };
        let m = RegressorSpec::rf(params, 3).fit(&x).unwrap();
        for v in m.predict(&x).unwrap() {
            assert!((v - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_target_predicts_constant() {
        let x = data(40).with_target(vec![4.25; 40]).unwrap();
        let m = RegressorSpec::rf(RfParams::default(), 3).fit(&x).unwrap();
        assert!(m.predict(&data(10)).unwrap().iter().all(|&v| v == 4.25));
    }

    #[test]
    fn predictions_inside_training_range() {
        let x = data(120);
        let m = RegressorSpec::rf(RfParams::default(), 9).fit_regressor(&x).unwrap();
        let (lo, hi) = m.target_range();
        let probe = FeatureMatrix::from_rows(
            x.columns().to_vec(),
            &[vec![100.0, -100.0, 50.0], vec![-9.0, 9.0, -3.0]],
            vec![0.0, 0.0],
        )
        .unwrap();
        use super::super::Model;
        for v in m.predict(&x).unwrap().into_iter().chain(m.predict(&probe).unwrap()) {
            assert!(v >= lo && v <= hi);
        }
    }

    #[test]
    fn mtry_out_of_range() {
        let params = RfParams {
            mtry: Some(4),
            ..Default::default()
        };
        assert!(matches!(
            RegressorSpec::rf(params, 0).fit(&data(20)),
            Err(Error::InvalidParam(_))
        ));
    }

    #[test]
    fn thread_count_does_not_matter() {
        let x = data(150);
        let spec = RegressorSpec::rf(RfParams::default(), 17);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| spec.fit(&x).unwrap().predict(&x).unwrap())
        };
        let one = run(1);
        let four = run(4);
        assert!(one.iter().zip(&four).all(|(a, b)| a.to_bits() == b.to_bits()));
    }
}
