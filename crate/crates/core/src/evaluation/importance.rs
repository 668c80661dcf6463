use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::rmse;
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::learners::{check_columns, Model};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceEntry {
    pub rank: usize,
    pub feature: String,
    /// Mean increase in RMSE over the permutations (µg/m³).
    pub mean_rmse_loss: f64,
    /// Sample SD of that increase; 0 for a single permutation.
    pub sd_rmse_loss: f64,
}

/// Permutation importance: for each column, shuffle it `n_perm` times and
/// record how much the RMSE on `x` rises over the unshuffled baseline. The
/// model is never refit.
///
/// Column `j` is shuffled with a ChaCha stream keyed by `(seed, j)`, so the
/// result does not depend on evaluation order. Entries come back ranked by
/// mean loss, largest first; ties keep column order.
pub fn permutation_importance(
    model: &dyn Model,
    x: &FeatureMatrix,
    n_perm: usize,
    seed: u64,
) -> Result<Vec<ImportanceEntry>> {
    if n_perm == 0 {
        return Err(Error::InvalidParam("n_perm must be >= 1".into()));
    }
    check_columns(model.columns(), x)?;
    let baseline = rmse(&model.predict(x)?, x.target())?;

    let mut entries: Vec<ImportanceEntry> = (0..x.n_cols())
        .into_par_iter()
        .map(|j| -> Result<ImportanceEntry> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(j as u64);
            let original = x.column(j);
            let mut losses = Vec::with_capacity(n_perm);
            for _ in 0..n_perm {
                let mut shuffled = original.clone();
                shuffled.shuffle(&mut rng);
                let permuted = x.with_column(j, &shuffled);
                losses.push(rmse(&model.predict(&permuted)?, x.target())? - baseline);
            }
            let mean = losses.iter().sum::<f64>() / n_perm as f64;
            let sd = if n_perm > 1 {
                (losses.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (n_perm - 1) as f64).sqrt()
            } else {
                0.0
            };
            Ok(ImportanceEntry {
                feature: x.columns()[j].clone(),
                mean_rmse_loss: mean,
                sd_rmse_loss: sd,
                rank: 0,
            })
        })
        .collect::<Result<_>>()?;

    entries.sort_by(|a, b| b.mean_rmse_loss.total_cmp(&a.mean_rmse_loss));
    for (k, e) in entries.iter_mut().enumerate() {
        e.rank = k + 1;
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{GlmParams, Learner, RegressorSpec};

    #[derive(Debug)]
    struct FirstColumn(Vec<String>);

    impl Model for FirstColumn {
        fn columns(&self) -> &[String] {
            &self.0
        }
        fn predict(&self, x: &FeatureMatrix) -> Result<Vec<f64>> {
            Ok(x.rows().map(|r| r[0]).collect())
        }
    }

    fn noisy(n: usize) -> FeatureMatrix {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let t = i as f64;
                vec![(t * 0.9).sin(), ((t * 7.3).cos() * 100.0).fract(), (t * 0.21).cos()]
            })
            .collect();
        let y = rows.iter().map(|r| 2.0 * r[0] + 0.3 * r[2]).collect();
        FeatureMatrix::from_rows(vec!["a".into(), "noise".into(), "c".into()], &rows, y).unwrap()
    }

    #[test]
    fn unused_column_scores_zero() {
        let x = noisy(50);
        let m = FirstColumn(x.columns().to_vec());
        let imp = permutation_importance(&m, &x, 10, 1).unwrap();
        let noise = imp.iter().find(|e| e.feature == "noise").unwrap();
        assert_eq!(noise.mean_rmse_loss, 0.0);
        assert_eq!(imp[0].feature, "a");
        assert_eq!(imp[0].rank, 1);
    }

    #[test]
    fn zero_coefficient_scores_zero() {
        // A constant column is standardized to zero and gets no weight.
        let base = noisy(40);
        let x = base.with_appended_column("flat", &[1.5; 40]).unwrap();
        let m = RegressorSpec::glm(GlmParams::default()).fit(&x).unwrap();
        let imp = permutation_importance(m.as_ref(), &x, 10, 7).unwrap();
        let flat = imp.iter().find(|e| e.feature == "flat").unwrap();
        assert!(flat.mean_rmse_loss.abs() <= 1e-9);
    }

    #[test]
    fn target_copy_ranks_first() {
        let base = noisy(80);
        // A target the features cannot explain on their own.
        let y: Vec<f64> = (0..80).map(|i| base.target()[i] + (i as f64 * 1.7).sin()).collect();
        let base = base.with_target(y.clone()).unwrap();
        let x = base.with_appended_column("target_copy", &y).unwrap();
        let m = RegressorSpec::glm(GlmParams::default()).fit(&x).unwrap();
        let imp = permutation_importance(m.as_ref(), &x, 10, 3).unwrap();
        assert_eq!(imp[0].feature, "target_copy");
    }

    #[test]
    fn deterministic_and_single_perm_sd() {
        let x = noisy(30);
        let m = FirstColumn(x.columns().to_vec());
        let a = permutation_importance(&m, &x, 10, 99).unwrap();
        let b = permutation_importance(&m, &x, 10, 99).unwrap();
        assert_eq!(a, b);
        let one = permutation_importance(&m, &x, 1, 99).unwrap();
        assert!(one.iter().all(|e| e.sd_rmse_loss == 0.0));
    }

    #[test]
    fn schema_checked() {
        let x = noisy(10);
        let m = FirstColumn(vec!["other".into()]);
        assert!(matches!(
            permutation_importance(&m, &x, 3, 0),
            Err(Error::FeatureMismatch { .. })
        ));
    }
}
