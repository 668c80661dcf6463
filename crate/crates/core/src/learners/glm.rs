use nalgebra::{DMatrix, DVector};

use super::GlmParams;
use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, Standardizer};

/// Pivots below this fraction of the largest diagonal entry mark the normal
/// equations as singular.
const PIVOT_RTOL: f64 = 1e-12;

/// Gaussian GLM with identity link: ridge regression with an unpenalized
/// intercept.
///
/// Columns are standardized on the training rows and the target centered,
/// then `(Z'Z + lambda I) beta = Z'y` is solved by Cholesky.
#[derive(Debug, Clone)]
pub struct RidgeGlm {
    standardizer: Standardizer,
    beta: Vec<f64>,
    y_mean: f64,
}

impl RidgeGlm {
    pub fn fit(x: &FeatureMatrix, params: &GlmParams) -> Result<Self> {
        let lambda = params.ridge_lambda;
        if !(lambda >= 0.0) {
            return Err(Error::InvalidParam("glm.ridge_lambda must be >= 0".into()));
        }
        let standardizer = Standardizer::fit_all(x)?;
        let z = standardizer.apply(x)?;
        let n = z.n_rows();
        let p = z.n_cols();
        let y = x.target();
        let y_mean = y.iter().sum::<f64>() / n as f64;

        let design = DMatrix::from_row_iterator(n, p, z.rows().flatten().copied());
        let yc = DVector::from_iterator(n, y.iter().map(|v| v - y_mean));
        let mut gram = design.transpose() * &design;
        for j in 0..p {
            gram[(j, j)] += lambda;
        }
        let rhs = design.transpose() * yc;

        let max_diag = (0..p).map(|j| gram[(j, j)]).fold(0.0, f64::max);
        let chol = gram.cholesky().ok_or(Error::DegenerateMatrix)?;
        let l = chol.l_dirty();
        if max_diag <= 0.0 || (0..p).any(|j| l[(j, j)] * l[(j, j)] <= PIVOT_RTOL * max_diag) {
            return Err(Error::DegenerateMatrix);
        }
        let beta = chol.solve(&rhs);
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::DegenerateMatrix);
        }
        Ok(Self {
            standardizer,
            beta: beta.iter().copied().collect(),
            y_mean,
        })
    }

    /// Slopes on the original feature scale.
    pub fn coefficients(&self) -> Vec<f64> {
        self.beta
            .iter()
            .zip(self.standardizer.sd())
            .map(|(b, s)| b / s)
            .collect()
    }

    /// Intercept on the original feature scale.
    pub fn intercept(&self) -> f64 {
        self.y_mean
            - self
                .coefficients()
                .iter()
                .zip(self.standardizer.mean())
                .map(|(c, m)| c * m)
                .sum::<f64>()
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mean = self.standardizer.mean();
        let sd = self.standardizer.sd();
        self.y_mean
            + row
                .iter()
                .enumerate()
                .map(|(j, v)| self.beta[j] * (v - mean[j]) / sd[j])
                .sum::<f64>()
    }
}
