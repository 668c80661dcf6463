use super::SvrParams;
use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, Standardizer};

/// Linear epsilon-insensitive support vector regression.
///
/// Minimizes `1/2 |w|^2 + C * sum(max(0, |y - w.z - b| - eps))` over
/// standardized features `z`. The target is centered first and the offset
/// around that centre is carried as an extra constant feature, so the
/// problem is solved by cyclic coordinate descent on the box-constrained
/// dual, one coordinate per training row, until the largest projected
/// gradient falls below `tol` or `max_epochs` passes have run.
#[derive(Debug, Clone)]
pub struct LinearSvr {
    standardizer: Standardizer,
    /// Slopes on the standardized scale.
    weights: Vec<f64>,
    intercept: f64,
    epochs: usize,
}

/// Constant appended to every standardized row to carry the offset.
const BIAS_FEATURE: f64 = 1.0;

impl LinearSvr {
    pub fn fit(x: &FeatureMatrix, params: &SvrParams) -> Result<Self> {
        if !(params.c > 0.0) || !(params.epsilon >= 0.0) {
            return Err(Error::InvalidParam("svr needs c > 0 and epsilon >= 0".into()));
        }
        let standardizer = Standardizer::fit_all(x)?;
        let z = standardizer.apply(x)?;
        let n = z.n_rows();
        let p = z.n_cols();
        let y = x.target();
        let y_mean = y.iter().sum::<f64>() / n as f64;
        let yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();

        let row = |i: usize| z.row(i);
        let q_diag: Vec<f64> = (0..n)
            .map(|i| row(i).iter().map(|v| v * v).sum::<f64>() + BIAS_FEATURE * BIAS_FEATURE)
            .collect();

        let upper = params.c;
        let eps = params.epsilon;
        let mut beta = vec![0.0; n];
        // w[p] is the offset weight.
        let mut w = vec![0.0; p + 1];
        let mut epochs = 0;

        for _ in 0..params.max_epochs {
            epochs += 1;
            let mut max_violation: f64 = 0.0;
            for i in 0..n {
                let zi = row(i);
                let wx: f64 = zi.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + w[p] * BIAS_FEATURE;
                let g = wx - yc[i];
                let gp = g + eps;
                let gn = g - eps;
                let b = beta[i];

                let violation = if b == 0.0 {
                    (-gp).max(gn).max(0.0)
                } else if b >= upper {
                    gp.max(0.0)
                } else if b > 0.0 {
                    gp.abs()
                } else if b <= -upper {
                    (-gn).max(0.0)
                } else {
                    gn.abs()
                };
                max_violation = max_violation.max(violation);
                if violation == 0.0 {
                    continue;
                }

                let qii = q_diag[i];
                let step = if gp < qii * b {
                    -gp / qii
                } else if gn > qii * b {
                    -gn / qii
                } else {
                    -b
                };
                let nb = (b + step).clamp(-upper, upper);
                let delta = nb - b;
                if delta != 0.0 {
                    beta[i] = nb;
                    for (wj, zj) in w.iter_mut().zip(zi) {
                        *wj += delta * zj;
                    }
                    w[p] += delta * BIAS_FEATURE;
                }
            }
            if max_violation < params.tol {
                break;
            }
        }

        let intercept = y_mean + w[p] * BIAS_FEATURE;
        w.truncate(p);
        if w.iter().any(|v| !v.is_finite()) || !intercept.is_finite() {
            return Err(Error::NonFinite("svr weights"));
        }
        Ok(Self {
            standardizer,
            weights: w,
            intercept,
            epochs,
        })
    }

    /// Slopes on the original feature scale.
    pub fn coefficients(&self) -> Vec<f64> {
        self.weights
            .iter()
            .zip(self.standardizer.sd())
            .map(|(w, s)| w / s)
            .collect()
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
            - self
                .coefficients()
                .iter()
                .zip(self.standardizer.mean())
                .map(|(c, m)| c * m)
                .sum::<f64>()
    }

    pub fn epochs(&self) -> usize {
        self.epochs
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mean = self.standardizer.mean();
        let sd = self.standardizer.sd();
        self.intercept
            + row
                .iter()
                .enumerate()
                .map(|(j, v)| self.weights[j] * (v - mean[j]) / sd[j])
                .sum::<f64>()
    }
}
