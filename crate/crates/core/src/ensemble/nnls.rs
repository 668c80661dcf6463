//! Lawson–Hanson active-set solver for `min |Aw - b|^2` subject to `w >= 0`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative KKT tolerance, scaled by `max |A'b|`.
pub const KKT_RTOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct NnlsSolution {
    pub weights: Vec<f64>,
    /// `|Aw - b|` (Euclidean, not squared).
    pub residual_norm: f64,
    pub iterations: usize,
}

/// KKT tolerance used for a given problem.
pub fn kkt_tolerance(a: &DMatrix<f64>, b: &DVector<f64>) -> f64 {
    KKT_RTOL * (a.transpose() * b).amax()
}

/// Largest violation of the KKT conditions at `w`, measured against
/// `g = A'(Aw - b)`: `|g_i|` where `w_i > 0`, `max(0, -g_i)` where `w_i = 0`,
/// and any negative `w_i` itself.
pub fn kkt_violation(a: &DMatrix<f64>, b: &DVector<f64>, w: &[f64]) -> f64 {
    let wv = DVector::from_column_slice(w);
    let g = a.transpose() * (a * &wv - b);
    w.iter()
        .zip(g.iter())
        .map(|(&wi, &gi)| {
            if wi > 0.0 {
                gi.abs()
            } else if wi == 0.0 {
                (-gi).max(0.0)
            } else {
                -wi
            }
        })
        .fold(0.0, f64::max)
}

fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>, cols: &[usize]) -> DVector<f64> {
    let sub = a.select_columns(cols);
    let svd = sub.svd(true, true);
    let cutoff = svd.singular_values.max() * 1e-12;
    svd.solve(b, cutoff)
        .unwrap_or_else(|_| DVector::zeros(cols.len()))
}

/// Solves the nonnegative least-squares problem.
///
/// The outer loop moves the coordinate with the largest positive negative
/// gradient into the passive set; the inner loop solves the unconstrained
/// problem on the passive set and, if that leaves some passive coordinate
/// non-positive, steps back toward the feasible region and drops it. At
/// most `3k` outer iterations are run.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<NnlsSolution> {
    let (n, k) = a.shape();
    if n == 0 || k == 0 {
        return Err(Error::EmptyInput("nnls needs a non-empty design matrix"));
    }
    if b.len() != n {
        return Err(Error::LengthMismatch(b.len(), n));
    }
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("nnls input"));
    }

    let tol = kkt_tolerance(a, b);
    let max_iter = 3 * k;
    let mut w = DVector::zeros(k);
    let mut passive = vec![false; k];
    let mut iterations = 0;

    loop {
        // Negative gradient of 1/2 |Aw - b|^2.
        let dual = a.transpose() * (b - a * &w);
        let candidate = (0..k)
            .filter(|&j| !passive[j] && dual[j] > tol)
            .max_by(|&i, &j| dual[i].total_cmp(&dual[j]).then(j.cmp(&i)));
        let Some(enter) = candidate else { break };
        if iterations == max_iter {
            return Err(Error::MaxIterations(max_iter));
        }
        iterations += 1;
        passive[enter] = true;

        let mut first = true;
        loop {
            let cols: Vec<usize> = (0..k).filter(|&j| passive[j]).collect();
            let s = least_squares(a, b, &cols);
            if s.iter().all(|&v| v > 0.0) {
                w.fill(0.0);
                for (&j, &v) in cols.iter().zip(s.iter()) {
                    w[j] = v;
                }
                break;
            }
            if first && cols.iter().zip(s.iter()).any(|(&j, &v)| j == enter && v <= 0.0) {
                // The gradient test admitted `enter` but the passive solve
                // rejects it; only rounding separates the two, so stop.
                passive[enter] = false;
                return Ok(finish(a, b, w, iterations));
            }
            first = false;

            let mut alpha = f64::INFINITY;
            let mut blocking = cols[0];
            for (&j, &v) in cols.iter().zip(s.iter()) {
                if v <= 0.0 {
                    let denom = w[j] - v;
                    let ratio = if denom > 0.0 { w[j] / denom } else { 0.0 };
                    if ratio < alpha {
                        alpha = ratio;
                        blocking = j;
                    }
                }
            }
            for (&j, &v) in cols.iter().zip(s.iter()) {
                w[j] += alpha * (v - w[j]);
            }
            w[blocking] = 0.0;
            for &j in &cols {
                if w[j] <= 0.0 {
                    w[j] = 0.0;
                    passive[j] = false;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    Ok(finish(a, b, w, iterations))
}

fn finish(a: &DMatrix<f64>, b: &DVector<f64>, w: DVector<f64>, iterations: usize) -> NnlsSolution {
    let residual_norm = (a * &w - b).norm();
    NnlsSolution {
        weights: w.iter().copied().collect(),
        residual_norm,
        iterations,
    }
}
