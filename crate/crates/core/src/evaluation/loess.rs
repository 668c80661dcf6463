//! Locally linear LOESS with tricube weights.

use crate::error::{Error, Result};

fn tricube(u: f64) -> f64 {
    if u >= 1.0 {
        0.0
    } else {
        (1.0 - u.powi(3)).powi(3)
    }
}

/// Smoothed value at every input point, returned in input order.
///
/// Each fit uses the `ceil(span * n)` nearest points by `|x - x_i|`. The
/// bandwidth is the largest of those distances, so the farthest neighbour
/// gets zero weight. Where the local design is flat (all neighbours share
/// one `x`, or all weights vanish) the weighted mean is used instead.
pub fn loess_smooth(x: &[f64], y: &[f64], span: f64) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.is_empty() {
        return Err(Error::EmptyInput("loess over zero points"));
    }
    if !(span > 0.0 && span <= 1.0) {
        return Err(Error::InvalidParam(format!("loess span must lie in (0, 1], got {span}")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("loess input"));
    }
    let n = x.len();
    let q = ((span * n as f64).ceil() as usize).clamp(1, n);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let xs: Vec<f64> = order.iter().map(|&i| x[i]).collect();
    let ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();

    let mut out = vec![0.0; n];
    let mut lo = 0;
    for (k, &x0) in xs.iter().enumerate() {
        while lo + q < n && xs[lo + q] - x0 < x0 - xs[lo] {
            lo += 1;
        }
        let win = lo..lo + q;
        let d_max = (x0 - xs[lo]).max(xs[lo + q - 1] - x0);
        let w: Vec<f64> = win
            .clone()
            .map(|j| if d_max > 0.0 { tricube((xs[j] - x0).abs() / d_max) } else { 1.0 })
            .collect();
        out[order[k]] = local_fit(&xs[win.clone()], &ys[win], &w, x0);
    }
    Ok(out)
}

fn local_fit(x: &[f64], y: &[f64], w: &[f64], x0: f64) -> f64 {
    let sw: f64 = w.iter().sum();
    if sw <= 0.0 {
        return y.iter().sum::<f64>() / y.len() as f64;
    }
    let mx = w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = w.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / sw;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for ((wi, xi), yi) in w.iter().zip(x).zip(y) {
        sxx += wi * (xi - mx).powi(2);
        sxy += wi * (xi - mx) * (yi - my);
    }
    let spread = x.iter().map(|v| (v - mx).abs()).fold(0.0, f64::max);
    if sxx <= 1e-12 * sw * spread.max(1.0).powi(2) {
        return my;
    }
    my + sxy / sxx * (x0 - mx)
}
