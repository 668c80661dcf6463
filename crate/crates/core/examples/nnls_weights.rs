//! Nonnegative least squares: combine three forecasts without negative weights.

use aerostack::ensemble::{kkt_violation, nnls};
use nalgebra::{DMatrix, DVector};

fn main() -> aerostack::Result<()> {
    // Columns: a good forecast, a biased one, one anti-correlated with the target.
    let y = [3.0, 5.0, 4.0, 8.0, 6.0, 7.0];
    let good = [3.2, 4.8, 4.1, 7.7, 6.1, 7.2];
    let biased = [4.0, 6.1, 5.2, 9.0, 7.1, 8.0];
    let anti = [7.0, 5.0, 6.0, 2.0, 4.0, 3.0];
    let a = DMatrix::from_fn(6, 3, |i, j| [good, biased, anti][j][i]);
    let b = DVector::from_column_slice(&y);
    let s = nnls(&a, &b)?;
    println!("weights {:?}", s.weights);
    println!("residual norm {:.4} after {} iterations", s.residual_norm, s.iterations);
    println!("KKT violation {:.2e}", kkt_violation(&a, &b, &s.weights));
    Ok(())
}
