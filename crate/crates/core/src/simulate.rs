//! Synthetic data from the AR(1) and regression models.

use nalgebra::DMatrix;

use crate::distributions::{Family, TwoPieceParams};
use crate::error::Result;
use crate::rng::{sample_two_piece, RngStream};

/// Pre-samples discarded before the recorded AR series starts.
pub const AR_WARMUP: usize = 50;

/// y_t = φ₁ y_{t−1} + ε_t with ε_t from `family`; the first value is an error
/// draw and `AR_WARMUP` leading values are dropped.
pub fn simulate_ar(
    stream: &mut RngStream,
    family: Family,
    phi1: f64,
    errors: &TwoPieceParams,
    len: usize,
) -> Result<Vec<f64>> {
    let mut y = sample_two_piece(stream, family, errors)?;
    let mut out = Vec::with_capacity(len);
    for t in 1..(AR_WARMUP + len) {
        y = phi1 * y + sample_two_piece(stream, family, errors)?;
        if t >= AR_WARMUP {
            out.push(y);
        }
    }
    Ok(out)
}

/// Regression data with an intercept and one U(0, 1) covariate drawn from a
/// sub-stream of `stream`.
pub fn simulate_regression(
    stream: &mut RngStream,
    family: Family,
    coef: &[f64; 2],
    errors: &TwoPieceParams,
    n: usize,
) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let mut cov_stream = stream.derive(0x00C0_FA7E);
    let xs: Vec<f64> = (0..n).map(|_| cov_stream.uniform()).collect();
    let x = DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { xs[i] });
    let y = xs
        .iter()
        .map(|xi| Ok(coef[0] + coef[1] * xi + sample_two_piece(stream, family, errors)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok((y, x))
}
