//! Least-squares fit of `N(B)/B` against `(log B)^2, log B, 1`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
    pub residual_norm: f64,
    pub samples: usize,
}

/// `samples` are `(B, N)`; needs at least four distinct `B > 1`.
pub fn fit_log_quadratic(samples: &[(f64, f64)]) -> Result<FitResult, CliError> {
    let mut bounds: Vec<f64> = samples.iter().map(|s| s.0).collect();
    bounds.sort_by(f64::total_cmp);
    bounds.dedup();
    if samples.len() < 4 || bounds.len() != samples.len() || bounds.iter().any(|&b| !(b > 1.0 && b.is_finite())) {
        return Err(CliError::DegenerateDesignMatrix(format!(
            "need at least 4 samples with distinct finite B > 1, got {}",
            samples.len()
        )));
    }
    let n = samples.len();
    let a = DMatrix::from_fn(n, 3, |i, j| samples[i].0.ln().powi(2 - j as i32));
    let y = DVector::from_iterator(n, samples.iter().map(|&(b, c)| c / b));
    // Columns differ in scale by (log B)^2; equilibrate before the SVD.
    let scale: Vec<f64> = (0..3).map(|j| a.column(j).norm()).collect();
    let scaled = DMatrix::from_fn(n, 3, |i, j| a[(i, j)] / scale[j]);
    let svd = scaled.svd(true, true);
    let smax = svd.singular_values.max();
    if svd.rank(smax * 1e-12) < 3 {
        return Err(CliError::DegenerateDesignMatrix("design matrix has rank < 3".into()));
    }
    let z = svd
        .solve(&y, smax * 1e-12)
        .map_err(|e| CliError::DegenerateDesignMatrix(e.to_string()))?;
    let x: Vec<f64> = (0..3).map(|j| z[j] / scale[j]).collect();
    let residual = &a * DVector::from_column_slice(&x) - &y;
    Ok(FitResult {
        c2: x[0],
        c1: x[1],
        c0: x[2],
        residual_norm: residual.norm(),
        samples: n,
    })
}

/// `count` log-spaced integers from `lo` to `hi` inclusive, deduplicated.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<u64> {
    let mut out: Vec<u64> = (0..count)
        .map(|k| {
            let t = if count == 1 { 0.0 } else { k as f64 / (count - 1) as f64 };
            (lo.ln() + t * (hi.ln() - lo.ln())).exp().round() as u64
        })
        .collect();
    out.dedup();
    out
}
