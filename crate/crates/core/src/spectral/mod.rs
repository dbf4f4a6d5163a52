//! Row statistics, outlier-location predictors and extreme eigenvalues.

mod lambert;
mod lanczos;

pub use lambert::lambert_w0;
pub use lanczos::{lanczos, EigenOptions, RitzPair, SpectrumResult, SymOperator, Which};

use std::f64::consts::E;

use crate::error::{invalid, Result};
use crate::sampler::SparseSymMatrix;

/// `||row_i(M)||_2^2` for every row.
pub fn row_norms_sq(m: &SparseSymMatrix) -> Vec<f64> {
    (0..m.n()).map(|i| m.row(i).1.iter().map(|v| v * v).sum()).collect()
}

/// Predictor inputs and outputs for one matrix realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoSummary {
    pub max_row_sq: f64,
    pub np: f64,
    pub theta: f64,
    pub rho: f64,
}

/// `theta = sqrt(max(max_row_sq - np, np))`, `rho = theta + np / theta`.
///
/// `rho >= 2 sqrt(np)` with equality iff `max_row_sq <= 2 np`.
pub fn rho(max_row_sq: f64, np: f64) -> RhoSummary {
    let theta = (max_row_sq - np).max(np).sqrt();
    RhoSummary { max_row_sq, np, theta, rho: theta + np / theta }
}

fn check_np(n: usize, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) || n < 2 {
        return Err(invalid(format!("need n >= 2 and 0 < p < 1, got n={n}, p={p}")));
    }
    Ok(n as f64 * p)
}

/// Asymptotic maximum degree `e np exp(W0((log n - np) / (e np)))` of an
/// Erdos-Renyi graph.
pub fn predict_max_degree(n: usize, p: f64) -> Result<f64> {
    let np = check_np(n, p)?;
    let z = ((n as f64).ln() - np) / (E * np);
    Ok(E * np * lambert_w0(z)?.exp())
}

/// `rho` evaluated at the predicted maximum degree.
pub fn rho_g_predictor(n: usize, p: f64) -> Result<f64> {
    let np = n as f64 * p;
    Ok(rho(predict_max_degree(n, p)?, np).rho)
}

/// Edge of the BBP transition: `theta + 1/theta` above 1, else 2.
pub fn bbp_prediction(theta: f64) -> f64 {
    if theta <= 1.0 {
        2.0
    } else {
        theta + 1.0 / theta
    }
}

/// The `k` eigenvalues of largest magnitude with default options.
pub fn extreme_eigenvalues(m: &SparseSymMatrix, k: usize, tol: f64, max_iter: usize) -> Result<SpectrumResult> {
    let mut opts = EigenOptions::new(k);
    opts.tol = tol;
    opts.max_iter = max_iter;
    lanczos(m, &opts)
}

/// `||M|| / max_i ||row_i(M)||_2`.
pub fn seginer_ratio(m: &SparseSymMatrix, tol: f64) -> Result<f64> {
    let max_row = row_norms_sq(m).into_iter().fold(0.0f64, f64::max).sqrt();
    if max_row == 0.0 {
        return Err(invalid("seginer ratio of the zero matrix"));
    }
    let spec = extreme_eigenvalues(m, 1, tol, 1000)?;
    Ok(spec.abs_kth(1) / max_row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::DiagMode;

    #[test]
    fn rho_examples() {
        let r = rho(500.0, 100.0);
        assert_eq!((r.theta, r.rho), (20.0, 25.0));
        let r = rho(150.0, 100.0);
        assert_eq!((r.theta, r.rho), (10.0, 20.0));
        let r = rho(200.0, 100.0);
        assert_eq!((r.theta, r.rho), (10.0, 20.0));
    }

    #[test]
    fn row_norms_of_small_matrix() {
        let d = [0.0, 1.0, -0.8, 0.0, 1.0, 0.0, 0.6, 0.5, -0.8, 0.6, 0.0, 0.3, 0.0, 0.5, 0.3, 0.0];
        let m = SparseSymMatrix::from_dense(4, DiagMode::Zero, &d).unwrap();
        let r = row_norms_sq(&m);
        for (a, b) in r.iter().zip([1.64, 1.61, 1.09, 0.34]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn degree_prediction_at_log_n() {
        let n = 10_000usize;
        let p = (n as f64).ln() / n as f64;
        let g = predict_max_degree(n, p).unwrap();
        assert!((g - E * n as f64 * p).abs() < 1e-9);
        let np = n as f64 * p;
        let ratio = rho_g_predictor(n, p).unwrap() / np.sqrt();
        let expect = (E - 1.0).sqrt() + 1.0 / (E - 1.0).sqrt();
        assert!((ratio - expect).abs() < 1e-10);
    }

    #[test]
    fn bbp() {
        assert_eq!(bbp_prediction(0.5), 2.0);
        assert_eq!(bbp_prediction(1.0), 2.0);
        assert_eq!(bbp_prediction(2.0), 2.5);
    }
}
