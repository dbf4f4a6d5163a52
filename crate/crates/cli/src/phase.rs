use std::fmt::Write as _;

use outlierlab::spectral::rho_g_predictor;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::median;
use crate::sweep::{density, run_sweep, SweepRow};

/// `1 / log(4/e)`: above it the predictor sits at the bulk edge.
pub fn phase_threshold() -> f64 {
    1.0 / (4.0f64.ln() - 1.0)
}

/// `rho_G / (2 sqrt(np))` at `p = c log n / n`.
pub fn predictor_ratio(n: usize, c: f64) -> Result<f64, CliError> {
    let p = density(n, c);
    Ok(rho_g_predictor(n, p)? / (2.0 * (n as f64 * p).sqrt()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub c: f64,
    pub trials: usize,
    /// Fraction of converged trials with `|lambda_(|k|)| > (1 + eps) 2 sqrt(np)`.
    pub outlier_fraction: f64,
    pub median_ratio: f64,
    pub predictor_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseReport {
    pub eps: f64,
    pub points: Vec<PhasePoint>,
    /// Interpolated `c` where the outlier fraction falls through 1/2.
    pub crossing: Option<f64>,
    pub threshold: f64,
}

impl PhaseReport {
    pub fn point(&self, c: f64) -> Option<&PhasePoint> {
        self.points.iter().find(|p| p.c == c)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("#schema=1 experiment=phase_check eps={}\nc,trials,outlier_fraction,median_ratio,predictor_ratio\n", self.eps);
        for p in &self.points {
            let _ = writeln!(out, "{},{},{},{},{}", p.c, p.trials, p.outlier_fraction, p.median_ratio, p.predictor_ratio);
        }
        let crossing = self.crossing.map_or("none".to_string(), |c| c.to_string());
        let _ = writeln!(out, "# crossing={crossing} threshold={}", self.threshold);
        out
    }
}

pub fn phase_from_rows(rows: &[SweepRow], eps: f64) -> Result<PhaseReport, CliError> {
    let mut cs: Vec<f64> = rows.iter().map(|r| r.c).collect();
    cs.dedup();
    let n = rows.first().map(|r| r.n).ok_or_else(|| CliError::Config("no sweep rows".into()))?;
    let mut points = Vec::new();
    for &c in &cs {
        let mut ratios: Vec<f64> = rows.iter().filter(|r| r.c == c && r.converged).map(SweepRow::lambda_ratio).collect();
        let hits = ratios.iter().filter(|&&x| x > 1.0 + eps).count();
        let trials = ratios.len();
        points.push(PhasePoint {
            c,
            trials,
            outlier_fraction: if trials == 0 { f64::NAN } else { hits as f64 / trials as f64 },
            median_ratio: median(&mut ratios),
            predictor_ratio: predictor_ratio(n, c)?,
        });
    }
    let crossing = points.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        (a.outlier_fraction >= 0.5 && b.outlier_fraction < 0.5).then(|| {
            a.c + (a.outlier_fraction - 0.5) / (a.outlier_fraction - b.outlier_fraction) * (b.c - a.c)
        })
    });
    Ok(PhaseReport { eps, points, crossing, threshold: phase_threshold() })
}

pub fn run_phase_check(cfg: &ExperimentConfig) -> Result<PhaseReport, CliError> {
    phase_from_rows(&run_sweep(cfg)?, cfg.eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predictor_is_non_increasing_and_flat_past_threshold() {
        let n = 20_000;
        let th = phase_threshold();
        let grid: Vec<f64> = (1..=100).map(|i| 0.1 * i as f64).collect();
        let r: Vec<f64> = grid.iter().map(|&c| predictor_ratio(n, c).unwrap()).collect();
        assert!(r.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        for (&c, &v) in grid.iter().zip(&r) {
            if c > th {
                assert!((v - 1.0).abs() < 1e-12, "c={c}: {v}");
            } else {
                assert!(v >= 1.0 - 1e-12);
            }
        }
    }

    #[test]
    fn predictor_curve_values() {
        let n = 20_000;
        assert!((predictor_ratio(n, phase_threshold()).unwrap() - 1.0).abs() < 1e-10);
        // (sqrt(e-1) + 1/sqrt(e-1)) / 2
        let e1 = (std::f64::consts::E - 1.0).sqrt();
        assert!((predictor_ratio(n, 1.0).unwrap() - (e1 + 1.0 / e1) / 2.0).abs() < 1e-4);
        assert_eq!(predictor_ratio(n, 10.0).unwrap(), 1.0);
    }

    #[test]
    fn crossing_interpolates() {
        let mk = |c: f64, lam: f64| SweepRow {
            c,
            n: 1000,
            trial: 0,
            lambda_abs_k: lam,
            two_sqrt_np: 1.0,
            rho: 1.0,
            rho_g_pred: 1.0,
            max_row_norm: 1.0,
            max_degree: 1,
            converged: true,
        };
        let rows = vec![mk(1.0, 1.5), mk(1.0, 1.5), mk(2.0, 1.5), mk(2.0, 1.0), mk(3.0, 1.0), mk(3.0, 1.0)];
        let rep = phase_from_rows(&rows, 0.02).unwrap();
        assert_eq!(rep.points[1].outlier_fraction, 0.5);
        assert_eq!(rep.crossing, Some(2.0));
    }
}
