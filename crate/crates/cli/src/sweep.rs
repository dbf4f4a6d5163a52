use rayon::prelude::*;

use outlierlab::sampler::{make_distribution, sample_erdos_renyi, sample_sparse_wigner, DiagMode, SparseSymMatrix};
use outlierlab::spectral::{extreme_eigenvalues, rho, rho_g_predictor, row_norms_sq};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::trial_seed;

pub const SWEEP_HEADER: &str =
    "c,n,trial,lambda_abs_k,two_sqrt_np,rho,rho_g_pred,max_row_norm,max_degree,converged";
pub const EIGEN_TOL: f64 = 1e-9;
pub const EIGEN_MAX_ITER: usize = 3000;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub c: f64,
    pub n: usize,
    pub trial: usize,
    /// `|lambda_(|k|)|`; NaN when the solver did not converge.
    pub lambda_abs_k: f64,
    pub two_sqrt_np: f64,
    pub rho: f64,
    pub rho_g_pred: f64,
    pub max_row_norm: f64,
    pub max_degree: usize,
    pub converged: bool,
}

impl SweepRow {
    pub fn np(&self) -> f64 {
        (self.two_sqrt_np / 2.0).powi(2)
    }

    pub fn lambda_ratio(&self) -> f64 {
        self.lambda_abs_k / self.two_sqrt_np
    }
}

/// `p = c log n / n`.
pub fn density(n: usize, c: f64) -> f64 {
    c * (n as f64).ln() / n as f64
}

pub(crate) fn sample_matrix(cfg: &ExperimentConfig, p: f64, trial: usize, c: f64) -> Result<SparseSymMatrix, CliError> {
    let seed = trial_seed(cfg.master_seed, trial, c);
    Ok(if cfg.centered {
        let dist = make_distribution(cfg.dist, cfg.dist.natural_bound_sq())?;
        sample_sparse_wigner(cfg.n, p, &dist, DiagMode::Zero, seed)?
    } else {
        sample_erdos_renyi(cfg.n, p, seed)?
    })
}

fn sweep_one(cfg: &ExperimentConfig, c: f64, trial: usize) -> Result<SweepRow, CliError> {
    let p = density(cfg.n, c);
    if !(p > 0.0 && p < 1.0) {
        return Err(CliError::Config(format!("c = {c} gives p = {p} outside (0, 1)")));
    }
    let np = cfg.n as f64 * p;
    let m = sample_matrix(cfg, p, trial, c)?;
    let max_row_sq = row_norms_sq(&m).into_iter().fold(0.0, f64::max);
    let max_degree = (0..m.n()).map(|i| m.degree(i)).max().unwrap_or(0);
    let (lambda_abs_k, converged) = match extreme_eigenvalues(&m, cfg.k, EIGEN_TOL, EIGEN_MAX_ITER) {
        Ok(s) => (s.abs_kth(cfg.k), true),
        Err(outlierlab::Error::NotConverged { .. }) => (f64::NAN, false),
        Err(e) => return Err(e.into()),
    };
    Ok(SweepRow {
        c,
        n: cfg.n,
        trial,
        lambda_abs_k,
        two_sqrt_np: 2.0 * np.sqrt(),
        rho: rho(max_row_sq, np).rho,
        rho_g_pred: rho_g_predictor(cfg.n, p)?,
        max_row_norm: max_row_sq.sqrt(),
        max_degree,
        converged,
    })
}

/// One row per `(c, trial)`, sorted by `(c, trial)`.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>, CliError> {
    cfg.validate()?;
    let jobs: Vec<(f64, usize)> = cfg.c_grid.iter().flat_map(|&c| (0..cfg.trials).map(move |t| (c, t))).collect();
    let mut rows = jobs.par_iter().map(|&(c, t)| sweep_one(cfg, c, t)).collect::<Result<Vec<_>, _>>()?;
    rows.sort_by(|a, b| a.c.total_cmp(&b.c).then(a.trial.cmp(&b.trial)));
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("#schema=1 experiment=sweep\n{SWEEP_HEADER}\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.c,
            r.n,
            r.trial,
            r.lambda_abs_k,
            r.two_sqrt_np,
            r.rho,
            r.rho_g_pred,
            r.max_row_norm,
            r.max_degree,
            u8::from(r.converged)
        ));
    }
    out
}

pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRow>, CliError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let schema = lines.next().ok_or_else(|| CliError::Config("empty sweep CSV".into()))?;
    if !schema.starts_with("#schema=1") {
        return Err(CliError::Config(format!("unsupported schema line `{schema}`")));
    }
    if lines.next() != Some(SWEEP_HEADER) {
        return Err(CliError::Config("sweep CSV header mismatch".into()));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        let bad = || CliError::Config(format!("sweep CSV data line {}: malformed", i + 1));
        if f.len() != 10 {
            return Err(bad());
        }
        let num = |j: usize| f[j].parse::<f64>().map_err(|_| bad());
        let int = |j: usize| f[j].parse::<usize>().map_err(|_| bad());
        rows.push(SweepRow {
            c: num(0)?,
            n: int(1)?,
            trial: int(2)?,
            lambda_abs_k: num(3)?,
            two_sqrt_np: num(4)?,
            rho: num(5)?,
            rho_g_pred: num(6)?,
            max_row_norm: num(7)?,
            max_degree: int(8)?,
            converged: int(9)? == 1,
        });
    }
    if rows.is_empty() {
        return Err(CliError::Config("sweep CSV has no data rows".into()));
    }
    Ok(rows)
}

/// Sandwich violations: `rho >= max(max_row_norm, 2 sqrt(np))` on every row.
pub fn sandwich_violations(rows: &[SweepRow]) -> Vec<String> {
    rows.iter()
        .filter(|r| r.rho < r.max_row_norm * (1.0 - 1e-12) || r.rho < r.two_sqrt_np * (1.0 - 1e-12))
        .map(|r| format!("c={} trial={}: rho={} max_row={} 2sqrt(np)={}", r.c, r.trial, r.rho, r.max_row_norm, r.two_sqrt_np))
        .collect()
}
