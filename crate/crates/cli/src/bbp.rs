use std::fmt::Write as _;

use rayon::prelude::*;

use outlierlab::sampler::{make_distribution, sample_deformed_wigner};
use outlierlab::spectral::{bbp_prediction, lanczos, EigenOptions, Which};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::{median, trial_seed};

#[derive(Debug, Clone, PartialEq)]
pub struct BbpPoint {
    pub theta: f64,
    pub lambdas: Vec<f64>,
    pub median: f64,
    pub prediction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BbpReport {
    pub n: usize,
    pub points: Vec<BbpPoint>,
}

impl BbpReport {
    pub fn point(&self, theta: f64) -> Option<&BbpPoint> {
        self.points.iter().find(|p| p.theta == theta)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("#schema=1 experiment=bbp\ntheta,n,trials,median_lambda1,prediction\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{},{},{},{}", p.theta, self.n, p.lambdas.len(), p.median, p.prediction);
        }
        out
    }
}

/// Top eigenvalue of `(1/sqrt n) Xi + theta e_1 e_1^T`; `c_grid` holds theta.
pub fn run_bbp(cfg: &ExperimentConfig) -> Result<BbpReport, CliError> {
    cfg.validate()?;
    let dist = make_distribution(cfg.dist, cfg.dist.natural_bound_sq())?;
    let jobs: Vec<(f64, usize)> = cfg.c_grid.iter().flat_map(|&c| (0..cfg.trials).map(move |t| (c, t))).collect();
    let lambdas = jobs
        .par_iter()
        .map(|&(theta, t)| {
            let m = sample_deformed_wigner(cfg.n, &[theta], &dist, trial_seed(cfg.master_seed, t, theta))?;
            let mut opts = EigenOptions::new(1);
            opts.which = Which::LargestAlgebraic;
            opts.tol = 1e-9;
            opts.max_iter = 2000;
            Ok(lanczos(&m, &opts)?.eigenvalues[0].value)
        })
        .collect::<Result<Vec<f64>, CliError>>()?;
    let points = cfg
        .c_grid
        .iter()
        .enumerate()
        .map(|(i, &theta)| {
            let ls = lambdas[i * cfg.trials..(i + 1) * cfg.trials].to_vec();
            let mut sorted = ls.clone();
            BbpPoint { theta, median: median(&mut sorted), lambdas: ls, prediction: bbp_prediction(theta) }
        })
        .collect();
    Ok(BbpReport { n: cfg.n, points })
}
