use std::fmt::Write as _;

use rayon::prelude::*;

use outlierlab::lowerbound::{lower_bound_certificate, Certificate, CertificateParams};
use outlierlab::sampler::sample_erdos_renyi;
use outlierlab::spectral::extreme_eigenvalues;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::sweep::{density, EIGEN_MAX_ITER};
use crate::trial_seed;

/// Slack on the interlacing inequality, covering the solver residual.
pub const INTERLACING_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct LowerboundTrial {
    pub c: f64,
    pub trial: usize,
    pub lambda_abs_k: f64,
    /// `Err` holds the reason no certificate exists.
    pub certificate: Result<Certificate, String>,
}

impl LowerboundTrial {
    /// `None` when no certificate was produced.
    pub fn interlaces(&self) -> Option<bool> {
        self.certificate.as_ref().ok().map(|c| c.interlaces(self.lambda_abs_k, INTERLACING_TOL))
    }
}

#[derive(Debug, Clone)]
pub struct LowerboundReport {
    pub trials: Vec<LowerboundTrial>,
}

impl LowerboundReport {
    pub fn violations(&self) -> usize {
        self.trials.iter().filter(|t| t.interlaces() == Some(false)).count()
    }

    pub fn certified(&self) -> usize {
        self.trials.iter().filter(|t| t.interlaces().is_some()).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("#schema=1 experiment=lowerbound_demo\nc,trial,root,depth,row_norm_sq,d_tilde,rayleigh,lambda_k,ok\n");
        for t in &self.trials {
            match &t.certificate {
                Ok(cert) => {
                    for line in cert.to_csv(t.lambda_abs_k, INTERLACING_TOL).lines().skip(1) {
                        let _ = writeln!(out, "{},{},{line}", t.c, t.trial);
                    }
                }
                Err(why) => {
                    let _ = writeln!(out, "# c={} trial={}: {why}", t.c, t.trial);
                }
            }
        }
        out
    }
}

/// Certificates on Erdos-Renyi adjacency matrices compared with `|lambda_(|k|)|`.
pub fn run_lowerbound_demo(cfg: &ExperimentConfig) -> Result<LowerboundReport, CliError> {
    cfg.validate()?;
    let jobs: Vec<(f64, usize)> = cfg.c_grid.iter().flat_map(|&c| (0..cfg.trials).map(move |t| (c, t))).collect();
    let mut trials = jobs
        .par_iter()
        .map(|&(c, trial)| {
            let p = density(cfg.n, c);
            let np = cfg.n as f64 * p;
            let m = sample_erdos_renyi(cfg.n, p, trial_seed(cfg.master_seed, trial, c))?;
            let lambda_abs_k = extreme_eigenvalues(&m, cfg.k, 1e-10, EIGEN_MAX_ITER)?.abs_kth(cfg.k);
            let certificate =
                lower_bound_certificate(&m, &CertificateParams::for_density(np, cfg.k)).map_err(|e| e.to_string());
            Ok(LowerboundTrial { c, trial, lambda_abs_k, certificate })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    trials.sort_by(|a, b| a.c.total_cmp(&b.c).then(a.trial.cmp(&b.trial)));
    Ok(LowerboundReport { trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Experiment;

    #[test]
    fn small_demo_interlaces() {
        let mut cfg = ExperimentConfig::defaults(Experiment::LowerboundDemo);
        cfg.n = 1000;
        cfg.trials = 2;
        let rep = run_lowerbound_demo(&cfg).unwrap();
        assert_eq!(rep.trials.len(), 6);
        assert_eq!(rep.violations(), 0);
        assert!(rep.certified() > 0);
        assert!(rep.to_csv().lines().count() > 2);
    }
}
