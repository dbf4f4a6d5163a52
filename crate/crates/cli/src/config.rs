use std::path::{Path, PathBuf};
use std::str::FromStr;

use outlierlab::sampler::{AtomKind, DistKind};

use crate::error::{read_file, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Sweep,
    PhaseCheck,
    Seginer,
    Bbp,
    Precancel,
    Verify,
    LowerboundDemo,
    Plot,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Sweep => "sweep",
            Experiment::PhaseCheck => "phase_check",
            Experiment::Seginer => "seginer",
            Experiment::Bbp => "bbp",
            Experiment::Precancel => "precancel",
            Experiment::Verify => "verify",
            Experiment::LowerboundDemo => "lowerbound_demo",
            Experiment::Plot => "plot",
        }
    }

    fn is_spectral(self) -> bool {
        matches!(
            self,
            Experiment::Sweep | Experiment::PhaseCheck | Experiment::Seginer | Experiment::Bbp | Experiment::LowerboundDemo
        )
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "sweep" => Experiment::Sweep,
            "phase" | "phase_check" => Experiment::PhaseCheck,
            "seginer" => Experiment::Seginer,
            "bbp" => Experiment::Bbp,
            "precancel" => Experiment::Precancel,
            "verify" => Experiment::Verify,
            "lowerbound" | "lowerbound_demo" => Experiment::LowerboundDemo,
            "plot" => Experiment::Plot,
            _ => return Err(CliError::Config(format!("unknown experiment `{s}`"))),
        })
    }
}

/// `np / log n` values bracketing the phase threshold.
pub const PHASE_GRID: [f64; 12] = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0, 8.0, 10.0];
pub const SEGINER_GRID: [f64; 6] = [0.3, 0.5, 1.0, 2.0, 4.0, 8.0];
pub const BBP_THETAS: [f64; 5] = [0.5, 0.9, 1.5, 2.0, 3.0];
pub const LOWERBOUND_GRID: [f64; 3] = [0.5, 1.0, 3.0];
/// Relative margin above `2 sqrt(np)` that counts as an outlier.
pub const DEFAULT_PHASE_EPS: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n: usize,
    /// `np / log n` values; deformation strengths `theta` for `bbp`.
    pub c_grid: Vec<f64>,
    pub trials: usize,
    pub k: usize,
    pub dist: DistKind,
    pub master_seed: u64,
    pub out_path: Option<PathBuf>,
    pub eps: f64,
    /// Sweep the sparse Wigner matrix built from `dist` instead of the
    /// adjacency matrix.
    pub centered: bool,
    pub suites: Option<Vec<String>>,
    pub input: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let (n, grid, trials, dist): (usize, &[f64], usize, AtomKind) = match experiment {
            Experiment::Sweep | Experiment::PhaseCheck => (20_000, &PHASE_GRID, 20, AtomKind::ConstantOne),
            Experiment::Seginer => (20_000, &SEGINER_GRID, 20, AtomKind::Rademacher),
            Experiment::Bbp => (2_000, &BBP_THETAS, 10, AtomKind::Rademacher),
            Experiment::Precancel => (5, &[1.0], 20, AtomKind::Rademacher),
            Experiment::LowerboundDemo => (20_000, &LOWERBOUND_GRID, 5, AtomKind::ConstantOne),
            Experiment::Verify | Experiment::Plot => (20_000, &PHASE_GRID, 1, AtomKind::ConstantOne),
        };
        ExperimentConfig {
            experiment,
            n,
            c_grid: grid.to_vec(),
            trials,
            k: 2,
            dist: DistKind::Atom(dist),
            master_seed: 1,
            out_path: None,
            eps: DEFAULT_PHASE_EPS,
            centered: false,
            suites: None,
            input: None,
        }
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let bad = |what: &str| CliError::Config(format!("bad value `{value}` for {what}"));
        match key {
            "experiment" => {
                let e: Experiment = value.parse()?;
                if e != self.experiment {
                    return Err(CliError::Config(format!(
                        "config is for `{}` but `{}` was requested",
                        e.name(),
                        self.experiment.name()
                    )));
                }
            }
            "n" => self.n = value.parse().map_err(|_| bad("n"))?,
            "c" | "c_grid" | "theta" => self.c_grid = parse_list(value).ok_or_else(|| bad("c"))?,
            "trials" => self.trials = value.parse().map_err(|_| bad("trials"))?,
            "k" => self.k = value.parse().map_err(|_| bad("k"))?,
            "dist" => self.dist = value.parse().map_err(|e: outlierlab::Error| CliError::Config(e.to_string()))?,
            "seed" | "master_seed" => self.master_seed = value.parse().map_err(|_| bad("seed"))?,
            "out" | "out_path" => self.out_path = Some(PathBuf::from(value)),
            "eps" => self.eps = value.parse().map_err(|_| bad("eps"))?,
            "centered" => self.centered = value.parse().map_err(|_| bad("centered"))?,
            "suite" | "suites" => self.suites = Some(value.split(',').map(|s| s.trim().to_string()).collect()),
            "input" => self.input = Some(PathBuf::from(value)),
            _ => return Err(CliError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Plain-text `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", i + 1)))?;
            self.set(k.trim(), v.trim()).map_err(|e| match e {
                CliError::Config(m) => CliError::Config(format!("line {}: {m}", i + 1)),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = read_file(path)?;
        self.apply_text(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.trials == 0 {
            return Err(CliError::Config("trials must be at least 1".into()));
        }
        if self.k == 0 {
            return Err(CliError::Config("k must be at least 1".into()));
        }
        if self.c_grid.is_empty() || self.c_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(CliError::Config("c grid must be nonempty and strictly increasing".into()));
        }
        if self.c_grid.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            return Err(CliError::Config("c grid values must be positive".into()));
        }
        if self.experiment.is_spectral() && self.n < 100 {
            return Err(CliError::Config(format!("n = {} is below 100", self.n)));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(CliError::Config("eps must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

pub fn parse_list(s: &str) -> Option<Vec<f64>> {
    s.split(',').map(|x| x.trim().parse::<f64>().ok()).collect()
}
