use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use outlierlab_cli::bbp::run_bbp;
use outlierlab_cli::config::parse_list;
use outlierlab_cli::error::write_file;
use outlierlab_cli::lbdemo::run_lowerbound_demo;
use outlierlab_cli::phase::run_phase_check;
use outlierlab_cli::plot::emit_plot;
use outlierlab_cli::precancel::run_precancel;
use outlierlab_cli::seginer::{run_seginer, SEGINER_CEILING};
use outlierlab_cli::sweep::{run_sweep, sandwich_violations, sweep_csv};
use outlierlab_cli::verify::{verify_all, VerifyOptions};
use outlierlab_cli::{CliError, Experiment, ExperimentConfig};

/// Sparse random matrix outlier experiments.
#[derive(Debug, Parser)]
#[command(name = "outlierlab", version)]
struct Args {
    /// sweep | phase | seginer | bbp | precancel | verify | lowerbound | plot
    command: String,
    /// Plain-text `key = value` file applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated grid of np/log n (theta for bbp).
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    /// rademacher | constant_one | uniform_symmetric | smoothed:<base>[:<w>]
    #[arg(long)]
    dist: Option<String>,
    /// Output file; stdout when absent. The SVG path for `plot`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Outlier margin for `phase`.
    #[arg(long)]
    eps: Option<f64>,
    /// Comma-separated suites for `verify`.
    #[arg(long)]
    suite: Option<String>,
    /// Sweep CSV read by `plot`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Sweep the sparse Wigner matrix built from --dist instead of the adjacency matrix.
    #[arg(long)]
    centered: bool,
    /// Worker threads; all outputs are independent of this value.
    #[arg(long)]
    threads: Option<usize>,
}

fn build_config(args: &Args) -> Result<ExperimentConfig, CliError> {
    let exp: Experiment = args.command.parse()?;
    let mut cfg = ExperimentConfig::defaults(exp);
    if let Some(path) = &args.config {
        cfg.apply_file(path)?;
    }
    if let Some(v) = args.seed {
        cfg.master_seed = v;
    }
    if let Some(v) = args.n {
        cfg.n = v;
    }
    if let Some(v) = args.trials {
        cfg.trials = v;
    }
    if let Some(v) = &args.c {
        cfg.c_grid = parse_list(v).ok_or_else(|| CliError::Config(format!("bad --c list `{v}`")))?;
    }
    if let Some(v) = args.k {
        cfg.k = v;
    }
    if let Some(v) = &args.dist {
        cfg.set("dist", v)?;
    }
    if let Some(v) = &args.out {
        cfg.out_path = Some(v.clone());
    }
    if let Some(v) = args.eps {
        cfg.eps = v;
    }
    if let Some(v) = &args.suite {
        cfg.set("suite", v)?;
    }
    if let Some(v) = &args.input {
        cfg.input = Some(v.clone());
    }
    cfg.centered |= args.centered;
    Ok(cfg)
}

fn emit(cfg: &ExperimentConfig, body: &str) -> Result<(), CliError> {
    match &cfg.out_path {
        Some(p) => write_file(p, body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn run(cfg: &ExperimentConfig) -> Result<(), CliError> {
    match cfg.experiment {
        Experiment::Sweep => {
            let rows = run_sweep(cfg)?;
            emit(cfg, &sweep_csv(&rows))?;
            let bad = sandwich_violations(&rows);
            if !bad.is_empty() {
                return Err(CliError::Falsified(format!("sandwich inequality: {}", bad.join("; "))));
            }
        }
        Experiment::PhaseCheck => {
            let rep = run_phase_check(cfg)?;
            emit(cfg, &rep.to_csv())?;
            eprintln!(
                "empirical crossing {} vs threshold {:.4}",
                rep.crossing.map_or("none".to_string(), |c| format!("{c:.3}")),
                rep.threshold
            );
        }
        Experiment::Seginer => {
            let rep = run_seginer(cfg)?;
            emit(cfg, &rep.to_csv())?;
            if rep.floor_violations() > 0 || rep.in_band_fraction() < 0.95 {
                return Err(CliError::Falsified(format!(
                    "{} ratios below 1, {:.3} of ratios in [1, {SEGINER_CEILING}]",
                    rep.floor_violations(),
                    rep.in_band_fraction()
                )));
            }
        }
        Experiment::Bbp => emit(cfg, &run_bbp(cfg)?.to_csv())?,
        Experiment::Precancel => {
            let rep = run_precancel(cfg)?;
            emit(cfg, &rep.render())?;
            if rep.failures() > 0 {
                return Err(CliError::Falsified(format!("{} precancel instances differ", rep.failures())));
            }
        }
        Experiment::Verify => {
            let opts = VerifyOptions { suites: cfg.suites.clone(), ..VerifyOptions::new(cfg.master_seed) };
            let rep = verify_all(&opts)?;
            emit(cfg, &rep.render())?;
            if !rep.ok() {
                return Err(CliError::Falsified(format!("suites failed: {}", rep.failed_suites().join(", "))));
            }
        }
        Experiment::LowerboundDemo => {
            let rep = run_lowerbound_demo(cfg)?;
            emit(cfg, &rep.to_csv())?;
            if rep.violations() > 0 {
                return Err(CliError::Falsified(format!("{} certificates exceed |lambda_k|", rep.violations())));
            }
        }
        Experiment::Plot => {
            let input = cfg.input.as_ref().ok_or_else(|| CliError::Config("plot needs --input <sweep.csv>".into()))?;
            let out = cfg.out_path.as_ref().ok_or_else(|| CliError::Config("plot needs --out <file.svg>".into()))?;
            emit_plot(input, out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = build_config(&args).and_then(|cfg| {
        if let Some(t) = args.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global()
                .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
        }
        run(&cfg)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
