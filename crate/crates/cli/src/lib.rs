//! Experiment orchestration for the `outlierlab` binary: sweeps, phase and
//! sandwich checks, exact cancellation, the deformed-Wigner demo,
//! lower-bound certificates, the verification gate and SVG plots.

pub mod bbp;
pub mod config;
pub mod error;
pub mod lbdemo;
pub mod phase;
pub mod plot;
pub mod precancel;
pub mod seginer;
pub mod sweep;
pub mod verify;

pub use config::{Experiment, ExperimentConfig};
pub use error::CliError;

pub(crate) fn median(xs: &mut [f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}

/// Seed of trial `trial` at grid value `x`, independent of grid order.
pub(crate) fn trial_seed(master: u64, trial: usize, x: f64) -> outlierlab::sampler::SeedSpec {
    outlierlab::sampler::SeedSpec::new(master, trial as u64).derive(x.to_bits())
}
