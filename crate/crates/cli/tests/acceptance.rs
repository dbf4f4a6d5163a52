//! Acceptance criteria at their stated sizes and tolerances. Each test prints
//! one `criterion N: PASS|FAIL` line with the measured values.

use std::io::Write;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use outlierlab::lowerbound::{
    lemma_target, lower_bound_certificate, sample_lumped_rayleigh, CertificateParams, SyntheticTree,
    TwoPointMagnitude,
};
use outlierlab::sampler::{sample_erdos_renyi, DiagMode, SeedSpec, SparseSymMatrix};
use outlierlab::spectral::{extreme_eigenvalues, lambert_w0, predict_max_degree, rho, rho_g_predictor};
use outlierlab_cli::bbp::run_bbp;
use outlierlab_cli::config::{Experiment, ExperimentConfig};
use outlierlab_cli::phase::{phase_from_rows, phase_threshold, predictor_ratio};
use outlierlab_cli::seginer::run_seginer;
use outlierlab_cli::sweep::{run_sweep, sandwich_violations, sweep_csv};
use outlierlab_cli::verify::{
    dyck_suite, majorizer_suite, pathenc_suite, precancel_suite, reference_dyck_formula, verify_all, SuiteResult,
    VerifyOptions,
};

const SEED: u64 = 1;

/// Written to the raw stderr handle, which the test harness does not capture,
/// so the line shows up for passing criteria too.
fn report(n: u32, ok: bool, detail: &str) {
    let line = format!("criterion {n}: {} - {detail}\n", if ok { "PASS" } else { "FAIL" });
    std::io::stderr().write_all(line.as_bytes()).unwrap();
    assert!(ok, "criterion {n} failed: {detail}");
}

fn suite_line(r: &SuiteResult, elapsed: Duration) -> String {
    format!("{} checks, {} failures {:?}, {:.1} s", r.checks, r.failure_count, r.failures, elapsed.as_secs_f64())
}

fn seed(tag: u64) -> SeedSpec {
    SeedSpec::new(SEED, 0).derive(tag)
}

#[test]
fn criterion_01_exact_combinatorics() {
    let t = Instant::now();
    let r = dyck_suite(reference_dyck_formula);
    let el = t.elapsed();
    report(1, r.ok() && el < Duration::from_secs(30), &suite_line(&r, el));
}

#[test]
fn criterion_02_injectivity() {
    let t = Instant::now();
    let r = pathenc_suite(seed(2)).unwrap();
    let el = t.elapsed();
    report(2, r.ok() && el < Duration::from_secs(300), &suite_line(&r, el));
}

#[test]
fn criterion_03_majorizer_coverage() {
    let t = Instant::now();
    let r = majorizer_suite(seed(3)).unwrap();
    let el = t.elapsed();
    // 3 sets of 1000 adversarial vectors, plus the bracket grid.
    report(3, r.ok() && r.checks >= 3000, &suite_line(&r, el));
}

#[test]
fn criterion_04_exact_cancellation() {
    let t = Instant::now();
    let r = precancel_suite(seed(4));
    let el = t.elapsed();
    report(4, r.ok() && r.checks >= 20, &suite_line(&r, el));
}

#[test]
fn criterion_05_lambert_and_predictor_identities() {
    let lo = -1.0 / std::f64::consts::E;
    let mut worst_w = 0.0f64;
    for i in 0..10_000 {
        let z = lo + (1000.0 - lo) * i as f64 / 9_999.0;
        let w = lambert_w0(z).unwrap();
        worst_w = worst_w.max((w * w.exp() - z).abs());
    }
    let mut worst_rho = 0.0f64;
    for n in [1_000usize, 20_000, 100_000, 1_000_000] {
        for c in [0.3, 0.5, 1.0, 2.0, 2.5, 3.0, 5.0, 10.0] {
            let p = c * (n as f64).ln() / n as f64;
            let direct = rho(predict_max_degree(n, p).unwrap(), n as f64 * p).rho;
            worst_rho = worst_rho.max((rho_g_predictor(n, p).unwrap() - direct).abs() / direct);
        }
    }
    let at_threshold = (predictor_ratio(20_000, phase_threshold()).unwrap() - 1.0).abs();
    let n = 20_000;
    let p = (n as f64).ln() / n as f64;
    let at_one = rho_g_predictor(n, p).unwrap() / (n as f64 * p).sqrt();
    let e1 = (std::f64::consts::E - 1.0).sqrt();
    let at_one_err = (at_one - (e1 + 1.0 / e1)).abs();
    let ok = worst_w <= 1e-12 && worst_rho <= 1e-10 && at_threshold <= 1e-10 && (at_one - 2.07371).abs() <= 1e-4;
    report(
        5,
        ok && at_one_err <= 1e-12,
        &format!(
            "W0 round trip {worst_w:.2e}, rho_G vs rho(gamma) {worst_rho:.2e}, threshold {at_threshold:.2e}, c=1 value {at_one:.6}"
        ),
    );
}

fn random_symmetric(n: usize, density: f64, rng: &mut ChaCha8Rng) -> SparseSymMatrix {
    let mut t = Vec::new();
    for i in 0..n {
        for j in i..n {
            if rng.gen::<f64>() < density {
                t.push((i, j, rng.gen_range(-1.0..1.0)));
            }
        }
    }
    SparseSymMatrix::from_upper_triplets(n, DiagMode::Iid, t).unwrap()
}

#[test]
fn criterion_06_eigensolver_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    let mut errors = Vec::new();
    for trial in 0..100 {
        let n = rng.gen_range(10..=300);
        let k = rng.gen_range(1..=5);
        let density = [0.02, 0.1, 0.5, 1.0][trial % 4];
        let m = random_symmetric(n, density, &mut rng);
        let dense = DMatrix::from_row_slice(n, n, &m.to_dense());
        let mut oracle: Vec<f64> = SymmetricEigen::new(dense).eigenvalues.iter().copied().collect();
        oracle.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
        match extreme_eigenvalues(&m, k, 1e-12, 3000) {
            Ok(spec) => {
                let scale = oracle[0].abs();
                for j in 1..=k {
                    worst = worst.max((spec.abs_kth(j) - oracle[j - 1].abs()).abs() / scale);
                }
            }
            Err(e) => errors.push(format!("trial {trial} (n={n}, k={k}): {e}")),
        }
    }
    report(6, worst <= 1e-8 && errors.is_empty(), &format!("worst relative error {worst:.2e}, solver errors {errors:?}"));
}

#[test]
fn criterion_07_phase_transition() {
    let t = Instant::now();
    let cfg = ExperimentConfig::defaults(Experiment::PhaseCheck);
    assert_eq!((cfg.n, cfg.trials), (20_000, 20));
    let rows = run_sweep(&cfg).unwrap();
    let phase = phase_from_rows(&rows, cfg.eps).unwrap();
    let el = t.elapsed();
    let med = |c: f64| phase.point(c).unwrap().median_ratio;
    let super_ok = med(6.0) <= 1.15 && med(10.0) <= 1.15;
    let sub_ok = med(0.5) >= 1.2 && med(1.0) >= 1.2;
    let cross_ok = phase.crossing.is_some_and(|c| (1.5..=4.0).contains(&c));
    let converged = rows.iter().filter(|r| r.converged).count();
    let curve: Vec<String> = phase.points.iter().map(|p| format!("{}:{:.4}/{:.2}", p.c, p.median_ratio, p.outlier_fraction)).collect();
    report(
        7,
        super_ok && sub_ok && cross_ok && el < Duration::from_secs(1800),
        &format!(
            "supercritical medians <= 1.15: {super_ok}; subcritical medians >= 1.2: {sub_ok} (c=0.5: {:.4}, c=1: {:.4}); crossing {:?} in [1.5, 4]: {cross_ok}; \
             eps {}; converged {converged}/{}; c:median/fraction [{}]; {:.0} s",
            med(0.5),
            med(1.0),
            phase.crossing,
            cfg.eps,
            rows.len(),
            curve.join(" "),
            el.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_08_seginer_sandwich() {
    let cfg = ExperimentConfig::defaults(Experiment::Seginer);
    let rep = run_seginer(&cfg).unwrap();
    let medians = rep.medians();
    let first = medians.first().unwrap().1;
    let last = medians.last().unwrap().1;
    let monotone = medians.windows(2).all(|w| w[0].1 <= w[1].1);
    // Nearer 1 than 2 at the sparse end, nearer 2 than 1 at the dense end.
    let trend = monotone && first < 1.5 && last > 1.5;
    let frac = rep.in_band_fraction();
    let m: Vec<String> = medians.iter().map(|(c, v)| format!("{c}:{v:.3}")).collect();
    report(
        8,
        frac >= 0.95 && rep.floor_violations() == 0 && trend,
        &format!("in-band fraction {frac:.3}, floor violations {}, medians [{}]", rep.floor_violations(), m.join(" ")),
    );
}

#[test]
fn criterion_09_lower_bound_certificates() {
    let n = 10_000;
    let mut trials = 0;
    let mut violations = Vec::new();
    let mut missing = 0;
    for (r, np) in [1.0, 2.0, 4.0, 6.0].into_iter().enumerate() {
        for k in 1..=2 {
            for rep in 0..25u64 {
                trials += 1;
                let m = sample_erdos_renyi(n, np / n as f64, SeedSpec::new(SEED, rep).derive((r * 2 + k) as u64)).unwrap();
                let Ok(cert) = lower_bound_certificate(&m, &CertificateParams::for_density(np, k)) else {
                    missing += 1;
                    continue;
                };
                let lam = extreme_eigenvalues(&m, k, 1e-10, 3000).unwrap().abs_kth(k);
                if !cert.interlaces(lam, 1e-8) {
                    violations.push(format!("np={np} k={k} rep={rep}: {} > {lam}", cert.bound()));
                }
            }
        }
    }
    let t = SyntheticTree {
        root_degree: 440,
        root_weight_sq: 1.0,
        q: 5,
        degrees: (190..=200).collect(),
        xi: TwoPointMagnitude { a_sq: 0.5, b_sq: 1.5, p_a: 0.5 },
        d_tilde: 200.0,
    };
    let target = lemma_target(t.row_norm_sq(), t.d_tilde, 0.1);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let hits = (0..1000).filter(|_| sample_lumped_rayleigh(&t, &mut rng).unwrap() >= target).count();
    report(
        9,
        trials == 200 && missing == 0 && violations.is_empty() && hits >= 900,
        &format!(
            "interlacing: {} of {trials} trials certified, violations {violations:?}; synthetic (d~=200, q=5): {hits}/1000 above {target:.3}",
            trials - missing
        ),
    );
}

#[test]
fn criterion_10_bbp_demo() {
    let mut cfg = ExperimentConfig::defaults(Experiment::Bbp);
    cfg.c_grid = vec![0.5, 2.0, 3.0];
    let rep = run_bbp(&cfg).unwrap();
    let checks = [(0.5, 2.0, 0.15), (2.0, 2.5, 0.12), (3.0, 10.0 / 3.0, 0.12)];
    let mut ok = true;
    let mut detail = Vec::new();
    for (theta, want, slack) in checks {
        let med = rep.point(theta).unwrap().median;
        ok &= (med - want).abs() <= slack;
        detail.push(format!("theta={theta}: median {med:.4} vs {want:.4} +- {slack}"));
    }
    report(10, ok && cfg.n == 2000 && cfg.trials == 10, &detail.join("; "));
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn criterion_11_determinism() {
    let verify = |threads| in_pool(threads, || verify_all(&VerifyOptions::new(SEED)).unwrap().render());
    let mut cfg = ExperimentConfig::defaults(Experiment::Sweep);
    cfg.n = 2000;
    cfg.trials = 3;
    cfg.c_grid = vec![0.5, 2.5, 6.0];
    let sweep = |threads| in_pool(threads, || sweep_csv(&run_sweep(&cfg).unwrap()));
    let (v1, v2, v1b) = (verify(1), verify(2), verify(1));
    let (s1, s2, s1b) = (sweep(1), sweep(2), sweep(1));

    let bin = env!("CARGO_BIN_EXE_outlierlab");
    let cli = |args: &[&str]| std::process::Command::new(bin).args(args).output().unwrap().stdout;
    let sweep_args = ["sweep", "--n", "1500", "--trials", "2", "--c", "1,4"];
    let c1 = cli(&[&sweep_args[..], &["--threads", "1"]].concat());
    let c2 = cli(&[&sweep_args[..], &["--threads", "2"]].concat());
    let cv1 = cli(&["verify", "--threads", "1"]);
    let cv2 = cli(&["verify", "--threads", "2"]);
    let sandwich = sandwich_violations(&outlierlab_cli::sweep::parse_sweep_csv(&s1).unwrap());

    let ok = v1 == v2 && v1 == v1b && s1 == s2 && s1 == s1b && c1 == c2 && cv1 == cv2 && !c1.is_empty() && sandwich.is_empty();
    report(
        11,
        ok,
        &format!(
            "verify 1/2/1 threads identical: {}; sweep 1/2/1 identical: {}; binary sweep and verify across --threads identical: {}",
            v1 == v2 && v1 == v1b,
            s1 == s2 && s1 == s1b,
            c1 == c2 && cv1 == cv2
        ),
    );
}
