//! Statistical checks on the samplers and the probabilistic majorizer
//! lemmas. Every seed is fixed, so each outcome is deterministic.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use outlierlab::majorizers::{dominates, is_heavy, standard_majorizer};
use outlierlab::sampler::{
    couple_centered, make_distribution, sample_erdos_renyi, sample_sparse_wigner, AtomKind, BoundedDistribution,
    DiagMode, DistKind, SeedSpec, SparseSymMatrix,
};
use outlierlab::spectral::{extreme_eigenvalues, predict_max_degree, seginer_ratio};

fn natural(kind: AtomKind) -> BoundedDistribution {
    let k = DistKind::Atom(kind);
    make_distribution(k, k.natural_bound_sq()).unwrap()
}

/// Two-sample Kolmogorov-Smirnov statistic.
fn ks(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

/// Rejection threshold at level 0.001.
fn ks_critical(n: usize, m: usize) -> f64 {
    1.95 * ((n + m) as f64 / (n * m) as f64).sqrt()
}

fn upper_values(m: &SparseSymMatrix) -> impl Iterator<Item = f64> + '_ {
    m.upper_entries().map(|(_, _, v)| v)
}

#[test]
fn nnz_matches_binomial_mean() {
    let (n, p, trials) = (400, 0.03, 200);
    let dist = natural(AtomKind::Rademacher);
    for mode in [DiagMode::Zero, DiagMode::Iid] {
        let slots = (n * (n - 1) / 2 + if mode == DiagMode::Iid { n } else { 0 }) as f64;
        let counts: Vec<f64> = (0..trials)
            .map(|t| upper_values(&sample_sparse_wigner(n, p, &dist, mode, SeedSpec::new(5, t)).unwrap()).count() as f64)
            .collect();
        let mean = counts.iter().sum::<f64>() / trials as f64;
        let sd = (slots * p * (1.0 - p) / trials as f64).sqrt();
        assert!((mean - slots * p).abs() <= 4.0 * sd, "{mode:?}: mean {mean} vs {} +- {}", slots * p, 4.0 * sd);
    }
}

#[test]
fn coupled_w_has_the_sparse_wigner_law() {
    let (n, p, eps, trials) = (300, 0.02, 0.25, 150);
    let dist = natural(AtomKind::UniformSymmetric);
    let (mut vals_w, mut vals_ref, mut nnz_w, mut nnz_ref) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for t in 0..trials {
        let (w, _, _) = couple_centered(n, p, eps, &dist, SeedSpec::new(7, t)).unwrap();
        let r = sample_sparse_wigner(n, p, &dist, DiagMode::Zero, SeedSpec::new(8, t)).unwrap();
        nnz_w.push(upper_values(&w).count() as f64);
        nnz_ref.push(upper_values(&r).count() as f64);
        vals_w.extend(upper_values(&w));
        vals_ref.extend(upper_values(&r));
    }
    let (a, b) = (vals_w.len(), vals_ref.len());
    let d_vals = ks(vals_w, vals_ref);
    assert!(d_vals <= ks_critical(a, b), "entry values: D = {d_vals}");
    let d_nnz = ks(nnz_w, nnz_ref);
    assert!(d_nnz <= ks_critical(trials as usize, trials as usize), "nnz counts: D = {d_nnz}");
}

#[test]
fn coupled_w_prime_respects_its_bound() {
    let dist = natural(AtomKind::ConstantOne);
    let (_, wp, atom) = couple_centered(200, 0.05, 0.5, &dist, SeedSpec::new(9, 0)).unwrap();
    assert!(upper_values(&wp).all(|v| v * v <= atom.bound_sq * (1.0 + 1e-12)));
    let vals: Vec<f64> = upper_values(&wp).collect();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let var = vals.iter().map(|v| v * v).sum::<f64>() / vals.len() as f64;
    // Centered, unit variance on the support of b'.
    assert!(mean.abs() < 0.1 && (var - 1.0).abs() < 0.1, "mean {mean}, second moment {var}");
}

/// Fraction of padded rows `X~*` dominated by `Y(xi^2, h, kappa, tau)`.
fn prob_heavy_rate(dist: &BoundedDistribution, kappa: f64, tau: f64, trials: usize, seed: u64) -> f64 {
    let h = dist.bound_sq().max(1.0);
    let y = standard_majorizer(dist, h, kappa, tau).unwrap();
    let n = 20 * kappa as usize;
    let pad = (tau * kappa / 2.0).floor() as usize;
    // The support size of X is binomial; its values are i.i.d. xi^2.
    let support = Binomial::new((n - pad) as u64, kappa / (n - 1) as f64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hits = (0..trials)
        .filter(|_| {
            let m = support.sample(&mut rng) as usize;
            let mut x = vec![h; pad];
            x.extend((0..m).map(|_| dist.sample(&mut rng).powi(2)));
            dominates(&y, &x)
        })
        .count();
    hits as f64 / trials as f64
}

#[test]
fn padded_rows_are_dominated_with_high_probability() {
    for kind in [AtomKind::Rademacher, AtomKind::UniformSymmetric] {
        let dist = natural(kind);
        let small = prob_heavy_rate(&dist, 200.0, 0.1, 2_000, 11);
        println!("{kind:?}: kappa=200 tau=0.1 domination rate {small:.3} (diagnostic)");
        for kappa in [2_000.0, 5_000.0] {
            let rate = prob_heavy_rate(&dist, kappa, 0.1, 10_000, 12);
            println!("{kind:?}: kappa={kappa} tau=0.1 domination rate {rate:.4}");
            assert!(rate >= 0.95, "{kind:?} kappa={kappa}: {rate}");
        }
    }
}

#[test]
fn heavy_neighbors_stay_below_d_to_eight_ninths() {
    let n = 10_000;
    let lll = (n as f64).ln().ln().ln();
    for kind in [AtomKind::Rademacher, AtomKind::UniformSymmetric] {
        let dist = natural(kind);
        let h = dist.bound_sq().max(1.0);
        for d in [50.0f64, 100.0] {
            let tau = (1.0 / (h * lll) - 1.0 / d).min(1.0);
            let y = standard_majorizer(&dist, h, d, tau).unwrap();
            let bound = d.powf(8.0 / 9.0);
            let trials = 10;
            let good = (0..trials)
                .filter(|&t| {
                    let m = sample_sparse_wigner(n, d / n as f64, &dist, DiagMode::Zero, SeedSpec::new(13, t)).unwrap();
                    let heavy: Vec<bool> =
                        (0..n).map(|i| is_heavy(&m.row(i).1.iter().map(|v| v * v).collect::<Vec<_>>(), &y)).collect();
                    let worst = (0..n).map(|i| m.row(i).0.iter().filter(|&&j| heavy[j]).count()).max().unwrap();
                    worst as f64 <= bound
                })
                .count();
            assert!(good * 100 >= 95 * trials as usize, "{kind:?} d={d} tau={tau}: {good}/{trials}");
        }
    }
}

#[test]
fn max_degree_prediction_within_twelve_percent() {
    let (n, np, graphs) = (100_000, 20.0, 50);
    let p = np / n as f64;
    let total: usize = (0..graphs)
        .map(|t| {
            let g = sample_erdos_renyi(n, p, SeedSpec::new(17, t)).unwrap();
            (0..n).map(|i| g.degree(i)).max().unwrap()
        })
        .sum();
    let mean = total as f64 / graphs as f64;
    let pred = predict_max_degree(n, p).unwrap();
    assert!((mean - pred).abs() <= 0.12 * pred, "mean max degree {mean} vs predicted {pred}");
}

#[test]
fn star_has_symmetric_extreme_pair() {
    let t = (1..10).map(|j| (0, j, 1.0));
    let star = SparseSymMatrix::from_upper_triplets(10, DiagMode::Zero, t).unwrap();
    let spec = extreme_eigenvalues(&star, 2, 1e-12, 500).unwrap();
    assert!((spec.abs_kth(1) - 3.0).abs() < 1e-9 && (spec.abs_kth(2) - 3.0).abs() < 1e-9);
}

#[test]
fn dense_sign_matrix_seginer_ratio() {
    let dist = natural(AtomKind::Rademacher);
    let m = sample_sparse_wigner(200, 1.0, &dist, DiagMode::Zero, SeedSpec::new(19, 0)).unwrap();
    let r = seginer_ratio(&m, 1e-10).unwrap();
    assert!((1.3..=2.1).contains(&r), "ratio {r}");
}
