//! Thick-restart Lanczos with full reorthogonalization.
//!
//! Invariant between restarts: `A V = V T + beta * pending * e_last^T`, where
//! `T` is the projected matrix assembled from computed inner products. After a
//! restart `T` is diagonal on the kept Ritz vectors and the coupling to
//! `pending` is recovered by the next column's inner products.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::sampler::{DenseSym, SparseSymMatrix};

/// A symmetric linear operator.
pub trait SymOperator: Sync {
    fn dim(&self) -> usize;
    /// `y = A x`; must be deterministic for fixed input.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl SymOperator for SparseSymMatrix {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y)
    }
}

impl SymOperator for DenseSym {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y)
    }
}

/// Which end of the spectrum to extract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    /// Largest `|lambda|`; both ends merged by absolute value.
    LargestMagnitude,
    LargestAlgebraic,
    SmallestAlgebraic,
}

#[derive(Debug, Clone)]
pub struct EigenOptions {
    pub k: usize,
    /// Residual tolerance relative to the largest Ritz value in magnitude.
    pub tol: f64,
    /// Maximum number of restarts.
    pub max_iter: usize,
    pub which: Which,
    /// Basis size; `None` picks a default from `k`.
    pub basis_size: Option<usize>,
    /// Seed of the random start vector.
    pub seed: u64,
    pub want_vectors: bool,
}

impl EigenOptions {
    pub fn new(k: usize) -> Self {
        EigenOptions {
            k,
            tol: 1e-8,
            max_iter: 500,
            which: Which::LargestMagnitude,
            basis_size: None,
            seed: 0x5eed_1a2c,
            want_vectors: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RitzPair {
    pub value: f64,
    /// Explicit `||A v - value v||_2` for unit `v`.
    pub residual: f64,
}

/// Converged Ritz pairs in the requested order.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<RitzPair>,
    pub k: usize,
    pub matvec_count: usize,
    /// Unit eigenvectors aligned with `eigenvalues`; empty unless requested.
    pub vectors: Vec<Vec<f64>>,
}

impl SpectrumResult {
    pub fn values(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|p| p.value).collect()
    }

    /// `|lambda_(|j|)|` for 1-based `j`.
    pub fn abs_kth(&self, j: usize) -> f64 {
        self.eigenvalues[j - 1].value.abs()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Orthogonalizes `w` against `basis` twice (classical Gram-Schmidt with
/// one reorthogonalization pass); returns the accumulated coefficients.
fn orthogonalize(basis: &[Vec<f64>], w: &mut [f64]) -> Vec<f64> {
    let mut coef = vec![0.0; basis.len()];
    for _ in 0..2 {
        let h: Vec<f64> = basis.iter().map(|v| dot(v, w)).collect();
        for (v, &hi) in basis.iter().zip(&h) {
            axpy(-hi, v, w);
        }
        for (c, hi) in coef.iter_mut().zip(h) {
            *c += hi;
        }
    }
    coef
}

/// Orders candidate Ritz values so the most wanted come first.
fn wanted_order(theta: &[f64], which: Which) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..theta.len()).collect();
    match which {
        Which::LargestMagnitude => idx.sort_by(|&a, &b| {
            theta[b]
                .abs()
                .total_cmp(&theta[a].abs())
                .then(theta[b].total_cmp(&theta[a]))
        }),
        Which::LargestAlgebraic => idx.sort_by(|&a, &b| theta[b].total_cmp(&theta[a])),
        Which::SmallestAlgebraic => idx.sort_by(|&a, &b| theta[a].total_cmp(&theta[b])),
    }
    idx
}

/// Orders by `|value|` descending with magnitudes equal to 1e-9 of `scale`
/// treated as tied, ties broken by signed value descending.
fn sort_magnitude_ties(pairs: &mut Vec<RitzPair>, vectors: &mut Vec<Vec<f64>>, scale: f64) {
    let key = |v: f64| ((v.abs() / scale) * 1e9).round() as i64;
    let mut idx: Vec<usize> = (0..pairs.len()).collect();
    idx.sort_by(|&a, &b| {
        let (x, y) = (pairs[a].value, pairs[b].value);
        key(y).cmp(&key(x)).then(y.total_cmp(&x))
    });
    *pairs = idx.iter().map(|&i| pairs[i]).collect();
    if !vectors.is_empty() {
        let mut old = std::mem::take(vectors);
        *vectors = idx.iter().map(|&i| std::mem::take(&mut old[i])).collect();
    }
}

struct Rng64(ChaCha8Rng);

impl Rng64 {
    fn unit_vector(&mut self, basis: &[Vec<f64>], n: usize) -> Option<Vec<f64>> {
        for _ in 0..8 {
            let mut v: Vec<f64> = (0..n).map(|_| self.0.gen::<f64>() - 0.5).collect();
            orthogonalize(basis, &mut v);
            let nv = norm(&v);
            if nv > 1e-8 {
                v.iter_mut().for_each(|x| *x /= nv);
                return Some(v);
            }
        }
        None
    }
}

/// Computes `opts.k` extreme eigenpairs of `op`.
pub fn lanczos<A: SymOperator + ?Sized>(op: &A, opts: &EigenOptions) -> Result<SpectrumResult> {
    let n = op.dim();
    let k = opts.k;
    if k == 0 || k > n {
        return Err(invalid(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    if !(opts.tol > 0.0) {
        return Err(invalid("tol must be positive"));
    }
    let m = opts
        .basis_size
        .unwrap_or_else(|| (3 * k + 40).max(60))
        .max(k + 2)
        .min(n);
    let mut rng = Rng64(ChaCha8Rng::seed_from_u64(opts.seed));
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    basis.push(rng.unit_vector(&[], n).expect("nonzero random vector"));
    // Rows/cols of the projected matrix, grown to m x m.
    let mut t = DMatrix::<f64>::zeros(m, m);
    let mut filled = 0usize;
    let mut matvecs = 0usize;
    let mut w = vec![0.0; n];
    let mut best_residual = f64::INFINITY;

    for restart in 0..=opts.max_iter {
        let mut beta = 0.0;
        let mut pending: Option<Vec<f64>> = None;
        // Expand the basis to m vectors.
        while filled < basis.len() {
            let j = filled;
            op.apply(&basis[j], &mut w);
            matvecs += 1;
            let coef = orthogonalize(&basis, &mut w);
            for (i, &c) in coef.iter().enumerate() {
                t[(i, j)] = c;
                t[(j, i)] = c;
            }
            filled += 1;
            beta = norm(&w);
            let scale = t.view((0, 0), (filled, filled)).amax().max(f64::MIN_POSITIVE);
            if filled == n {
                beta = 0.0;
                break;
            }
            let next = if beta > 1e-12 * scale {
                let mut v = w.clone();
                v.iter_mut().for_each(|x| *x /= beta);
                Some(v)
            } else {
                // Invariant subspace: continue with a fresh direction, zero coupling.
                beta = 0.0;
                rng.unit_vector(&basis, n)
            };
            match next {
                Some(v) if basis.len() < m => basis.push(v),
                Some(v) => {
                    pending = Some(v);
                    break;
                }
                None => break,
            }
        }

        let dimk = filled;
        let proj = t.view((0, 0), (dimk, dimk)).into_owned();
        let eig = SymmetricEigen::new(proj);
        let theta: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let s = eig.eigenvectors;
        let order = wanted_order(&theta, opts.which);
        let scale = theta.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
        let kk = k.min(dimk);
        let est: Vec<f64> = order[..kk].iter().map(|&i| (beta * s[(dimk - 1, i)]).abs()).collect();
        let worst = est.iter().fold(0.0f64, |a, &x| a.max(x));
        best_residual = best_residual.min(worst / scale);
        let converged = kk == k && worst <= opts.tol * scale;
        if converged || pending.is_none() && kk == k && beta == 0.0 {
            let mut pairs = Vec::with_capacity(k);
            let mut vectors = Vec::with_capacity(k);
            let mut av = vec![0.0; n];
            for &i in &order[..k] {
                let mut x = vec![0.0; n];
                for (j, v) in basis[..dimk].iter().enumerate() {
                    axpy(s[(j, i)], v, &mut x);
                }
                let nx = norm(&x);
                x.iter_mut().for_each(|xi| *xi /= nx);
                op.apply(&x, &mut av);
                matvecs += 1;
                let value = theta[i];
                let r: f64 = av.iter().zip(&x).map(|(a, b)| (a - value * b).powi(2)).sum::<f64>().sqrt();
                pairs.push(RitzPair { value, residual: r });
                if opts.want_vectors {
                    vectors.push(x);
                }
            }
            if opts.which == Which::LargestMagnitude {
                sort_magnitude_ties(&mut pairs, &mut vectors, scale);
            }
            return Ok(SpectrumResult { eigenvalues: pairs, k, matvec_count: matvecs, vectors });
        }
        if restart == opts.max_iter {
            break;
        }
        let Some(pending) = pending else {
            // The basis spans an invariant subspace of dimension < k.
            return Err(Error::NotConverged { iterations: restart, best_residual });
        };

        let keep = (k + (m - k) / 2).min(dimk - 1).max(k);
        let kept: Vec<usize> = order[..keep].to_vec();
        let mut new_basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        for &i in &kept {
            let mut x = vec![0.0; n];
            for (j, v) in basis[..dimk].iter().enumerate() {
                axpy(s[(j, i)], v, &mut x);
            }
            new_basis.push(x);
        }
        t.fill(0.0);
        for (a, &i) in kept.iter().enumerate() {
            t[(a, a)] = theta[i];
        }
        new_basis.push(pending);
        basis = new_basis;
        filled = keep;
    }
    Err(Error::NotConverged { iterations: opts.max_iter, best_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::DiagMode;

    #[test]
    fn two_by_two() {
        let m = SparseSymMatrix::from_dense(2, DiagMode::Zero, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let r = lanczos(&m, &EigenOptions::new(1)).unwrap();
        assert!((r.abs_kth(1) - 1.0).abs() < 1e-12);
        assert_eq!(r.eigenvalues.len(), 1);
    }

    #[test]
    fn star_pair_ordered_by_sign() {
        let trip = (1..10).map(|j| (0, j, 1.0));
        let m = SparseSymMatrix::from_upper_triplets(10, DiagMode::Zero, trip).unwrap();
        let r = lanczos(&m, &EigenOptions::new(2)).unwrap();
        assert!((r.eigenvalues[0].value - 3.0).abs() < 1e-10);
        assert!((r.eigenvalues[1].value + 3.0).abs() < 1e-10);
    }

    #[test]
    fn restarts_on_path_graph() {
        // Path graph eigenvalues 2cos(pi j/(n+1)).
        let n = 400;
        let m = SparseSymMatrix::from_upper_triplets(n, DiagMode::Zero, (0..n - 1).map(|i| (i, i + 1, 1.0))).unwrap();
        let mut o = EigenOptions::new(3);
        o.which = Which::LargestAlgebraic;
        o.basis_size = Some(20);
        o.max_iter = 5000;
        let r = lanczos(&m, &o).unwrap();
        for (j, p) in r.eigenvalues.iter().enumerate() {
            let exact = 2.0 * (std::f64::consts::PI * (j + 1) as f64 / (n + 1) as f64).cos();
            assert!((p.value - exact).abs() < 1e-9, "{} vs {exact}", p.value);
            assert!(p.residual < 1e-7);
        }
    }

    #[test]
    fn reports_non_convergence() {
        let n = 400;
        let m = SparseSymMatrix::from_upper_triplets(n, DiagMode::Zero, (0..n - 1).map(|i| (i, i + 1, 1.0))).unwrap();
        let mut o = EigenOptions::new(3);
        o.basis_size = Some(8);
        o.max_iter = 2;
        assert!(matches!(lanczos(&m, &o), Err(Error::NotConverged { .. })));
    }
}
