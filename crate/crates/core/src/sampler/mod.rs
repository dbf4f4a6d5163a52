//! Seedable generation of sparse Wigner matrices, Erdős–Rényi adjacency
//! matrices, coupled centered/non-centered pairs and deformed Wigner matrices.
//!
//! Every sampler is a pure function of its parameters and a [`SeedSpec`].
//! Randomness comes from ChaCha8 with the trial index selecting the stream,
//! so trials can run in any order or in parallel.

mod dist;
mod matrix;

pub use dist::{make_distribution, AtomKind, BoundedDistribution, DistKind, DEFAULT_SMOOTHING_WIDTH};
pub use matrix::{DiagMode, SparseSymMatrix};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};

/// Identifies an independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub trial_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        SeedSpec { master_seed, trial_index }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.trial_index);
        rng
    }

    /// A seed for an auxiliary purpose within the same trial.
    pub fn derive(&self, tag: u64) -> SeedSpec {
        // splitmix64 finalizer keeps derived masters well separated.
        let mut z = self.master_seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        SeedSpec { master_seed: z ^ (z >> 31), trial_index: self.trial_index }
    }
}

/// Visits the successes of i.i.d. Bernoulli(`p`) trials over the strict upper
/// triangle of an `n x n` matrix, in row-major order, by geometric skipping.
fn for_each_upper_success<R: Rng>(n: usize, p: f64, rng: &mut R, mut f: impl FnMut(usize, usize, &mut R)) {
    if p <= 0.0 || n < 2 {
        return;
    }
    let log_q = (-p).ln_1p();
    let (mut i, mut j) = (0usize, 1usize);
    loop {
        let mut skip = if p >= 1.0 {
            0u64
        } else {
            let u: f64 = 1.0 - rng.gen::<f64>();
            let s = (u.ln() / log_q).floor();
            if s >= u64::MAX as f64 {
                return;
            }
            s as u64
        };
        while skip > 0 {
            let left = (n - j) as u64;
            if skip < left {
                j += skip as usize;
                skip = 0;
            } else {
                skip -= left;
                i += 1;
                j = i + 1;
                if j >= n {
                    return;
                }
            }
        }
        f(i, j, rng);
        j += 1;
        if j >= n {
            i += 1;
            j = i + 1;
            if j >= n {
                return;
            }
        }
    }
}

fn check_common(n: usize, p: f64) -> Result<()> {
    if n < 2 {
        return Err(invalid(format!("n={n}: need n >= 2")));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid(format!("p={p} must lie in (0, 1]")));
    }
    Ok(())
}

/// Symmetric matrix whose upper-triangle entries are i.i.d. copies of `b * xi`
/// with `b ~ Bernoulli(p)` and `xi ~ dist`.
pub fn sample_sparse_wigner(
    n: usize,
    p: f64,
    dist: &BoundedDistribution,
    diag_mode: DiagMode,
    seed: SeedSpec,
) -> Result<SparseSymMatrix> {
    check_common(n, p)?;
    let mut rng = seed.rng();
    let mut upper = Vec::with_capacity(((n as f64) * (n as f64) * p * 0.55) as usize + 16);
    for_each_upper_success(n, p, &mut rng, |i, j, rng| {
        let v = dist.sample(rng);
        if v != 0.0 {
            upper.push((i, j, v));
        }
    });
    if diag_mode == DiagMode::Iid {
        let mut diag = Vec::new();
        for i in 0..n {
            if rng.gen::<f64>() < p {
                let v = dist.sample(&mut rng);
                if v != 0.0 {
                    diag.push((i, i, v));
                }
            }
        }
        upper.extend(diag);
        upper.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    }
    Ok(SparseSymMatrix::from_sorted_upper(n, diag_mode, &upper))
}

/// Adjacency matrix of `G(n, p)`.
pub fn sample_erdos_renyi(n: usize, p: f64, seed: SeedSpec) -> Result<SparseSymMatrix> {
    let one = make_distribution(DistKind::Atom(AtomKind::ConstantOne), 1.0)?;
    sample_sparse_wigner(n, p, &one, DiagMode::Zero, seed)
}

/// Parameters of the centered atom produced by [`couple_centered`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingAtom {
    pub epsilon: f64,
    /// `sqrt(Var(xi_eps))`.
    pub beta: f64,
    /// Value taken by the centered atom when `a = 0`.
    pub off_value: f64,
    /// Uniform bound on the square of the centered atom.
    pub bound_sq: f64,
    /// Success probability of `b'`.
    pub p_prime: f64,
}

/// Entrywise coupling parameters for `(dist, epsilon, p)`.
pub fn coupling_atom(p: f64, epsilon: f64, dist: &BoundedDistribution) -> Result<CouplingAtom> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid(format!("epsilon={epsilon} must lie in (0, 1)")));
    }
    if !(p > 0.0 && p <= epsilon) {
        return Err(invalid(format!("need 0 < p <= epsilon, got p={p}, epsilon={epsilon}")));
    }
    let m = dist.mean();
    let beta = (epsilon + epsilon * epsilon * m * m / (1.0 - epsilon)).sqrt();
    let off_value = -epsilon * m / ((1.0 - epsilon) * beta);
    let bound_sq = (dist.bound_sq() / (beta * beta)).max(off_value * off_value);
    Ok(CouplingAtom { epsilon, beta, off_value, bound_sq, p_prime: p / epsilon })
}

/// Draws `(W, W')` with entries `w = a b' xi` and `w' = b' xi'_eps`, where
/// `a ~ Bern(eps)`, `b' ~ Bern(p / eps)`, and `xi'_eps` is the centered,
/// unit-variance atom `(a xi - eps (1 - a) E xi / (1 - eps)) / beta`.
///
/// `W` is distributed as a sparse Wigner matrix with density `p`; `W'` is a
/// centered sparse matrix with density `p / eps`.
pub fn couple_centered(
    n: usize,
    p: f64,
    epsilon: f64,
    dist: &BoundedDistribution,
    seed: SeedSpec,
) -> Result<(SparseSymMatrix, SparseSymMatrix, CouplingAtom)> {
    check_common(n, p)?;
    let atom = coupling_atom(p, epsilon, dist)?;
    let mut rng = seed.rng();
    let mut w = Vec::new();
    let mut w_prime = Vec::new();
    for_each_upper_success(n, atom.p_prime, &mut rng, |i, j, rng| {
        let a = rng.gen::<f64>() < epsilon;
        let xi = dist.sample(rng);
        if a {
            if xi != 0.0 {
                w.push((i, j, xi));
                w_prime.push((i, j, xi / atom.beta));
            }
        } else if atom.off_value != 0.0 {
            w_prime.push((i, j, atom.off_value));
        }
    });
    Ok((
        SparseSymMatrix::from_sorted_upper(n, DiagMode::Zero, &w),
        SparseSymMatrix::from_sorted_upper(n, DiagMode::Zero, &w_prime),
        atom,
    ))
}

/// Dense symmetric matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSym {
    n: usize,
    data: Vec<f64>,
}

impl DenseSym {
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(invalid("dense data has wrong length"));
        }
        for i in 0..n {
            for j in 0..i {
                if data[i * n + j] != data[j * n + i] {
                    return Err(invalid(format!("not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(DenseSym { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        use rayon::prelude::*;
        let n = self.n;
        y.par_iter_mut().enumerate().with_min_len(64).for_each(|(i, yi)| {
            let row = &self.data[i * n..(i + 1) * n];
            *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
        });
    }
}

/// `(1/sqrt(n)) Xi + sum_i theta_i e_i e_i^T` with `Xi` a full Wigner matrix
/// (diagonal included) drawn from `dist`.
pub fn sample_deformed_wigner(n: usize, thetas: &[f64], dist: &BoundedDistribution, seed: SeedSpec) -> Result<DenseSym> {
    if n < 2 {
        return Err(invalid(format!("n={n}: need n >= 2")));
    }
    if thetas.len() > n {
        return Err(invalid(format!("rank {} exceeds dimension {n}", thetas.len())));
    }
    if dist.mean() != 0.0 {
        return Err(invalid("deformed Wigner matrices need a centered atom"));
    }
    let mut rng = seed.rng();
    let scale = 1.0 / (n as f64).sqrt();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = dist.sample(&mut rng) * scale;
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    for (i, &t) in thetas.iter().enumerate() {
        data[i * n + i] += t;
    }
    Ok(DenseSym { n, data })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rademacher() -> BoundedDistribution {
        make_distribution(DistKind::Atom(AtomKind::Rademacher), 1.0).unwrap()
    }

    #[test]
    fn full_density_fills_everything() {
        let m = sample_sparse_wigner(4, 1.0, &rademacher(), DiagMode::Zero, SeedSpec::new(3, 0)).unwrap();
        assert_eq!(m.nnz(), 12);
        for i in 0..4 {
            assert_eq!(m.value(i, i), 0.0);
            for j in 0..4 {
                if i != j {
                    assert_eq!(m.value(i, j).abs(), 1.0);
                    assert_eq!(m.value(i, j), m.value(j, i));
                }
            }
        }
    }

    #[test]
    fn two_by_two_graph() {
        let m = sample_erdos_renyi(2, 1.0, SeedSpec::new(0, 0)).unwrap();
        assert_eq!(m.to_dense(), vec![0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(sample_sparse_wigner(1, 0.5, &rademacher(), DiagMode::Zero, SeedSpec::new(0, 0)).is_err());
        assert!(sample_sparse_wigner(5, 0.0, &rademacher(), DiagMode::Zero, SeedSpec::new(0, 0)).is_err());
        assert!(sample_sparse_wigner(5, 1.5, &rademacher(), DiagMode::Zero, SeedSpec::new(0, 0)).is_err());
        assert!(couple_centered(10, 0.6, 0.5, &rademacher(), SeedSpec::new(0, 0)).is_err());
        assert!(sample_deformed_wigner(3, &[1.0; 4], &rademacher(), SeedSpec::new(0, 0)).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let d = rademacher();
        let a = sample_sparse_wigner(300, 0.05, &d, DiagMode::Iid, SeedSpec::new(11, 4)).unwrap();
        let b = sample_sparse_wigner(300, 0.05, &d, DiagMode::Iid, SeedSpec::new(11, 4)).unwrap();
        let c = sample_sparse_wigner(300, 0.05, &d, DiagMode::Iid, SeedSpec::new(11, 5)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn coupling_atom_by_hand() {
        let one = make_distribution(DistKind::Atom(AtomKind::ConstantOne), 1.0).unwrap();
        let atom = coupling_atom(0.1, 0.5, &one).unwrap();
        // beta^2 = 0.5 + 0.25 / 0.5 = 1, and the a = 0 value is -0.5 / 0.5 = -1.
        assert!((atom.beta - 1.0).abs() < 1e-15);
        assert!((atom.off_value + 1.0).abs() < 1e-15);
        assert!((atom.p_prime - 0.2).abs() < 1e-15);
        let r = coupling_atom(0.1, 0.3, &rademacher()).unwrap();
        assert!((r.beta - 0.3f64.sqrt()).abs() < 1e-15);
        assert_eq!(r.off_value, 0.0);
    }

    #[test]
    fn coupled_w_is_subset_of_w_prime() {
        let one = make_distribution(DistKind::Atom(AtomKind::ConstantOne), 1.0).unwrap();
        let (w, wp, atom) = couple_centered(200, 0.02, 0.5, &one, SeedSpec::new(5, 0)).unwrap();
        for (i, j, v) in w.upper_entries() {
            assert_eq!(wp.value(i, j), v / atom.beta);
        }
        for (_, _, v) in wp.upper_entries() {
            assert!(v * v <= atom.bound_sq + 1e-12);
        }
    }

    #[test]
    fn identity_deformation_shifts_diagonal() {
        let d = rademacher();
        let a = sample_deformed_wigner(3, &[], &d, SeedSpec::new(9, 0)).unwrap();
        let b = sample_deformed_wigner(3, &[1.0, 1.0, 1.0], &d, SeedSpec::new(9, 0)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let shift = if i == j { 1.0 } else { 0.0 };
                assert_eq!(b.get(i, j), a.get(i, j) + shift);
            }
        }
    }
}
