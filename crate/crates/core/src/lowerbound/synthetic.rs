//! Synthetic tree instances for the test-vector bound, sampled either
//! explicitly or in lumped form for trees far too large to materialize.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use super::test_vector_deltas;
use crate::dyck::binomial;
use crate::error::{invalid, Result};
use crate::sampler::{DiagMode, SparseSymMatrix};
use num_traits::ToPrimitive;

/// `|xi|^2` takes `a_sq` with probability `p_a`, else `b_sq`; signs are
/// irrelevant to every quantity computed here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPointMagnitude {
    pub a_sq: f64,
    pub b_sq: f64,
    pub p_a: f64,
}

impl TwoPointMagnitude {
    pub fn unit() -> Self {
        TwoPointMagnitude { a_sq: 1.0, b_sq: 1.0, p_a: 1.0 }
    }

    pub fn bound_sq(&self) -> f64 {
        self.a_sq.max(self.b_sq)
    }

    pub fn second_moment(&self) -> f64 {
        self.p_a * self.a_sq + (1.0 - self.p_a) * self.b_sq
    }
}

/// Rooted tree with every leaf at depth `q`, `root_degree` root edges of
/// fixed squared weight `root_weight_sq`, and interior degrees drawn
/// uniformly from `degrees` (parent edge included).
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticTree {
    pub root_degree: usize,
    pub root_weight_sq: f64,
    pub q: usize,
    pub degrees: Vec<usize>,
    pub xi: TwoPointMagnitude,
    pub d_tilde: f64,
}

impl SyntheticTree {
    pub fn row_norm_sq(&self) -> f64 {
        self.root_degree as f64 * self.root_weight_sq
    }

    fn validate(&self) -> Result<()> {
        if self.q == 0 || self.q % 2 == 0 {
            return Err(invalid(format!("q must be odd, got {}", self.q)));
        }
        if self.root_degree == 0 || self.degrees.is_empty() || self.degrees.iter().any(|&d| d < 2) {
            return Err(invalid("root degree >= 1 and interior degrees >= 2 required"));
        }
        let x = self.xi;
        if !(x.a_sq > 0.0 && x.b_sq > 0.0 && (0.0..=1.0).contains(&x.p_a)) {
            return Err(invalid("two-point magnitude law needs positive values and p in [0,1]"));
        }
        if (x.second_moment() - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("E xi^2 must be 1, got {}", x.second_moment())));
        }
        if !(self.root_weight_sq > 0.0 && self.root_weight_sq <= x.bound_sq()) {
            return Err(invalid("root weights must satisfy 0 < mu^2 <= h"));
        }
        Ok(())
    }
}

/// `(1 - eps) R / sqrt(R - d_tilde)`.
pub fn lemma_target(row_norm_sq: f64, d_tilde: f64, eps: f64) -> f64 {
    (1.0 - eps) * row_norm_sq / (row_norm_sq - d_tilde).sqrt()
}

/// One outcome of an interior vertex: its degree and how many of its child
/// edges carry `a_sq`.
struct Outcome {
    deg: usize,
    k_a: usize,
    prob: f64,
}

fn outcomes(t: &SyntheticTree) -> Vec<Outcome> {
    let w = 1.0 / t.degrees.len() as f64;
    let p = t.xi.p_a;
    let mut out = Vec::new();
    for &deg in &t.degrees {
        let c = deg - 1;
        for k in 0..=c {
            let coef = binomial(c as u64, k as u64).to_f64().unwrap_or(f64::INFINITY);
            let prob = w * coef * p.powi(k as i32) * (1.0 - p).powi((c - k) as i32);
            if prob > 0.0 {
                out.push(Outcome { deg, k_a: k, prob });
            }
        }
    }
    out
}

/// Multinomial counts of `n` independent draws from `probs`.
fn multinomial<R: Rng + ?Sized>(n: u64, probs: &[f64], rng: &mut R) -> Vec<u64> {
    let mut left = n;
    let mut mass: f64 = probs.iter().sum();
    let mut counts = Vec::with_capacity(probs.len());
    for (i, &p) in probs.iter().enumerate() {
        if left == 0 || i + 1 == probs.len() {
            counts.push(left);
            left = 0;
            continue;
        }
        let share = (p / mass).clamp(0.0, 1.0);
        let c = Binomial::new(left, share).expect("valid binomial").sample(rng);
        counts.push(c);
        left -= c;
        mass -= p;
    }
    counts
}

/// Exact sample of `||M Y|| / ||Y||` for the layered test vector on a random
/// instance of `t`.
///
/// Vertices at depth `r >= 1` with the same number `i` of `a_sq` edges below
/// the root edge are exchangeable and carry the same squared path weight
/// `root_weight_sq * a_sq^i * b_sq^(r-1-i)`. Only the histogram of their
/// (degree, child split) outcomes enters either norm, so each class draws
/// one multinomial instead of visiting its vertices.
pub fn sample_lumped_rayleigh<R: Rng + ?Sized>(t: &SyntheticTree, rng: &mut R) -> Result<f64> {
    t.validate()?;
    let r_sq = t.row_norm_sq();
    let deltas = test_vector_deltas(r_sq, t.d_tilde, t.q)?;
    let outs = outcomes(t);
    let probs: Vec<f64> = outs.iter().map(|o| o.prob).collect();
    let (a, b) = (t.xi.a_sq, t.xi.b_sq);
    let pi_sq = |r: usize, i: usize| t.root_weight_sq * a.powi(i as i32) * b.powi((r - 1 - i) as i32);

    let mut my_sq = deltas[0] * deltas[0] * r_sq * r_sq;
    let mut y_sq = deltas[0] * deltas[0] * r_sq;
    let mut classes: BTreeMap<usize, u64> = BTreeMap::from([(0, t.root_degree as u64)]);
    for r in 1..t.q {
        let mut next: BTreeMap<usize, u64> = BTreeMap::new();
        for (&i, &n) in &classes {
            let counts = multinomial(n, &probs, rng);
            let w = pi_sq(r, i);
            for (o, &c) in outs.iter().zip(&counts) {
                if c == 0 {
                    continue;
                }
                let k_b = o.deg - 1 - o.k_a;
                *next.entry(i + 1).or_insert(0) += c * o.k_a as u64;
                *next.entry(i).or_insert(0) += c * k_b as u64;
                if r % 2 == 0 {
                    let s = o.k_a as f64 * a + k_b as f64 * b;
                    let v = deltas[r / 2 - 1] + deltas[r / 2] * s;
                    my_sq += c as f64 * w * v * v;
                }
            }
        }
        next.retain(|_, c| *c > 0);
        if (r + 1) % 2 == 1 {
            let d = deltas[r / 2];
            y_sq += next.iter().map(|(&i, &c)| d * d * c as f64 * pi_sq(r + 1, i)).sum::<f64>();
        }
        classes = next;
    }
    Ok((my_sq / y_sq).sqrt())
}

/// Explicit random instance: vertex 0 is the root, vertices numbered in BFS
/// order, signs uniform.
pub fn materialize_synthetic<R: Rng + ?Sized>(t: &SyntheticTree, rng: &mut R) -> Result<SparseSymMatrix> {
    t.validate()?;
    let mut triplets = Vec::new();
    let mut frontier: Vec<usize> = Vec::new();
    let mut next_id = 1usize;
    let sign = |rng: &mut R| if rng.gen::<bool>() { 1.0 } else { -1.0 };
    for _ in 0..t.root_degree {
        triplets.push((0, next_id, sign(rng) * t.root_weight_sq.sqrt()));
        frontier.push(next_id);
        next_id += 1;
    }
    for _ in 1..t.q {
        let mut layer = Vec::new();
        for &u in &frontier {
            let deg = t.degrees[rng.gen_range(0..t.degrees.len())];
            for _ in 0..deg - 1 {
                let mag = if rng.gen::<f64>() < t.xi.p_a { t.xi.a_sq } else { t.xi.b_sq };
                triplets.push((u, next_id, sign(rng) * mag.sqrt()));
                layer.push(next_id);
                next_id += 1;
            }
        }
        frontier = layer;
    }
    SparseSymMatrix::from_upper_triplets(next_id, DiagMode::Zero, triplets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcomb::graph_from_matrix;
    use crate::lowerbound::{build_test_vector, q_neighborhood, rayleigh, NbhdOptions};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn materialized_rayleigh(t: &SyntheticTree, seed: u64) -> f64 {
        let m = materialize_synthetic(t, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let g = graph_from_matrix(&m);
        let nb = q_neighborhood(&g, 0, t.q, NbhdOptions { require_full_depth: true, degree_range: None }).unwrap();
        rayleigh(&m, &build_test_vector(&m, &nb, t.d_tilde).unwrap()).unwrap()
    }

    /// Unit weights, root degree `D`, inner degree `d`: by layers,
    /// `||Y||^2 = D (1 + d2^2 s^2)`, `||MY||^2 = D^2 + D s (1 + d2 s)^2`
    /// with `s = d - 1`, `d2 = dt/((dt-1)(D-dt))`.
    #[test]
    fn unit_tree_closed_form() {
        let (dd, d, dt) = (40.0f64, 10.0f64, 10.0f64);
        let t = SyntheticTree {
            root_degree: 40,
            root_weight_sq: 1.0,
            q: 3,
            degrees: vec![10],
            xi: TwoPointMagnitude::unit(),
            d_tilde: dt,
        };
        let s = d - 1.0;
        let d2 = dt / ((dt - 1.0) * (dd - dt));
        let y = dd * (1.0 + d2 * d2 * s * s);
        let my = dd * dd + dd * s * (1.0 + d2 * s).powi(2);
        let expect = (my / y).sqrt();
        assert!((materialized_rayleigh(&t, 1) - expect).abs() < 1e-10);
        let lumped = sample_lumped_rayleigh(&t, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert!((lumped - expect).abs() < 1e-10);
    }

    #[test]
    fn lumped_matches_materialized_when_deterministic() {
        let t = SyntheticTree {
            root_degree: 12,
            root_weight_sq: 1.0,
            q: 5,
            degrees: vec![4],
            xi: TwoPointMagnitude::unit(),
            d_tilde: 4.0,
        };
        let a = materialized_rayleigh(&t, 3);
        let b = sample_lumped_rayleigh(&t, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert!((a - b).abs() < 1e-10 * a);
    }

    /// Two independent samplers of the same law: their means over many
    /// trials agree within a few standard errors.
    #[test]
    fn lumped_and_materialized_agree_in_law() {
        let t = SyntheticTree {
            root_degree: 10,
            root_weight_sq: 1.5,
            q: 3,
            degrees: vec![3, 5],
            xi: TwoPointMagnitude { a_sq: 0.5, b_sq: 1.5, p_a: 0.5 },
            d_tilde: 5.0,
        };
        let trials = 400;
        let stats = |xs: &[f64]| {
            let m = xs.iter().sum::<f64>() / xs.len() as f64;
            let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
            (m, v / xs.len() as f64)
        };
        let full: Vec<f64> = (0..trials).map(|s| materialized_rayleigh(&t, 1000 + s)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let lumped: Vec<f64> = (0..trials).map(|_| sample_lumped_rayleigh(&t, &mut rng).unwrap()).collect();
        let (m1, v1) = stats(&full);
        let (m2, v2) = stats(&lumped);
        assert!((m1 - m2).abs() < 4.0 * (v1 + v2).sqrt(), "{m1} vs {m2}");
    }

    #[test]
    fn rejects_bad_laws() {
        let mut t = SyntheticTree {
            root_degree: 10,
            root_weight_sq: 1.0,
            q: 3,
            degrees: vec![3],
            xi: TwoPointMagnitude { a_sq: 0.5, b_sq: 1.0, p_a: 0.5 },
            d_tilde: 5.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_lumped_rayleigh(&t, &mut rng).is_err());
        t.xi = TwoPointMagnitude::unit();
        t.q = 4;
        assert!(sample_lumped_rayleigh(&t, &mut rng).is_err());
    }
}
