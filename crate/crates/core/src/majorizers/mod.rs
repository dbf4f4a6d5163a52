//! Vector majorizers: domination, the quantile-based standard majorizer and
//! heavy-vertex detection. The finite net lives in [`net`].

mod net;

pub use net::{build_net, classify, MajorizerNet, NetParams, NET_C1, NET_CONSTANT};

use crate::error::{invalid, Result};
use crate::sampler::BoundedDistribution;

/// Non-increasing non-negative vector; coordinates past `levels` are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Majorizer {
    levels: Vec<f64>,
}

impl Majorizer {
    pub fn new(mut levels: Vec<f64>) -> Result<Self> {
        if levels.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(invalid("majorizer levels must be finite and non-negative"));
        }
        if levels.windows(2).any(|w| w[0] < w[1]) {
            return Err(invalid("majorizer levels must be non-increasing"));
        }
        while levels.last() == Some(&0.0) {
            levels.pop();
        }
        Ok(Majorizer { levels })
    }

    /// Nonzero prefix.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Coordinate `i` (0-based).
    pub fn get(&self, i: usize) -> f64 {
        self.levels.get(i).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> usize {
        self.levels.len()
    }

    pub fn norm1(&self) -> f64 {
        self.levels.iter().sum()
    }

    pub fn to_csv(&self) -> String {
        self.levels.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(",")
    }
}

/// `x*`: absolute values in non-increasing order.
pub fn rearranged(x: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = x.iter().map(|a| a.abs()).collect();
    v.sort_unstable_by(|a, b| b.total_cmp(a));
    v
}

/// `y >= x*` coordinate-wise.
pub fn dominates(y: &Majorizer, x: &[f64]) -> bool {
    rearranged(x).iter().enumerate().all(|(i, &v)| v <= y.get(i))
}

/// A row is heavy when its squared entries are not majorized by `y`.
pub fn is_heavy(row_sq: &[f64], y: &Majorizer) -> bool {
    !dominates(y, row_sq)
}

// Index comparisons against products like `tau * kappa` tolerate rounding in
// the last bit so that e.g. `1.2 * 10` counts 12 indices.
const INDEX_SLACK: f64 = 1e-9;

/// `Y(psi, h, kappa, tau)` with `psi = xi^2`: `h` for `i <= tau kappa`, the
/// quantile of order `(kappa - i)/kappa + tau` up to `(1 + tau) kappa`, then 0.
pub fn standard_majorizer(dist: &BoundedDistribution, h: f64, kappa: f64, tau: f64) -> Result<Majorizer> {
    if !(h >= 1.0) {
        return Err(invalid(format!("standard majorizer needs h >= 1, got {h}")));
    }
    if !(kappa >= 2.0) || !kappa.is_finite() {
        return Err(invalid(format!("standard majorizer needs kappa >= 2, got {kappa}")));
    }
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(invalid(format!("standard majorizer needs tau in (0, 1], got {tau}")));
    }
    if dist.bound_sq() > h * (1.0 + 1e-12) {
        return Err(invalid(format!("xi^2 is bounded by {} > h = {h}", dist.bound_sq())));
    }
    let top = (tau * kappa + INDEX_SLACK).floor() as usize;
    let end = ((1.0 + tau) * kappa + INDEX_SLACK).floor() as usize;
    let mut levels = vec![h; top];
    for i in top + 1..=end {
        let a = (kappa - i as f64) / kappa + tau;
        levels.push(dist.sq_quantile(a).min(h));
    }
    Majorizer::new(levels)
}

/// `[kappa - h, kappa + (1 + floor(tau kappa)) h]`, the bracket every
/// standard majorizer's norm falls in.
pub fn standard_norm_bracket(h: f64, kappa: f64, tau: f64) -> (f64, f64) {
    let top = (tau * kappa + INDEX_SLACK).floor();
    (kappa - h, kappa + (1.0 + top) * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{make_distribution, AtomKind, DistKind};

    fn maj(v: &[f64]) -> Majorizer {
        Majorizer::new(v.to_vec()).unwrap()
    }

    #[test]
    fn domination_examples() {
        assert!(dominates(&maj(&[1.0, 1.0, 0.0]), &[-0.8, 0.9, 0.0]));
        assert!(!dominates(&maj(&[1.0, 0.5, 0.0]), &[0.6, 0.6, 0.0]));
        let x = [0.3, -0.7, 0.1];
        assert!(dominates(&maj(&rearranged(&x)), &x));
        assert!(Majorizer::new(vec![0.5, 1.0]).is_err());
        assert!(Majorizer::new(vec![1.0, -0.1]).is_err());
    }

    #[test]
    fn constant_psi_standard_majorizer() {
        for kind in [AtomKind::ConstantOne, AtomKind::Rademacher] {
            let d = make_distribution(DistKind::Atom(kind), 1.0).unwrap();
            let y = standard_majorizer(&d, 2.0, 10.0, 0.2).unwrap();
            let mut expect = vec![2.0, 2.0];
            expect.extend([1.0; 10]);
            assert_eq!(y.levels(), &expect[..]);
            assert_eq!(y.norm1(), 14.0);
            let (lo, hi) = standard_norm_bracket(2.0, 10.0, 0.2);
            assert_eq!((lo, hi), (8.0, 16.0));
        }
    }

    #[test]
    fn heavy_rows() {
        let d = make_distribution(DistKind::Atom(AtomKind::ConstantOne), 1.0).unwrap();
        let y = standard_majorizer(&d, 2.0, 10.0, 0.2).unwrap();
        assert!(!is_heavy(&[0.0; 20], &y));
        assert!(is_heavy(&[2.0, 2.0, 2.0], &y));
        assert!(!is_heavy(y.levels(), &y));
        assert!(is_heavy(&[1.0; 13], &y));
    }

    #[test]
    fn uniform_bracket() {
        let d = make_distribution(DistKind::Atom(AtomKind::UniformSymmetric), 3.0).unwrap();
        for &(kappa, tau) in &[(2.0, 1.0), (10.0, 0.2), (37.5, 0.1), (200.0, 0.05)] {
            let y = standard_majorizer(&d, 3.0, kappa, tau).unwrap();
            let (lo, hi) = standard_norm_bracket(3.0, kappa, tau);
            assert!(y.norm1() >= lo && y.norm1() <= hi, "kappa={kappa} tau={tau} norm={}", y.norm1());
        }
        assert!(standard_majorizer(&d, 3.0, 1.5, 0.5).is_err());
        assert!(standard_majorizer(&d, 2.0, 10.0, 0.5).is_err());
    }
}
