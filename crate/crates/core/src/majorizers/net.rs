use std::fmt::Write as _;

use super::{rearranged, Majorizer};
use crate::error::{invalid, Error, Result};

/// Block growth constant `c1` in `p_i = floor(2^{c1 e^2 i} c1 e^2 gamma / h)`.
pub const NET_C1: f64 = 1.0 / 64.0;

/// Constant `C` used both in the hypothesis `eps gamma / h >= C` and in the
/// cardinality formula. The lemma only asserts that some such constant exists.
pub const NET_CONSTANT: f64 = 4.0;

const EPS_FLOOR: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetParams {
    pub h: f64,
    pub gamma: f64,
    pub s: usize,
    pub eps: f64,
}

/// The net of block-constant, ladder-valued majorizers.
///
/// Members are never materialized in bulk: a member is `y~ (+) y-bar` where
/// `y~` is non-increasing, constant on every block, takes values in the
/// ladder `h 2^{-m e'/4} >= e' gamma / s` (or 0), vanishes on blocks starting
/// at or after position `s`, and `y-bar` is `s` copies of `e' gamma / s`.
/// The construction runs at `e' = eps / 2` so that the final norm is at most
/// `(1 + eps) gamma` instead of `(1 + 2 eps) gamma`.
#[derive(Debug, Clone)]
pub struct MajorizerNet {
    params: NetParams,
    eps_inner: f64,
    ladder: Vec<f64>,
    /// Block boundaries `0 = b_0 <= b_1 < b_2 < ...`; block `j` covers
    /// positions `b_j..b_{j+1}` (0-based). The first block may be empty.
    bounds: Vec<usize>,
    tail_value: f64,
    norm_certificate: f64,
}

impl MajorizerNet {
    pub fn params(&self) -> NetParams {
        self.params
    }

    pub fn c1(&self) -> f64 {
        NET_C1
    }

    pub fn ladder(&self) -> &[f64] {
        &self.ladder
    }

    pub fn block_bounds(&self) -> &[usize] {
        &self.bounds
    }

    /// Upper bound on `||y||_1` for every classified input, established at
    /// build time; always at most `(1 + eps) gamma`.
    pub fn norm_certificate(&self) -> f64 {
        self.norm_certificate
    }

    pub fn norm_limit(&self) -> f64 {
        (1.0 + self.params.eps) * self.params.gamma
    }

    fn blocks(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bounds.windows(2).map(|w| (w[0], w[1])).filter(|(a, b)| a < b)
    }

    /// Smallest ladder value `>= v`, or 0 for `v = 0`.
    fn round_up(&self, v: f64) -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        // Ladder is decreasing; take the last entry still >= v.
        let k = self.ladder.partition_point(|&l| l >= v);
        debug_assert!(k > 0, "value above h");
        self.ladder[k - 1]
    }

    /// `log2` of the number of members: non-increasing sequences over the
    /// nonempty blocks with values in the ladder or 0.
    pub fn log2_cardinality(&self) -> f64 {
        let t = self.blocks().count() as f64;
        let l = self.ladder.len();
        (1..=l).map(|i| ((t + i as f64) / i as f64).log2()).sum()
    }

    /// `log2` of `(C log2(hs/(eps gamma)) / eps)^(C eps^-2 log2(h/eps))`.
    pub fn log2_lemma_bound(&self) -> f64 {
        let NetParams { h, gamma, s, eps } = self.params;
        let base = NET_CONSTANT * (h * s as f64 / (eps * gamma)).log2() / eps;
        NET_CONSTANT * (h / eps).log2() / (eps * eps) * base.log2()
    }

    fn assemble(&self, tilde: &[f64]) -> Majorizer {
        let mut levels = tilde.to_vec();
        while levels.last() == Some(&0.0) {
            levels.pop();
        }
        levels.extend(std::iter::repeat(self.tail_value).take(self.params.s));
        Majorizer::new(levels).expect("ladder values dominate the tail value")
    }

    /// Members in lexicographic block order, stopping after `limit`. The flag
    /// reports whether the enumeration was cut short.
    pub fn members(&self, limit: usize) -> (Vec<Majorizer>, bool) {
        let blocks: Vec<(usize, usize)> = self.blocks().collect();
        let mut values = self.ladder.clone();
        values.push(0.0);
        let budget = self.norm_limit() - self.tail_value * self.params.s as f64;
        let mut out = Vec::new();
        let mut choice = Vec::with_capacity(blocks.len());
        let complete = self.enumerate(&blocks, &values, 0, 0, budget, &mut choice, &mut out, limit);
        (out, !complete)
    }

    #[allow(clippy::too_many_arguments)]
    fn enumerate(
        &self,
        blocks: &[(usize, usize)],
        values: &[f64],
        j: usize,
        min_idx: usize,
        budget: f64,
        choice: &mut Vec<usize>,
        out: &mut Vec<Majorizer>,
        limit: usize,
    ) -> bool {
        if j == blocks.len() {
            if out.len() >= limit {
                return false;
            }
            let mut tilde = Vec::new();
            for (&(a, b), &c) in blocks.iter().zip(choice.iter()) {
                tilde.extend(std::iter::repeat(values[c]).take(b - a));
            }
            out.push(self.assemble(&tilde));
            return true;
        }
        let (a, b) = blocks[j];
        for c in min_idx..values.len() {
            let cost = values[c] * (b - a) as f64;
            if cost > budget * (1.0 + 1e-12) {
                continue;
            }
            choice.push(c);
            let done = self.enumerate(blocks, values, j + 1, c, budget - cost, choice, out, limit);
            choice.pop();
            if !done {
                return false;
            }
        }
        true
    }

    /// Params header followed by one member per line as CSV, at most `limit`
    /// members.
    pub fn dump(&self, limit: usize) -> String {
        let NetParams { h, gamma, s, eps } = self.params;
        let (members, truncated) = self.members(limit);
        let mut out = format!(
            "# h={h} gamma={gamma} s={s} eps={eps} c1={NET_C1} listed={} truncated={truncated}\n",
            members.len()
        );
        for m in &members {
            writeln!(out, "{}", m.to_csv()).unwrap();
        }
        out
    }
}

/// Builds the net for `R(h, gamma, s)`: vectors bounded by `h`, with norm at
/// most `gamma` and at most `s` nonzero coordinates.
pub fn build_net(h: f64, gamma: f64, s: usize, eps: f64) -> Result<MajorizerNet> {
    if !(h >= 2.0) || !h.is_finite() {
        return Err(invalid(format!("net needs h >= 2, got {h}")));
    }
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(invalid(format!("net needs eps in (0, 1/2], got {eps}")));
    }
    if eps < EPS_FLOOR {
        return Err(invalid(format!("eps = {eps} below the supported floor {EPS_FLOOR}")));
    }
    if !(gamma > 0.0) || !gamma.is_finite() || s == 0 {
        return Err(invalid("net needs gamma > 0 and s >= 1"));
    }
    if eps * gamma / h < NET_CONSTANT {
        return Err(invalid(format!("eps gamma / h = {} < C = {NET_CONSTANT}", eps * gamma / h)));
    }
    if h * s as f64 / (eps * gamma) < 2.0 {
        return Err(invalid(format!("h s / (eps gamma) = {} < 2", h * s as f64 / (eps * gamma))));
    }
    let e = eps / 2.0;
    let tail_value = e * gamma / s as f64;
    let ratio = 2f64.powf(-e / 4.0);
    let mut ladder = vec![h];
    loop {
        let next = ladder[ladder.len() - 1] * ratio;
        if next < tail_value {
            break;
        }
        ladder.push(next);
    }

    let r0 = (e * gamma / (4.0 * h)).floor() as usize;
    let rate = NET_C1 * e * e;
    let a = rate * gamma / h;
    let p = |i: u64| (2f64.powf(rate * i as f64) * a).floor() as usize;
    // Blocks with p_i = 0 are empty; start at the first i with p_i >= 1.
    let mut i = if a >= 1.0 { 1 } else { ((1.0 / a).log2() / rate).floor().max(1.0) as u64 };
    while i > 1 && p(i - 1) >= 1 {
        i -= 1;
    }
    while p(i) == 0 {
        i += 1;
    }
    let mut bounds = vec![0, r0];
    let mut sigma = 1.0f64;
    while *bounds.last().unwrap() < s {
        let prev = *bounds.last().unwrap();
        let next = prev + p(i);
        sigma = sigma.max(next as f64 / (1.0 + prev as f64));
        bounds.push(next);
        i += 1;
    }

    // y~ is h on the first block; on later blocks it is at most 2^{e/4}
    // times the stretched vector x_{ceil(j/sigma)}, whose norm is at most
    // sigma ||x||_1. The tail adds e gamma.
    let certificate = h * r0 as f64 + 2f64.powf(e / 4.0) * sigma * gamma + e * gamma;
    let net = MajorizerNet {
        params: NetParams { h, gamma, s, eps },
        eps_inner: e,
        ladder,
        bounds,
        tail_value,
        norm_certificate: certificate,
    };
    if certificate > net.norm_limit() {
        return Err(invalid(format!(
            "block growth sigma = {sigma} too fast: norm certificate {certificate} exceeds (1 + eps) gamma = {}",
            net.norm_limit()
        )));
    }
    Ok(net)
}

/// Deterministic member dominating `x`.
pub fn classify(x: &[f64], net: &MajorizerNet) -> Result<Majorizer> {
    let NetParams { h, gamma, s, .. } = net.params;
    let xs = rearranged(x);
    let nnz = xs.iter().take_while(|&&v| v > 0.0).count();
    let norm: f64 = xs.iter().sum();
    if xs.first().copied().unwrap_or(0.0) > h || nnz > s || norm > gamma * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "vector outside R(h={h}, gamma={gamma}, s={s}): max {}, nnz {nnz}, norm {norm}",
            xs.first().copied().unwrap_or(0.0)
        )));
    }
    // Split point: entries >= e' gamma / s form x~, the rest is covered by
    // the flat tail.
    let big = xs.iter().take_while(|&&v| v >= net.tail_value).count();
    let tilde_x = &xs[..big];
    let mut tilde = Vec::new();
    for (a, b) in net.blocks() {
        let start = tilde_x.get(a).copied().unwrap_or(0.0);
        if start == 0.0 {
            break;
        }
        let v = if a == 0 && b == net.bounds[1] { h } else { net.round_up(start) };
        tilde.extend(std::iter::repeat(v).take(b - a));
    }
    let y = net.assemble(&tilde);
    debug_assert!(y.norm1() <= net.norm_certificate * (1.0 + 1e-9));
    Ok(y)
}

impl MajorizerNet {
    /// Inner construction parameter `eps / 2`.
    pub fn eps_inner(&self) -> f64 {
        self.eps_inner
    }
}

#[cfg(test)]
mod tests {
    use super::super::dominates;
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hypotheses_rejected() {
        assert!(build_net(1.5, 100.0, 50, 0.5).is_err());
        assert!(build_net(4.0, 100.0, 50, 0.6).is_err());
        assert!(build_net(4.0, 20.0, 50, 0.5).is_err());
        assert!(build_net(4.0, 100.0, 10, 0.5).is_err());
        assert!(build_net(4.0, 100.0, 50, 0.005).is_err());
    }

    #[test]
    fn reference_net() {
        let net = build_net(4.0, 100.0, 50, 0.5).unwrap();
        assert!(net.norm_certificate() <= 150.0);
        assert!(net.log2_cardinality() <= net.log2_lemma_bound());
        assert_eq!(net.ladder()[0], 4.0);
        assert!(*net.ladder().last().unwrap() >= 0.5);
    }

    #[test]
    fn spike_and_zero() {
        let net = build_net(4.0, 100.0, 50, 0.5).unwrap();
        let y = classify(&[0.0; 5], &net).unwrap();
        assert_eq!(y.levels(), &[0.5; 50][..]);
        let y = classify(&[4.0], &net).unwrap();
        assert_eq!(y.get(0), 4.0);
        assert!(dominates(&y, &[4.0]));
        assert!(classify(&[4.5], &net).is_err());
        assert!(classify(&[1.0; 51], &net).is_err());
        assert!(classify(&[3.0; 40], &net).is_err());
    }

    #[test]
    fn random_inputs_are_covered() {
        let net = build_net(4.0, 100.0, 50, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let k = rng.gen_range(0..=50);
            let mut x: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..4.0)).collect();
            let norm: f64 = x.iter().sum();
            if norm > 100.0 {
                x.iter_mut().for_each(|v| *v *= 100.0 / norm);
            }
            let y = classify(&x, &net).unwrap();
            assert!(dominates(&y, &x));
            assert!(y.norm1() <= 150.0);
            assert_eq!(classify(&x, &net).unwrap(), y);
        }
    }

    #[test]
    fn small_net_members() {
        let net = build_net(2.0, 16.0, 8, 0.5).unwrap();
        // 33 ladder values plus zero over 8 unit blocks, norm never binding.
        assert_eq!(net.ladder().len(), 33);
        assert_eq!(net.block_bounds(), &[0, 0, 1, 2, 3, 4, 5, 6, 7, 8]);
        let expect = (1..=33).map(|i| ((8.0 + i as f64) / i as f64).log2()).sum::<f64>();
        assert!((net.log2_cardinality() - expect).abs() < 1e-9);
        let (members, truncated) = net.members(500);
        assert!(truncated);
        assert_eq!(members.len(), 500);
        let mut first = vec![2.0; 8];
        first.extend([0.5; 8]);
        assert_eq!(members[0].levels(), &first[..]);
        for m in &members {
            assert!(m.norm1() <= net.norm_limit() * (1.0 + 1e-12));
        }
        let y = classify(&[2.0; 8], &net).unwrap();
        assert_eq!(y, members[0].clone());
        let dump = net.dump(3);
        assert!(dump.starts_with("# h=2 gamma=16 s=8 eps=0.5 c1=0.015625 listed=3 truncated=true\n"));
        assert_eq!(dump.lines().count(), 4);
    }
}
