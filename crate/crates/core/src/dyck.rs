//! Exact Dyck-path counts and the inequalities built on them, each paired
//! with a brute-force enumeration.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{invalid, Result};

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn catalan(k: u64) -> BigUint {
    binomial(2 * k, k) / (k + 1)
}

/// Dyck paths of length `2k` with exactly `u` returns to zero (the final
/// point included): `u/(2k-u) C(2k-u, k)`.
pub fn dyck_count_returns(k: u64, u: u64) -> Result<BigUint> {
    if u == 0 || u > k {
        return Err(invalid(format!("need 1 <= u <= k, got k={k}, u={u}")));
    }
    Ok(returns_count(k, u))
}

fn returns_count(k: u64, u: u64) -> BigUint {
    binomial(2 * k - u, k) * u / (2 * k - u)
}

/// Filter for [`enumerate_dyck`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DyckConstraints {
    /// Exact number of returns to zero, counting the endpoint.
    pub returns: Option<usize>,
    /// Only the endpoint touches zero.
    pub no_interior_returns: bool,
}

pub const MAX_ENUM_K: usize = 12;

/// All Dyck paths of length `2k` as `U`/`D` strings, `U` branches first.
pub fn enumerate_dyck(k: usize, constraints: DyckConstraints) -> Result<Vec<String>> {
    if k > MAX_ENUM_K {
        return Err(invalid(format!("enumeration capped at k = {MAX_ENUM_K}, got {k}")));
    }
    let mut out = Vec::new();
    let mut buf = String::with_capacity(2 * k);
    walk(k, 0, 0, 0, constraints, &mut buf, &mut out);
    Ok(out)
}

fn walk(k: usize, ups: usize, height: usize, returns: usize, c: DyckConstraints, buf: &mut String, out: &mut Vec<String>) {
    if buf.len() == 2 * k {
        if c.returns.is_none_or(|r| r == returns) {
            out.push(buf.clone());
        }
        return;
    }
    if ups < k {
        buf.push('U');
        walk(k, ups + 1, height + 1, returns, c, buf, out);
        buf.pop();
    }
    if height > 0 {
        let at_zero = height == 1;
        let last = buf.len() + 1 == 2 * k;
        if !(at_zero && c.no_interior_returns && !last) {
            buf.push('D');
            walk(k, ups, height - 1, returns + usize::from(at_zero), c, buf, out);
            buf.pop();
        }
    }
}

/// Number of returns to zero of a `U`/`D` path.
pub fn count_returns(path: &str) -> usize {
    let mut h = 0i64;
    let mut r = 0;
    for ch in path.chars() {
        h += if ch == 'U' { 1 } else { -1 };
        if h == 0 {
            r += 1;
        }
    }
    r
}

/// Sequences of `s` nonempty Dyck paths, each touching zero only at its
/// right end, of total length `2p`, counted by enumeration and compared with
/// `s/(2p-s) C(2p-s, p)`.
pub fn dyck_sequence_bound_check(s: usize, p: usize) -> Result<(BigUint, BigUint, bool)> {
    if s == 0 || s > p || p > 10 {
        return Err(invalid(format!("need 1 <= s <= p <= 10, got s={s}, p={p}")));
    }
    let primitive: Vec<Vec<String>> = (0..=p)
        .map(|len| {
            if len == 0 {
                Vec::new()
            } else {
                enumerate_dyck(len, DyckConstraints { returns: None, no_interior_returns: true }).unwrap()
            }
        })
        .collect();
    let mut count = 0u64;
    let mut seq: Vec<&str> = Vec::with_capacity(s);
    sequences(&primitive, s, p, &mut seq, &mut count);
    let bound = returns_count(p as u64, s as u64);
    let count = BigUint::from(count);
    let ok = count <= bound;
    Ok((count, bound, ok))
}

fn sequences<'a>(primitive: &'a [Vec<String>], left: usize, half_len: usize, seq: &mut Vec<&'a str>, count: &mut u64) {
    if left == 0 {
        if half_len == 0 {
            *count += 1;
        }
        return;
    }
    for len in 1..=half_len.saturating_sub(left - 1) {
        for path in &primitive[len] {
            seq.push(path);
            sequences(primitive, left - 1, half_len - len, seq, count);
            seq.pop();
        }
    }
}

/// Compensated (Neumaier) summation.
fn neumaier(terms: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for t in terms {
        let s = sum + t;
        comp += if sum.abs() >= t.abs() { (sum - s) + t } else { (t - s) + sum };
        sum = s;
    }
    sum + comp
}

fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// `sum_s N_s(p) L^s` against `max(L,2)^{2p-1} / (max(L,2)-1)^{p-1}`.
pub fn binomial_sum_check(p: usize, l: f64) -> Result<(f64, f64, bool)> {
    if !(l > 1.0) || p == 0 || p > 60 {
        return Err(invalid(format!("need L > 1 and 1 <= p <= 60, got p={p}, L={l}")));
    }
    let lhs = neumaier((1..=p).map(|s| big_to_f64(&returns_count(p as u64, s as u64)) * l.powi(s as i32)));
    let lt = l.max(2.0);
    let rhs = lt.powi(2 * p as i32 - 1) / (lt - 1.0).powi(p as i32 - 1);
    Ok((lhs, rhs, lhs <= rhs))
}

/// `alpha(p) = L^{-p} sum_s N_s(p) L^s` with `L = max(l, 2)`.
pub fn binomial_alpha(p: usize, l: f64) -> f64 {
    let lt = l.max(2.0);
    neumaier((1..=p).map(|s| big_to_f64(&returns_count(p as u64, s as u64)) * lt.powi(s as i32 - p as i32)))
}

/// `alpha(p+1) <= L/(L-1) alpha(p)` for the same `L = max(l, 2)`.
pub fn binomial_alpha_recursion_holds(p: usize, l: f64) -> bool {
    let lt = l.max(2.0);
    binomial_alpha(p + 1, l) <= lt / (lt - 1.0) * binomial_alpha(p, l)
}

/// `2^m` for `u <= 1`, else `sum_{p=u-1}^{floor(m/2)} N_{u-1}(p) 2^{m-2p}`.
pub fn beta(m: usize, u: usize) -> BigUint {
    if u <= 1 {
        return BigUint::one() << m;
    }
    let mut acc = BigUint::zero();
    for p in u - 1..=m / 2 {
        acc += returns_count(p as u64, (u - 1) as u64) << (m - 2 * p);
    }
    acc
}

/// `sum_u N_u d^{k-u} dt^u` against `d^k M^{2k-1} / (M-1)^{k-1}` with
/// `M = max(dt/d, 2)`.
pub fn toy_norm_bound(d: f64, d_tilde: f64, k: usize) -> Result<(f64, f64, bool)> {
    if !(d >= 1.0 && d_tilde >= d) || k == 0 || k > 40 {
        return Err(invalid(format!("need dt >= d >= 1 and 1 <= k <= 40, got d={d}, dt={d_tilde}, k={k}")));
    }
    let sum = neumaier((1..=k).map(|u| {
        big_to_f64(&returns_count(k as u64, u as u64)) * d.powi((k - u) as i32) * d_tilde.powi(u as i32)
    }));
    let m = (d_tilde / d).max(2.0);
    let closed = d.powi(k as i32) * m.powi(2 * k as i32 - 1) / (m - 1.0).powi(k as i32 - 1);
    Ok((sum, closed, sum <= closed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn return_counts() {
        assert_eq!(dyck_count_returns(2, 1).unwrap(), big(1));
        assert_eq!(dyck_count_returns(2, 2).unwrap(), big(1));
        let k3: Vec<BigUint> = (1..=3).map(|u| dyck_count_returns(3, u).unwrap()).collect();
        assert_eq!(k3, vec![big(2), big(2), big(1)]);
        assert!(dyck_count_returns(3, 4).is_err());
        assert!(dyck_count_returns(3, 0).is_err());
    }

    #[test]
    fn enumeration_examples() {
        let all = DyckConstraints::default();
        assert_eq!(enumerate_dyck(1, all).unwrap(), vec!["UD"]);
        let one = DyckConstraints { returns: Some(1), ..all };
        assert_eq!(enumerate_dyck(3, one).unwrap(), vec!["UUUDDD", "UUDUDD"]);
        let prim = DyckConstraints { no_interior_returns: true, ..all };
        assert_eq!(enumerate_dyck(3, prim).unwrap(), vec!["UUUDDD", "UUDUDD"]);
        assert_eq!(enumerate_dyck(4, all).unwrap().len(), 14);
        assert!(enumerate_dyck(13, all).is_err());
    }

    #[test]
    fn sequence_examples() {
        assert_eq!(dyck_sequence_bound_check(1, 2).unwrap(), (big(1), big(1), true));
        assert_eq!(dyck_sequence_bound_check(2, 2).unwrap(), (big(1), big(1), true));
        assert_eq!(dyck_sequence_bound_check(2, 3).unwrap(), (big(2), big(2), true));
    }

    #[test]
    fn binomial_sum_examples() {
        let (lhs, rhs, ok) = binomial_sum_check(3, 3.0).unwrap();
        assert_eq!((lhs, rhs, ok), (51.0, 60.75, true));
        assert_eq!(binomial_sum_check(1, 2.0).unwrap(), (2.0, 2.0, true));
        assert!(binomial_sum_check(3, 1.0).is_err());
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta(5, 0), big(32));
        assert_eq!(beta(5, 1), big(32));
        assert_eq!(beta(6, 2), big(22));
        assert_eq!(beta(3, 4), big(0));
    }

    #[test]
    fn toy_examples() {
        let (s, c, ok) = toy_norm_bound(2.0, 8.0, 2).unwrap();
        assert_eq!(s, 80.0);
        assert!((c - 256.0 / 3.0).abs() < 1e-12 && ok);
        assert_eq!(toy_norm_bound(4.0, 4.0, 3).unwrap(), (320.0, 2048.0, true));
        assert_eq!(toy_norm_bound(1.0, 1.0, 1).unwrap(), (1.0, 2.0, true));
        assert!(toy_norm_bound(2.0, 1.0, 1).is_err());
    }
}
