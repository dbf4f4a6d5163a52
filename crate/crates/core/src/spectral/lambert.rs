use std::f64::consts::E;

use crate::error::{Error, Result};

const BRANCH_POINT: f64 = -1.0 / E;
const DOMAIN_SLACK: f64 = 1e-15;

/// Principal branch of the Lambert W function: the solution `w >= -1` of
/// `w * exp(w) = z`, for `z >= -1/e`.
///
/// Halley iteration from a series guess near the branch point, `ln(1 + z)`
/// in the middle range and the two-term asymptotic guess for large `z`.
pub fn lambert_w0(z: f64) -> Result<f64> {
    if z.is_nan() || z < BRANCH_POINT - DOMAIN_SLACK {
        return Err(Error::Domain(format!("W0 undefined for z={z} < -1/e")));
    }
    if z <= BRANCH_POINT {
        return Ok(-1.0);
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let mut w = if z < -0.25 {
        let p = (2.0 * (E * z + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if z < E {
        z.ln_1p()
    } else {
        let l1 = z.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + 1.0;
        if wp1.abs() < 1e-300 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        let next = w - step;
        if !next.is_finite() {
            break;
        }
        let done = (next - w).abs() <= 4.0 * f64::EPSILON * next.abs().max(1e-300);
        w = next.max(-1.0);
        if done {
            break;
        }
    }
    // One Newton polish step settles the last ulp.
    let ew = w.exp();
    let f = w * ew - z;
    let d = ew * (w + 1.0);
    if d.abs() > 1e-12 {
        let polished = w - f / d;
        if (polished * polished.exp() - z).abs() < f.abs() {
            w = polished;
        }
    }
    Ok(w.max(-1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_points() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(E).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(lambert_w0(-1.0 / E).unwrap(), -1.0);
    }

    #[test]
    fn threshold_argument() {
        // (ln2 - 1) e^(ln2 - 1) = 2 (ln2 - 1) / e.
        let ln2m1 = std::f64::consts::LN_2 - 1.0;
        let z = 2.0 * ln2m1 / E;
        assert!((ln2m1 * ln2m1.exp() - z).abs() < 1e-16);
        assert!((lambert_w0(z).unwrap() - ln2m1).abs() < 1e-14);
    }

    #[test]
    fn domain() {
        assert!(lambert_w0(-0.4).is_err());
        assert!(lambert_w0(f64::NAN).is_err());
        assert_eq!(lambert_w0(-1.0 / E - 5e-16).unwrap(), -1.0);
    }
}
