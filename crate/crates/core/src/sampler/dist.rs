//! Bounded atom distributions with unit second moment.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{invalid, Error, Result};

/// Unperturbed atom shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtomKind {
    /// Uniform on `{-1, +1}`.
    Rademacher,
    /// The constant `1` (adjacency matrices of random graphs).
    ConstantOne,
    /// Uniform on `[-sqrt(3), sqrt(3)]`.
    UniformSymmetric,
}

/// Distribution family of the atom variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistKind {
    Atom(AtomKind),
    /// `(base + U(-width, width))` rescaled back to unit second moment.
    /// Absolutely continuous for any `width > 0`.
    Smoothed { base: AtomKind, width: f64 },
}

/// Default smoothing width.
pub const DEFAULT_SMOOTHING_WIDTH: f64 = 1e-3;

const SQRT3: f64 = 1.732_050_807_568_877_2;

impl AtomKind {
    fn max_abs(self) -> f64 {
        match self {
            AtomKind::Rademacher | AtomKind::ConstantOne => 1.0,
            AtomKind::UniformSymmetric => SQRT3,
        }
    }

    fn mean(self) -> f64 {
        match self {
            AtomKind::ConstantOne => 1.0,
            _ => 0.0,
        }
    }

    fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            AtomKind::Rademacher => {
                if rng.gen::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            AtomKind::ConstantOne => 1.0,
            AtomKind::UniformSymmetric => SQRT3 * (2.0 * rng.gen::<f64>() - 1.0),
        }
    }

    fn name(self) -> &'static str {
        match self {
            AtomKind::Rademacher => "rademacher",
            AtomKind::ConstantOne => "constant_one",
            AtomKind::UniformSymmetric => "uniform_symmetric",
        }
    }
}

impl FromStr for AtomKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rademacher" => Ok(AtomKind::Rademacher),
            "constant_one" | "er" => Ok(AtomKind::ConstantOne),
            "uniform_symmetric" | "uniform" => Ok(AtomKind::UniformSymmetric),
            other => Err(invalid(format!("unknown distribution `{other}`"))),
        }
    }
}

impl FromStr for DistKind {
    type Err = Error;

    /// Accepts `rademacher`, `constant_one`, `uniform_symmetric`, or
    /// `smoothed:<base>[:<width>]`.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("smoothed:") {
            let mut it = rest.splitn(2, ':');
            let base: AtomKind = it.next().unwrap_or("").parse()?;
            let width = match it.next() {
                Some(w) => w.parse::<f64>().map_err(|_| invalid(format!("bad smoothing width `{w}`")))?,
                None => DEFAULT_SMOOTHING_WIDTH,
            };
            return Ok(DistKind::Smoothed { base, width });
        }
        Ok(DistKind::Atom(s.parse()?))
    }
}

impl fmt::Display for DistKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistKind::Atom(a) => f.write_str(a.name()),
            DistKind::Smoothed { base, width } => write!(f, "smoothed:{}:{}", base.name(), width),
        }
    }
}

/// A bounded real random variable `xi` with `E xi^2 = 1` and `xi^2 <= bound_sq`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundedDistribution {
    kind: DistKind,
    bound_sq: f64,
    mean: f64,
    second_moment: f64,
    /// Divisor restoring unit second moment for the smoothed family.
    scale: f64,
}

impl DistKind {
    /// Smallest admissible `h`: the supremum of `xi^2`.
    pub fn natural_bound_sq(self) -> f64 {
        match self {
            DistKind::Atom(a) => a.max_abs().powi(2),
            DistKind::Smoothed { base, width } => {
                let scale = (1.0 + width * width / 3.0).sqrt();
                ((base.max_abs() + width) / scale).powi(2)
            }
        }
    }
}

/// Validates `kind` against the requested bound `h` on `xi^2`.
pub fn make_distribution(kind: DistKind, h: f64) -> Result<BoundedDistribution> {
    if !(h >= 1.0) {
        return Err(invalid(format!("bound h={h} must be at least 1 for a unit second moment")));
    }
    let (scale, sup_sq, mean) = match kind {
        DistKind::Atom(a) => (1.0, a.max_abs().powi(2), a.mean()),
        DistKind::Smoothed { base, width } => {
            if !(width > 0.0 && width < 1.0) {
                return Err(invalid(format!("smoothing width {width} must lie in (0, 1)")));
            }
            // E(b + u)^2 = E b^2 + E u^2 with u ~ U(-w, w).
            let scale = (1.0 + width * width / 3.0).sqrt();
            let sup = (base.max_abs() + width) / scale;
            (scale, sup * sup, base.mean() / scale)
        }
    };
    if sup_sq > h * (1.0 + 1e-12) {
        return Err(invalid(format!("{kind} takes values with xi^2 up to {sup_sq}, above h={h}")));
    }
    Ok(BoundedDistribution { kind, bound_sq: h, mean, second_moment: 1.0, scale })
}

impl BoundedDistribution {
    pub fn kind(&self) -> DistKind {
        self.kind
    }

    /// Uniform bound `h` on `xi^2`.
    pub fn bound_sq(&self) -> f64 {
        self.bound_sq
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn second_moment(&self) -> f64 {
        self.second_moment
    }

    pub fn variance(&self) -> f64 {
        self.second_moment - self.mean * self.mean
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.kind {
            DistKind::Atom(a) => a.sample(rng),
            DistKind::Smoothed { base, width } => {
                let u = width * (2.0 * rng.gen::<f64>() - 1.0);
                (base.sample(rng) + u) / self.scale
            }
        }
    }

    /// `P(xi <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self.kind {
            DistKind::Atom(AtomKind::Rademacher) => step(x, -1.0) * 0.5 + step(x, 1.0) * 0.5,
            DistKind::Atom(AtomKind::ConstantOne) => step(x, 1.0),
            DistKind::Atom(AtomKind::UniformSymmetric) => uniform_cdf(x, -SQRT3, SQRT3),
            DistKind::Smoothed { base, width } => {
                let y = x * self.scale;
                match base {
                    AtomKind::Rademacher => {
                        0.5 * uniform_cdf(y, -1.0 - width, -1.0 + width) + 0.5 * uniform_cdf(y, 1.0 - width, 1.0 + width)
                    }
                    AtomKind::ConstantOne => uniform_cdf(y, 1.0 - width, 1.0 + width),
                    AtomKind::UniformSymmetric => sum_of_uniforms_cdf(y, SQRT3, width),
                }
            }
        }
    }

    /// Left-continuous inverse `inf{x : P(xi <= x) >= a}` for `a` in `(0, 1)`.
    pub fn quantile(&self, a: f64) -> f64 {
        let a = a.clamp(0.0, 1.0);
        match self.kind {
            DistKind::Atom(AtomKind::Rademacher) => {
                if a <= 0.5 {
                    -1.0
                } else {
                    1.0
                }
            }
            DistKind::Atom(AtomKind::ConstantOne) => 1.0,
            DistKind::Atom(AtomKind::UniformSymmetric) => SQRT3 * (2.0 * a - 1.0),
            DistKind::Smoothed { base, width } => {
                let y = match base {
                    AtomKind::Rademacher => {
                        if a <= 0.5 {
                            -1.0 - width + 4.0 * width * a
                        } else {
                            1.0 - width + 4.0 * width * (a - 0.5)
                        }
                    }
                    AtomKind::ConstantOne => 1.0 - width + 2.0 * width * a,
                    AtomKind::UniformSymmetric => {
                        bisect_increasing(|y| sum_of_uniforms_cdf(y, SQRT3, width), a, -SQRT3 - width, SQRT3 + width)
                    }
                };
                y / self.scale
            }
        }
    }

    /// Left-continuous inverse of the distribution of `psi = xi^2`.
    pub fn sq_quantile(&self, a: f64) -> f64 {
        let a = a.clamp(0.0, 1.0);
        match self.kind {
            DistKind::Atom(AtomKind::Rademacher | AtomKind::ConstantOne) => 1.0,
            // |xi| / sqrt(3) is uniform on [0, 1].
            DistKind::Atom(AtomKind::UniformSymmetric) => 3.0 * a * a,
            DistKind::Smoothed { base, width } => match base {
                // |xi| * scale = 1 + u with u uniform on (-w, w).
                AtomKind::Rademacher | AtomKind::ConstantOne => {
                    let r = (1.0 - width + 2.0 * width * a) / self.scale;
                    r * r
                }
                AtomKind::UniformSymmetric => {
                    let abs_cdf = |r: f64| {
                        let y = r * self.scale;
                        sum_of_uniforms_cdf(y, SQRT3, width) - sum_of_uniforms_cdf(-y, SQRT3, width)
                    };
                    let r = bisect_increasing(abs_cdf, a, 0.0, (SQRT3 + width) / self.scale);
                    r * r
                }
            },
        }
    }
}

fn step(x: f64, at: f64) -> f64 {
    if x >= at {
        1.0
    } else {
        0.0
    }
}

fn uniform_cdf(x: f64, lo: f64, hi: f64) -> f64 {
    ((x - lo) / (hi - lo)).clamp(0.0, 1.0)
}

/// CDF of `U(-a, a) + U(-w, w)`, `w <= a`: a symmetric trapezoid.
fn sum_of_uniforms_cdf(y: f64, a: f64, w: f64) -> f64 {
    let norm = 4.0 * a * w;
    // Integral of the trapezoid density from -inf to y.
    let lo = -a - w;
    let hi = a + w;
    if y <= lo {
        return 0.0;
    }
    if y >= hi {
        return 1.0;
    }
    let ramp = 2.0 * w;
    if y <= -a + w {
        let t = y - lo;
        return t * t / (2.0 * norm);
    }
    if y <= a - w {
        return (ramp * ramp / 2.0 + ramp * (y - (-a + w))) / norm;
    }
    let t = hi - y;
    1.0 - t * t / (2.0 * norm)
}

fn bisect_increasing(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }
    hi
}
