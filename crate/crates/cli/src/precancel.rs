//! Exhaustive check of the identity `E[prod_E xi 1_F] = E[prod_E xi 1_{F_S} 1_F]`
//! where `F` bounds every squared row norm by `r` and `F_S` requires, for each
//! couple `{i, j}` of `S`, `max(|row_i|^2, |row_j|^2) >= r + xi_ij^2 - h`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::trial_seed;

/// Absolute tolerance on `|lhs - rhs|`.
pub const PRECANCEL_TOL: f64 = 1e-12;
pub const MAX_N: usize = 5;

/// Centered entry laws bounded by `sqrt(h)` with `h = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntryLaw {
    Rademacher,
    /// `+-1` with probability `p/2` each, else `0`. Row norms are random,
    /// so the events are nontrivial (under Rademacher they are constant).
    Sparse { p: f64 },
    /// `-1` with probability `q/3`, `1/2` with probability `2q/3`, else `0`.
    /// Centered but not symmetric, so odd powers do not cancel by a sign
    /// flip and the identity is not vacuous when `S` is nonempty.
    Skewed { q: f64 },
}

impl EntryLaw {
    fn atoms(self) -> Vec<(f64, f64)> {
        match self {
            EntryLaw::Rademacher => vec![(-1.0, 0.5), (1.0, 0.5)],
            EntryLaw::Sparse { p } => vec![(-1.0, p / 2.0), (0.0, 1.0 - p), (1.0, p / 2.0)],
            EntryLaw::Skewed { q } => vec![(-1.0, q / 3.0), (0.0, 1.0 - q), (0.5, 2.0 * q / 3.0)],
        }
    }
}

impl fmt::Display for EntryLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntryLaw::Rademacher => write!(f, "rademacher"),
            EntryLaw::Sparse { p } => write!(f, "sparse({p})"),
            EntryLaw::Skewed { q } => write!(f, "skewed({q})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecancelInstance {
    pub n: usize,
    /// Multiset of couples, each stored as `(min, max)`.
    pub e: Vec<(usize, usize)>,
    pub s: Vec<(usize, usize)>,
    pub r: f64,
    pub law: EntryLaw,
}

pub const H: f64 = 1.0;

fn norm_couple(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl PrecancelInstance {
    pub fn new(n: usize, e: &[(usize, usize)], s: &[(usize, usize)], r: f64, law: EntryLaw) -> Result<Self, CliError> {
        let inst = PrecancelInstance {
            n,
            e: e.iter().map(|&(a, b)| norm_couple(a, b)).collect(),
            s: s.iter().map(|&(a, b)| norm_couple(a, b)).collect(),
            r,
            law,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(format!("precancel instance: {m}")));
        if !(2..=MAX_N).contains(&self.n) {
            return bad(format!("n = {} outside [2, {MAX_N}]", self.n));
        }
        if !(self.r > 0.0) {
            return bad(format!("r = {} must be positive", self.r));
        }
        if let EntryLaw::Sparse { p: q } | EntryLaw::Skewed { q } = self.law {
            if !(q > 0.0 && q <= 1.0) {
                return bad(format!("law parameter must lie in (0, 1], got {q}"));
            }
        }
        if self.e.iter().chain(&self.s).any(|&(a, b)| a == b || b >= self.n) {
            return bad("couples must be off-diagonal and inside [n]".into());
        }
        let mult = self.multiplicities();
        for (i, c) in self.s.iter().enumerate() {
            if mult.get(c) != Some(&1) {
                return bad(format!("S couple {c:?} must appear exactly once in E"));
            }
            for d in &self.s[i + 1..] {
                if c.0 == d.0 || c.0 == d.1 || c.1 == d.0 || c.1 == d.1 {
                    return bad(format!("S couples {c:?} and {d:?} overlap"));
                }
            }
        }
        Ok(())
    }

    fn multiplicities(&self) -> BTreeMap<(usize, usize), usize> {
        let mut m = BTreeMap::new();
        for &c in &self.e {
            *m.entry(c).or_insert(0) += 1;
        }
        m
    }

    /// Both expectations by enumerating every assignment of the upper triangle.
    pub fn exact_sides(&self) -> (f64, f64) {
        self.sides(true)
    }

    /// `shifted = false` replaces `r + xi_ij^2 - h` by `r` in `F_S`.
    fn sides(&self, shifted: bool) -> (f64, f64) {
        let n = self.n;
        let couples: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let idx = |c: (usize, usize)| couples.iter().position(|&d| d == c).expect("validated couple");
        let e_idx: Vec<usize> = self.e.iter().map(|&c| idx(c)).collect();
        let s_idx: Vec<(usize, usize, usize)> = self.s.iter().map(|&c| (c.0, c.1, idx(c))).collect();
        let atoms = self.law.atoms();
        let mut digits = vec![0usize; couples.len()];
        let (mut lhs, mut rhs) = (0.0, 0.0);
        let mut rows = vec![0.0; n];
        loop {
            let mut prob = 1.0;
            rows.iter_mut().for_each(|x| *x = 0.0);
            for (k, &(i, j)) in couples.iter().enumerate() {
                let (v, pr) = atoms[digits[k]];
                prob *= pr;
                rows[i] += v * v;
                rows[j] += v * v;
            }
            let in_f = rows.iter().all(|&x| x <= self.r);
            if in_f && prob > 0.0 {
                let prod: f64 = e_idx.iter().map(|&k| atoms[digits[k]].0).product();
                lhs += prob * prod;
                let in_fs = s_idx.iter().all(|&(i, j, k)| {
                    let x = atoms[digits[k]].0;
                    rows[i].max(rows[j]) >= if shifted { self.r + x * x - H } else { self.r }
                });
                if in_fs {
                    rhs += prob * prod;
                }
            }
            let mut k = 0;
            loop {
                if k == digits.len() {
                    return (lhs, rhs);
                }
                digits[k] += 1;
                if digits[k] < atoms.len() {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
        }
    }

    fn describe(&self) -> String {
        let fmt_set = |v: &[(usize, usize)]| v.iter().map(|(a, b)| format!("{a}-{b}")).collect::<Vec<_>>().join(" ");
        format!("n={} law={} r={} E=[{}] S=[{}]", self.n, self.law, self.r, fmt_set(&self.e), fmt_set(&self.s))
    }
}

/// Closed walk of length `len` on `K_n` as a multiset, a random disjoint `S`
/// of multiplicity-one couples, a random threshold and law.
pub fn random_instance<R: Rng + ?Sized>(max_n: usize, rng: &mut R) -> PrecancelInstance {
    let n = rng.gen_range(3..=max_n.clamp(3, MAX_N));
    let len = 2 * rng.gen_range(2..=4);
    let walk = loop {
        let mut w = vec![rng.gen_range(0..n)];
        for _ in 1..len {
            let cur = *w.last().unwrap();
            let mut next = rng.gen_range(0..n - 1);
            if next >= cur {
                next += 1;
            }
            w.push(next);
        }
        if *w.last().unwrap() != w[0] {
            w.push(w[0]);
            break w;
        }
    };
    let e: Vec<(usize, usize)> = walk.windows(2).map(|p| norm_couple(p[0], p[1])).collect();
    let mut singles: Vec<(usize, usize)> = e.iter().copied().filter(|c| e.iter().filter(|d| *d == c).count() == 1).collect();
    singles.shuffle(rng);
    let mut s: Vec<(usize, usize)> = Vec::new();
    for c in singles {
        let free = s.iter().all(|d| c.0 != d.0 && c.0 != d.1 && c.1 != d.0 && c.1 != d.1);
        if free && rng.gen_bool(0.7) {
            s.push(c);
        }
    }
    let weight = [0.3, 0.5, 0.7, 1.0][rng.gen_range(0..4)];
    let law = match rng.gen_range(0..10) {
        0 => EntryLaw::Rademacher,
        1 | 2 => EntryLaw::Sparse { p: weight },
        _ => EntryLaw::Skewed { q: weight },
    };
    let r = match law {
        // F has probability zero below n - 1.
        EntryLaw::Rademacher => (n - 1) as f64,
        _ => rng.gen_range(1..n) as f64 * [0.5, 1.0][rng.gen_range(0..2)] + [0.0, 0.25, 0.5][rng.gen_range(0..3)],
    };
    PrecancelInstance::new(n, &e, &s, r, law).expect("generator builds valid instances")
}

/// Hand-built instances: empty `S`, a 4-cycle with two opposite couples in
/// `S` at a middle threshold (skewed and Rademacher), and a huge threshold.
pub fn fixed_instances() -> Vec<PrecancelInstance> {
    let cycle = [(0, 1), (1, 2), (2, 3), (3, 0)];
    let sparse = EntryLaw::Sparse { p: 0.5 };
    let skewed = EntryLaw::Skewed { q: 0.9 };
    vec![
        PrecancelInstance::new(4, &cycle, &[], 2.0, sparse).unwrap(),
        PrecancelInstance::new(4, &cycle, &[(0, 1), (2, 3)], 1.5, skewed).unwrap(),
        PrecancelInstance::new(4, &cycle, &[(0, 1), (2, 3)], 3.0, EntryLaw::Rademacher).unwrap(),
        PrecancelInstance::new(4, &cycle, &[(0, 1), (2, 3)], 1e6, sparse).unwrap(),
    ]
}

#[derive(Debug, Clone)]
pub struct PrecancelRow {
    pub label: String,
    pub instance: PrecancelInstance,
    pub lhs: f64,
    pub rhs: f64,
}

impl PrecancelRow {
    pub fn ok(&self) -> bool {
        (self.lhs - self.rhs).abs() <= PRECANCEL_TOL
    }
}

#[derive(Debug, Clone)]
pub struct PrecancelReport {
    pub rows: Vec<PrecancelRow>,
}

impl PrecancelReport {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.ok()).count()
    }

    pub fn render(&self) -> String {
        let mut out = String::from("#schema=1 experiment=precancel\nlabel,lhs,rhs,ok,instance\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{:e},{:e},{},{}", r.label, r.lhs, r.rhs, u8::from(r.ok()), r.instance.describe());
        }
        out
    }
}

pub fn evaluate(label: String, instance: PrecancelInstance) -> PrecancelRow {
    let (lhs, rhs) = instance.exact_sides();
    PrecancelRow { label, instance, lhs, rhs }
}

/// The fixed instances followed by `trials` random ones with `n <= cfg.n`.
pub fn run_precancel(cfg: &ExperimentConfig) -> Result<PrecancelReport, CliError> {
    if cfg.trials == 0 || cfg.n < 3 || cfg.n > MAX_N {
        return Err(CliError::Config(format!("precancel needs trials >= 1 and 3 <= n <= {MAX_N}")));
    }
    let mut rows: Vec<PrecancelRow> =
        fixed_instances().into_iter().enumerate().map(|(i, inst)| evaluate(format!("fixed{i}"), inst)).collect();
    for t in 0..cfg.trials {
        let mut rng = trial_seed(cfg.master_seed, t, 0.0).rng();
        rows.push(evaluate(format!("random{t}"), random_instance(cfg.n, &mut rng)));
    }
    Ok(PrecancelReport { rows })
}
