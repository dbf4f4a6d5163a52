//! Constructive lower bounds on `|lambda_(|k|)|`: tree neighborhoods, the
//! layered test vector, Rayleigh quotients and disjoint-tree certificates.

mod synthetic;

pub use synthetic::{lemma_target, materialize_synthetic, sample_lumped_rayleigh, SyntheticTree, TwoPointMagnitude};

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::{invalid, Result};
use crate::graphcomb::{graph_from_matrix, Graph};
use crate::sampler::SparseSymMatrix;

/// BFS ball of radius `q` that is a tree.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedTreeNbhd {
    pub root: usize,
    pub depth: usize,
    /// `layers[r]` holds the vertices at distance `r`; `layers[0] = [root]`.
    pub layers: Vec<Vec<usize>>,
    pub parent: HashMap<usize, usize>,
    /// Every leaf sits at depth `q`.
    pub proper: bool,
}

impl RootedTreeNbhd {
    pub fn layer_sizes(&self) -> Vec<usize> {
        self.layers.iter().map(Vec::len).collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    /// Children of `u` in BFS order.
    pub fn children(&self, u: usize, depth_of_u: usize) -> impl Iterator<Item = usize> + '_ {
        self.layers.get(depth_of_u + 1).into_iter().flatten().copied().filter(move |z| self.parent.get(z) == Some(&u))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeFailure {
    InvalidDepth(usize),
    RootOutOfRange(usize),
    Cycle { a: usize, b: usize },
    ShortLeaf { vertex: usize, depth: usize },
    DegreeOutOfRange { vertex: usize, degree: usize },
}

impl fmt::Display for TreeFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeFailure::InvalidDepth(q) => write!(f, "depth must be odd and >= 1, got {q}"),
            TreeFailure::RootOutOfRange(v) => write!(f, "root {v} is not a vertex"),
            TreeFailure::Cycle { a, b } => write!(f, "edge {a}-{b} closes a cycle in the ball"),
            TreeFailure::ShortLeaf { vertex, depth } => write!(f, "leaf {vertex} at depth {depth}"),
            TreeFailure::DegreeOutOfRange { vertex, degree } => write!(f, "interior vertex {vertex} has degree {degree}"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NbhdOptions {
    /// Fail on leaves shallower than `q`.
    pub require_full_depth: bool,
    /// Inclusive degree range for interior vertices (not root, not leaves).
    pub degree_range: Option<(f64, f64)>,
}

/// The radius-`q` ball around `v`, accepted only if its induced subgraph is a
/// tree and the requested leaf/degree conditions hold.
pub fn q_neighborhood(
    g: &Graph,
    v: usize,
    q: usize,
    opts: NbhdOptions,
) -> std::result::Result<RootedTreeNbhd, TreeFailure> {
    if q == 0 || q % 2 == 0 {
        return Err(TreeFailure::InvalidDepth(q));
    }
    if v >= g.n() {
        return Err(TreeFailure::RootOutOfRange(v));
    }
    let mut depth_of: HashMap<usize, usize> = HashMap::from([(v, 0)]);
    let mut parent = HashMap::new();
    let mut layers = vec![vec![v]];
    let mut queue = VecDeque::from([v]);
    let mut proper = true;
    while let Some(u) = queue.pop_front() {
        let du = depth_of[&u];
        let up = parent.get(&u).copied();
        let mut children = 0;
        for &x in g.neighbors(u) {
            if Some(x) == up {
                continue;
            }
            if depth_of.contains_key(&x) {
                return Err(TreeFailure::Cycle { a: u, b: x });
            }
            if du == q {
                continue;
            }
            depth_of.insert(x, du + 1);
            parent.insert(x, u);
            if layers.len() <= du + 1 {
                layers.push(Vec::new());
            }
            layers[du + 1].push(x);
            queue.push_back(x);
            children += 1;
        }
        if du < q && children == 0 {
            if opts.require_full_depth {
                return Err(TreeFailure::ShortLeaf { vertex: u, depth: du });
            }
            proper = false;
        }
        if du > 0 && du < q {
            if let Some((lo, hi)) = opts.degree_range {
                let deg = g.degree(u);
                if (deg as f64) < lo || (deg as f64) > hi {
                    return Err(TreeFailure::DegreeOutOfRange { vertex: u, degree: deg });
                }
            }
        }
    }
    Ok(RootedTreeNbhd { root: v, depth: q, layers, parent, proper })
}

/// Sparse test vector supported on the odd layers of a tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TestVector {
    /// `(vertex, coefficient)`, sorted by vertex.
    pub support: Vec<(usize, f64)>,
    /// `deltas[j] = delta_{2j}`.
    pub deltas: Vec<f64>,
}

impl TestVector {
    pub fn to_dense(&self, n: usize) -> Vec<f64> {
        let mut y = vec![0.0; n];
        for &(v, c) in &self.support {
            y[v] = c;
        }
        y
    }

    pub fn norm(&self) -> f64 {
        self.support.iter().map(|(_, c)| c * c).sum::<f64>().sqrt()
    }
}

pub fn row_norm_sq(m: &SparseSymMatrix, v: usize) -> f64 {
    m.row(v).1.iter().map(|x| x * x).sum()
}

/// `delta_0 = 1`, `delta_r = delta_{r-2} dt / ((dt - 1)(R - dt))` for even
/// `r <= q - 1`, where `R` is the squared root row norm.
pub fn test_vector_deltas(row_norm_sq: f64, d_tilde: f64, q: usize) -> Result<Vec<f64>> {
    if !(row_norm_sq > d_tilde) || !(d_tilde > 1.0) {
        return Err(invalid(format!("need ||row_v||^2 > d_tilde > 1, got {row_norm_sq} and {d_tilde}")));
    }
    let ratio = d_tilde / ((d_tilde - 1.0) * (row_norm_sq - d_tilde));
    let mut deltas = vec![1.0];
    for _ in 1..=(q.saturating_sub(1) / 2) {
        deltas.push(deltas.last().unwrap() * ratio);
    }
    Ok(deltas)
}

/// `Y_z = delta_{depth(z)-1} * prod of M along the root-to-z path` for every
/// vertex `z` of odd depth.
pub fn build_test_vector(m: &SparseSymMatrix, t: &RootedTreeNbhd, d_tilde: f64) -> Result<TestVector> {
    let deltas = test_vector_deltas(row_norm_sq(m, t.root), d_tilde, t.depth)?;
    Ok(layered_vector(m, t, deltas))
}

fn layered_vector(m: &SparseSymMatrix, t: &RootedTreeNbhd, deltas: Vec<f64>) -> TestVector {
    let mut prod: HashMap<usize, f64> = HashMap::from([(t.root, 1.0)]);
    let mut support = Vec::new();
    for (r, layer) in t.layers.iter().enumerate().skip(1) {
        for &z in layer {
            let p = t.parent[&z];
            let val = prod[&p] * m.value(p, z);
            prod.insert(z, val);
            if r % 2 == 1 && (r - 1) / 2 < deltas.len() {
                support.push((z, deltas[(r - 1) / 2] * val));
            }
        }
    }
    support.sort_unstable_by_key(|&(v, _)| v);
    TestVector { support, deltas }
}

/// `||M Y|| / ||Y||`.
pub fn rayleigh(m: &SparseSymMatrix, y: &TestVector) -> Result<f64> {
    let ny = y.norm();
    if !(ny > 0.0) {
        return Err(invalid("zero test vector"));
    }
    let mut my: HashMap<usize, f64> = HashMap::new();
    for &(v, c) in &y.support {
        let (cols, vals) = m.row(v);
        for (&j, &x) in cols.iter().zip(vals) {
            *my.entry(j).or_insert(0.0) += x * c;
        }
    }
    Ok(my.values().map(|x| x * x).sum::<f64>().sqrt() / ny)
}

/// `||M x|| / ||x||` for a dense vector.
pub fn rayleigh_dense(m: &SparseSymMatrix, x: &[f64]) -> Result<f64> {
    let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(nx > 0.0) {
        return Err(invalid("zero test vector"));
    }
    let mut y = vec![0.0; m.n()];
    m.matvec(x, &mut y);
    Ok(y.iter().map(|v| v * v).sum::<f64>().sqrt() / nx)
}

/// Default relative slack of `d_tilde` over `np`.
pub const D_TILDE_SLACK: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateParams {
    pub k: usize,
    pub q: usize,
    pub d_tilde: f64,
    pub eps: f64,
    /// Expected degree, used only for the bulk-regime target.
    pub np: f64,
    /// Shrink `q` per root to the largest odd depth with a tree ball.
    pub adaptive_depth: bool,
}

impl CertificateParams {
    /// `q = 5`, `d_tilde = (1 + 0.1) np`, `eps = 0.1`, adaptive depth.
    pub fn for_density(np: f64, k: usize) -> Self {
        CertificateParams { k, q: 5, d_tilde: (1.0 + D_TILDE_SLACK) * np, eps: 0.1, np, adaptive_depth: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `||row_v||^2 > 2(1 + eps) d_tilde`.
    Outlier,
    Bulk,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateEntry {
    pub root: usize,
    pub depth: usize,
    pub row_norm_sq: f64,
    pub d_tilde: f64,
    pub rayleigh: f64,
    pub regime: Regime,
    /// `(1 - eps) R / sqrt(R - d_tilde)` for outliers, `2 sqrt(np)(1 - eps)`
    /// in the bulk.
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub entries: Vec<CertificateEntry>,
}

impl Certificate {
    /// The certified lower bound on `|lambda_(|k|)|`.
    pub fn bound(&self) -> f64 {
        self.entries.iter().map(|e| e.rayleigh).fold(f64::INFINITY, f64::min)
    }

    pub fn interlaces(&self, lambda_abs_k: f64, tol: f64) -> bool {
        self.bound() <= lambda_abs_k + tol
    }

    /// `root,depth,row_norm_sq,d_tilde,rayleigh,lambda_k,ok`.
    pub fn to_csv(&self, lambda_abs_k: f64, tol: f64) -> String {
        let mut out = String::from("root,depth,row_norm_sq,d_tilde,rayleigh,lambda_k,ok\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{:.12e},{:.12e},{:.12e},{:.12e},{}\n",
                e.root,
                e.depth,
                e.row_norm_sq,
                e.d_tilde,
                e.rayleigh,
                lambda_abs_k,
                e.rayleigh.min(self.bound()) <= lambda_abs_k + tol
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CertificateFailure {
    InvalidParameter(String),
    TooFewTrees { found: usize, wanted: usize },
}

impl fmt::Display for CertificateFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertificateFailure::InvalidParameter(s) => write!(f, "invalid parameter: {s}"),
            CertificateFailure::TooFewTrees { found, wanted } => {
                write!(f, "only {found} of {wanted} disjoint tree neighborhoods found")
            }
        }
    }
}

fn distances_within(g: &Graph, v: usize, radius: usize) -> HashMap<usize, usize> {
    let mut dist = HashMap::from([(v, 0)]);
    let mut queue = VecDeque::from([v]);
    while let Some(u) = queue.pop_front() {
        let du = dist[&u];
        if du == radius {
            continue;
        }
        for &x in g.neighbors(u) {
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(x) {
                e.insert(du + 1);
                queue.push_back(x);
            }
        }
    }
    dist
}

/// Greedy certificate: roots in decreasing row-norm order, each with a tree
/// ball of odd depth `q_i`, accepted when its distance to every chosen root
/// exceeds `q_i + q_j + 2`. Then the vectors `Y_i` and `M Y_i` have pairwise
/// disjoint supports, so `M^2` has a `k`-dimensional subspace with Rayleigh
/// quotient at least `min_i rayleigh_i^2` and the minimum lower-bounds
/// `|lambda_(|k|)(M)|`.
pub fn lower_bound_certificate(
    m: &SparseSymMatrix,
    p: &CertificateParams,
) -> std::result::Result<Certificate, CertificateFailure> {
    if p.k == 0 || p.q == 0 || p.q % 2 == 0 {
        return Err(CertificateFailure::InvalidParameter(format!("need k >= 1 and odd q, got k={}, q={}", p.k, p.q)));
    }
    if !(p.d_tilde > 1.0) || !(p.eps > 0.0 && p.eps < 1.0) {
        return Err(CertificateFailure::InvalidParameter("need d_tilde > 1 and eps in (0,1)".into()));
    }
    let g = graph_from_matrix(&m.without_diagonal());
    let norms: Vec<f64> = (0..m.n()).map(|v| row_norm_sq(m, v)).collect();
    let mut order: Vec<usize> = (0..m.n()).filter(|&v| g.degree(v) > 0).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));

    let opts = NbhdOptions { require_full_depth: true, degree_range: None };
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    let mut entries = Vec::new();
    let q_max = p.q;
    for &v in &order {
        if chosen.len() == p.k {
            break;
        }
        let mut depth = p.q;
        let tree = loop {
            match q_neighborhood(&g, v, depth, opts) {
                Ok(t) => break Some(t),
                Err(_) if p.adaptive_depth && depth > 1 => depth -= 2,
                Err(_) => break None,
            }
        };
        let Some(tree) = tree else { continue };
        if !chosen.is_empty() {
            let dist = distances_within(&g, v, depth + q_max + 2);
            if chosen.iter().any(|&(r, qr)| dist.get(&r).is_some_and(|&d| d <= depth + qr + 2)) {
                continue;
            }
        }
        let r_sq = norms[v];
        let deltas = test_vector_deltas(r_sq, p.d_tilde, depth).unwrap_or_else(|_| vec![1.0]);
        let y = layered_vector(m, &tree, deltas);
        let Ok(ray) = rayleigh(m, &y) else { continue };
        let (regime, target) = if r_sq > 2.0 * (1.0 + p.eps) * p.d_tilde {
            (Regime::Outlier, lemma_target(r_sq, p.d_tilde, p.eps))
        } else {
            (Regime::Bulk, 2.0 * p.np.sqrt() * (1.0 - p.eps))
        };
        chosen.push((v, depth));
        entries.push(CertificateEntry { root: v, depth, row_norm_sq: r_sq, d_tilde: p.d_tilde, rayleigh: ray, regime, target });
    }
    if entries.len() < p.k {
        return Err(CertificateFailure::TooFewTrees { found: entries.len(), wanted: p.k });
    }
    Ok(Certificate { entries })
}
