//! Random small graphs and closed walks for exhaustive and fuzz suites.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{edge, is_tangle_free, ClosedPath, Edge, Graph};
use crate::sampler::{DiagMode, SparseSymMatrix};

/// Uniform simple graph with `m` distinct edges on `n` vertices.
pub fn random_graph<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Graph {
    let m = m.min(n * n.saturating_sub(1) / 2);
    let mut set = BTreeSet::new();
    while set.len() < m {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            set.insert(edge(a, b));
        }
    }
    Graph::from_edges(n, &set.into_iter().collect::<Vec<_>>()).expect("simple edges")
}

/// Random spanning tree (each vertex attached to an earlier one) plus
/// `extra` further distinct edges.
pub fn random_connected_graph<R: Rng + ?Sized>(n: usize, extra: usize, rng: &mut R) -> Graph {
    let mut set: BTreeSet<Edge> = (1..n).map(|v| edge(v, rng.gen_range(0..v))).collect();
    let target = (set.len() + extra).min(n * n.saturating_sub(1) / 2);
    while set.len() < target {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            set.insert(edge(a, b));
        }
    }
    Graph::from_edges(n, &set.into_iter().collect::<Vec<_>>()).expect("simple edges")
}

/// Connected `l`-tangle-free graph with at most `max_edges` edges, by
/// rejection.
pub fn random_tangle_free_graph<R: Rng + ?Sized>(n: usize, max_edges: usize, l: usize, rng: &mut R) -> Graph {
    assert!(n >= 2 && max_edges + 1 >= n, "a connected graph on {n} vertices needs {} edges", n - 1);
    loop {
        let extra = rng.gen_range(0..=max_edges + 1 - n);
        let g = random_connected_graph(n, extra, rng);
        if is_tangle_free(&g, l) {
            return g;
        }
    }
}

/// Matrix on the edges of `g` with pairwise distinct magnitudes in
/// `[0.05, 1]` and random signs.
pub fn distinct_entry_matrix<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> SparseSymMatrix {
    let edges = g.edges();
    let mut mags: Vec<f64> = (0..edges.len()).map(|i| 0.05 + 0.95 * (i + 1) as f64 / (edges.len() + 1) as f64).collect();
    mags.shuffle(rng);
    let t = edges
        .into_iter()
        .zip(mags)
        .map(|((a, b), m)| (a, b, if rng.gen::<bool>() { m } else { -m }));
    SparseSymMatrix::from_upper_triplets(g.n(), DiagMode::Zero, t).expect("valid triplets")
}

/// Random closed walk of length `2k` from `start`: a random walk of length
/// `2k - d` followed by a shortest return of length `d`; retried until the
/// parities match. `None` if `start` is isolated.
pub fn random_closed_walk<R: Rng + ?Sized>(g: &Graph, start: usize, k: usize, rng: &mut R) -> Option<ClosedPath> {
    if g.degree(start) == 0 || k == 0 {
        return None;
    }
    for _ in 0..1000 {
        let mut walk = vec![start];
        let len = 2 * k;
        loop {
            let cur = *walk.last().unwrap();
            let back = shortest_path(g, cur, start);
            let remaining = len + 1 - walk.len();
            if back.len() - 1 == remaining {
                walk.extend_from_slice(&back[1..]);
                return ClosedPath::new(walk).ok();
            }
            if back.len() - 1 > remaining || remaining == 0 {
                break;
            }
            let nb = g.neighbors(cur);
            walk.push(nb[rng.gen_range(0..nb.len())]);
        }
    }
    None
}

fn shortest_path(g: &Graph, from: usize, to: usize) -> Vec<usize> {
    let mut prev = vec![usize::MAX; g.n()];
    prev[from] = from;
    let mut q = std::collections::VecDeque::from([from]);
    while let Some(v) = q.pop_front() {
        if v == to {
            break;
        }
        for &w in g.neighbors(v) {
            if prev[w] == usize::MAX {
                prev[w] = v;
                q.push_back(w);
            }
        }
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = prev[cur];
        path.push(cur);
    }
    path.reverse();
    path
}
