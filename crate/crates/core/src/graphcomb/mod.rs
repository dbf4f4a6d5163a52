//! Graph structure used by the trace-method encoding: cycle edges, separated
//! nets, tangle-freeness, cycle intervals and special vertices of paths.

pub mod fuzz;
mod paths;
mod structure;

pub use paths::{classify_special_vertices, classify_walk, ClosedPath, SpecialVertexReport, WalkReplay};
pub use structure::{
    cycle_edges, cycle_intervals, find_removable_half, is_connected, is_tangle_free, max_r_separated, CycleInterval,
};

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};
use crate::sampler::SparseSymMatrix;

/// Undirected edge with endpoints in increasing order.
pub type Edge = (usize, usize);

pub fn edge(a: usize, b: usize) -> Edge {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Simple undirected graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n] }
    }

    /// Rejects loops, duplicate edges and out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[Edge]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for &(a, b) in edges {
            if a == b {
                return Err(invalid(format!("loop at vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(invalid(format!("edge ({a},{b}) out of range for n={n}")));
            }
            if !seen.insert(edge(a, b)) {
                return Err(invalid(format!("duplicate edge ({a},{b})")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph { adj })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n() && self.adj[a].binary_search(&b).is_ok()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(a, b)` with `a < b` in lexicographic order.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.num_edges());
        for (a, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|&&b| b > a).map(|&b| (a, b)));
        }
        out
    }

    /// The same vertex set with `removed` edges deleted.
    pub fn without_edges(&self, removed: &[Edge]) -> Graph {
        let drop: BTreeSet<Edge> = removed.iter().map(|&(a, b)| edge(a, b)).collect();
        let kept: Vec<Edge> = self.edges().into_iter().filter(|e| !drop.contains(e)).collect();
        Graph::from_edges(self.n(), &kept).expect("subgraph of a simple graph")
    }

    /// `n <n>` header followed by `i j` lines.
    pub fn to_text(&self) -> String {
        let mut s = format!("n {}\n", self.n());
        for (a, b) in self.edges() {
            writeln!(s, "{a} {b}").unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 2 || parts[0] != "n" {
            return Err(Error::Parse { line: 1, msg: format!("bad header `{header}`") });
        }
        let n: usize = parts[1].parse().map_err(|_| Error::Parse { line: 1, msg: "bad n".into() })?;
        let mut edges = Vec::new();
        for (ln, line) in lines {
            let err = || Error::Parse { line: ln + 1, msg: format!("bad edge `{line}`") };
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 2 {
                return Err(err());
            }
            edges.push((f[0].parse().map_err(|_| err())?, f[1].parse().map_err(|_| err())?));
        }
        Graph::from_edges(n, &edges)
    }
}

/// Edge `i <-> j` iff the off-diagonal entry `M_ij` is nonzero.
pub fn graph_from_matrix(m: &SparseSymMatrix) -> Graph {
    let edges: Vec<Edge> = m.upper_entries().filter(|&(i, j, _)| i != j).map(|(i, j, _)| (i, j)).collect();
    Graph::from_edges(m.n(), &edges).expect("matrix support is a simple graph")
}
