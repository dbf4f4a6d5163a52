use std::collections::{BTreeSet, VecDeque};

use super::{edge, Edge, Graph};
use crate::error::{invalid, Error, Result};

const MAX_EXHAUSTIVE_S: usize = 20;

/// Bridge flags for `edges` of a graph on `nv` vertices (iterative lowlink).
pub(crate) fn bridge_flags(nv: usize, edges: &[Edge]) -> Vec<bool> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
    for (id, &(a, b)) in edges.iter().enumerate() {
        adj[a].push((b, id));
        adj[b].push((a, id));
    }
    let mut is_bridge = vec![false; edges.len()];
    let mut disc = vec![usize::MAX; nv];
    let mut low = vec![0usize; nv];
    let mut clock = 0;
    for root in 0..nv {
        if disc[root] != usize::MAX {
            continue;
        }
        // (vertex, edge id used to enter it, next adjacency position)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        disc[root] = clock;
        low[root] = clock;
        clock += 1;
        while let Some(top) = stack.last_mut() {
            let (v, via, pos) = *top;
            if pos < adj[v].len() {
                top.2 += 1;
                let (w, id) = adj[v][pos];
                if id == via {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = clock;
                    low[w] = clock;
                    clock += 1;
                    stack.push((w, id, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(parent, _, _)) = stack.last() {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > disc[parent] {
                        is_bridge[via] = true;
                    }
                }
            }
        }
    }
    is_bridge
}

/// Edges lying on some cycle, i.e. the complement of the bridges, sorted.
pub fn cycle_edges(g: &Graph) -> Vec<Edge> {
    let edges = g.edges();
    let flags = bridge_flags(g.n(), &edges);
    edges.into_iter().zip(flags).filter(|(_, b)| !b).map(|(e, _)| e).collect()
}

fn bfs_dist(g: &Graph, src: usize, limit: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    dist[src] = 0;
    let mut q = VecDeque::from([src]);
    while let Some(v) = q.pop_front() {
        if dist[v] == limit {
            continue;
        }
        for &w in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                q.push_back(w);
            }
        }
    }
    dist
}

pub fn is_connected(g: &Graph) -> bool {
    g.n() == 0 || bfs_dist(g, 0, usize::MAX).iter().all(|&d| d != usize::MAX)
}

/// Greedy maximal `r`-separated set: vertices scanned in BFS order from 0,
/// each kept iff its distance to the kept set exceeds `r`.
pub fn max_r_separated(g: &Graph, r: usize) -> Result<Vec<usize>> {
    if r == 0 {
        return Err(invalid("separation radius must be at least 1"));
    }
    if g.n() == 0 {
        return Ok(Vec::new());
    }
    let order = {
        let d = bfs_dist(g, 0, usize::MAX);
        if d.iter().any(|&x| x == usize::MAX) {
            return Err(invalid("graph is disconnected"));
        }
        let mut o: Vec<usize> = (0..g.n()).collect();
        o.sort_by_key(|&v| (d[v], v));
        o
    };
    let mut to_set = vec![usize::MAX; g.n()];
    let mut chosen = Vec::new();
    for v in order {
        if to_set[v] <= r {
            continue;
        }
        chosen.push(v);
        let d = bfs_dist(g, v, r);
        for (t, dv) in to_set.iter_mut().zip(d) {
            *t = (*t).min(dv);
        }
    }
    Ok(chosen)
}

/// Every radius-`l` ball (induced subgraph) has cyclomatic number at most 1.
pub fn is_tangle_free(g: &Graph, l: usize) -> bool {
    (0..g.n()).all(|v| {
        let d = bfs_dist(g, v, l);
        let ball: Vec<usize> = (0..g.n()).filter(|&u| d[u] != usize::MAX).collect();
        let twice_edges: usize =
            ball.iter().map(|&u| g.neighbors(u).iter().filter(|&&w| d[w] != usize::MAX).count()).sum();
        // The ball is connected, so its cyclomatic number is |E| - |V| + 1.
        twice_edges / 2 + 1 <= ball.len() + 1
    })
}

/// A maximal run `i_1 - i_2 - ... - i_q` of cycle edges whose interior
/// vertices are not meeting points; `i_1 == i_q` for a full cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleInterval {
    pub vertices: Vec<usize>,
}

impl CycleInterval {
    pub fn edges(&self) -> Vec<Edge> {
        self.vertices.windows(2).map(|w| edge(w[0], w[1])).collect()
    }

    pub fn interior(&self) -> &[usize] {
        let q = self.vertices.len();
        &self.vertices[1..q - 1]
    }

    pub fn is_full_cycle(&self) -> bool {
        self.vertices.first() == self.vertices.last()
    }
}

/// Partition of the cycle edges of `g` into cycle intervals. Meeting points
/// are the vertices with at least three incident cycle edges.
pub fn cycle_intervals(g: &Graph) -> Vec<CycleInterval> {
    let ce = cycle_edges(g);
    let mut cadj: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    for &(a, b) in &ce {
        cadj[a].push(b);
        cadj[b].push(a);
    }
    for l in &mut cadj {
        l.sort_unstable();
    }
    let meeting: Vec<bool> = cadj.iter().map(|l| l.len() >= 3).collect();
    let mut used: BTreeSet<Edge> = BTreeSet::new();
    let mut out = Vec::new();
    let walk = |start: usize, first: usize, used: &mut BTreeSet<Edge>| {
        let mut verts = vec![start, first];
        used.insert(edge(start, first));
        let (mut prev, mut cur) = (start, first);
        while !meeting[cur] && cur != start {
            // Non-meeting cycle vertices have exactly two cycle edges.
            let next = if cadj[cur][0] != prev { cadj[cur][0] } else { cadj[cur][1] };
            if !used.insert(edge(cur, next)) {
                break;
            }
            verts.push(next);
            prev = cur;
            cur = next;
        }
        CycleInterval { vertices: verts }
    };
    for v in 0..g.n() {
        if !meeting[v] {
            continue;
        }
        for &w in &cadj[v] {
            if !used.contains(&edge(v, w)) {
                out.push(walk(v, w, &mut used));
            }
        }
    }
    for v in 0..g.n() {
        if let Some(&w) = cadj[v].first() {
            if !used.contains(&edge(v, w)) {
                out.push(walk(v, w, &mut used));
            }
        }
    }
    out
}

/// Finds `S' ⊆ S` with `|S'| >= |S|/2` whose removal keeps `g` connected.
///
/// `sub_vertices`/`sub_edges` describe the connected subgraph; `s` must be
/// cycle edges of `g` incident to it and outside its edge set.
pub fn find_removable_half(g: &Graph, sub_vertices: &[usize], sub_edges: &[Edge], s: &[Edge]) -> Result<Vec<Edge>> {
    if !is_connected(g) {
        return Err(invalid("graph is disconnected"));
    }
    let vset: BTreeSet<usize> = sub_vertices.iter().copied().collect();
    let eset: BTreeSet<Edge> = sub_edges.iter().map(|&(a, b)| edge(a, b)).collect();
    for &(a, b) in &eset {
        if !g.has_edge(a, b) || !vset.contains(&a) || !vset.contains(&b) {
            return Err(invalid(format!("subgraph edge ({a},{b}) invalid")));
        }
    }
    if let Some(&root) = vset.iter().next() {
        let sub = Graph::from_edges(g.n(), &eset.iter().copied().collect::<Vec<_>>())?;
        let d = bfs_dist(&sub, root, usize::MAX);
        if vset.iter().any(|&v| d[v] == usize::MAX) {
            return Err(invalid("subgraph is not connected"));
        }
    }
    let cyc: BTreeSet<Edge> = cycle_edges(g).into_iter().collect();
    let s: Vec<Edge> = s.iter().map(|&(a, b)| edge(a, b)).collect::<BTreeSet<_>>().into_iter().collect();
    for &(a, b) in &s {
        if !cyc.contains(&(a, b)) || eset.contains(&(a, b)) || !(vset.contains(&a) || vset.contains(&b)) {
            return Err(invalid(format!("edge ({a},{b}) is not an admissible member of S")));
        }
    }
    let need = s.len().div_ceil(2);
    let mut chosen: Vec<Edge> = Vec::new();
    for &e in &s {
        chosen.push(e);
        if !is_connected(&g.without_edges(&chosen)) {
            chosen.pop();
        }
    }
    if chosen.len() >= need {
        return Ok(chosen);
    }
    if s.len() > MAX_EXHAUSTIVE_S {
        return Err(invalid(format!("|S|={} exceeds the exhaustive cap {MAX_EXHAUSTIVE_S}", s.len())));
    }
    // Exhaustive fallback over subsets of size `need`, in lexicographic bitmask order.
    for mask in 0u32..(1u32 << s.len()) {
        if mask.count_ones() as usize != need {
            continue;
        }
        let pick: Vec<Edge> = (0..s.len()).filter(|i| mask >> i & 1 == 1).map(|i| s[i]).collect();
        if is_connected(&g.without_edges(&pick)) {
            return Ok(pick);
        }
    }
    Err(Error::Falsified(format!("no removable half among {} cycle edges", s.len())))
}
