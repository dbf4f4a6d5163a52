use std::collections::BTreeMap;

use super::structure::bridge_flags;
use super::{edge, Edge, Graph};
use crate::error::{invalid, Result};

/// Closed walk `P(0), ..., P(2k)` with `P(0) = P(2k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClosedPath {
    steps: Vec<usize>,
}

impl ClosedPath {
    /// Requires an even positive length, a closed walk and no repeated
    /// consecutive vertex (the host graph has no loops).
    pub fn new(steps: Vec<usize>) -> Result<Self> {
        if steps.len() < 3 || steps.len() % 2 == 0 {
            return Err(invalid(format!("closed path needs 2k+1 >= 3 vertices, got {}", steps.len())));
        }
        if steps[0] != steps[steps.len() - 1] {
            return Err(invalid("path is not closed"));
        }
        if steps.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("path repeats a vertex in consecutive steps"));
        }
        Ok(ClosedPath { steps })
    }

    pub fn k(&self) -> usize {
        (self.steps.len() - 1) / 2
    }

    /// Number of steps, `2k`.
    pub fn len(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn steps(&self) -> &[usize] {
        &self.steps
    }

    pub fn at(&self, t: usize) -> usize {
        self.steps[t]
    }

    pub fn check_on(&self, g: &Graph) -> Result<()> {
        match self.steps.windows(2).position(|w| !g.has_edge(w[0], w[1])) {
            Some(t) => Err(invalid(format!("step {} ({} -> {}) is not an edge", t + 1, self.steps[t], self.steps[t + 1]))),
            None => Ok(()),
        }
    }
}

/// Special cycle vertices of a walk with the first prefix length at which
/// each vertex acquires the given type. Lists are sorted by vertex.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpecialVertexReport {
    pub meeting: Vec<(usize, usize)>,
    pub splitting: Vec<(usize, usize)>,
    pub completion: Vec<(usize, usize)>,
}

impl SpecialVertexReport {
    /// First `t` at which `v` is special of any type.
    pub fn discovery(&self, v: usize) -> Option<usize> {
        [&self.meeting, &self.splitting, &self.completion]
            .iter()
            .filter_map(|l| l.iter().find(|&&(u, _)| u == v).map(|&(_, t)| t))
            .min()
    }

    /// Vertices special in the prefix graph of length `t`.
    pub fn special_at(&self, t: usize) -> Vec<usize> {
        let mut out: Vec<usize> = [&self.meeting, &self.splitting, &self.completion]
            .iter()
            .flat_map(|l| l.iter().filter(|&&(_, d)| d <= t).map(|&(v, _)| v))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Prefix-by-prefix replay of a walk.
///
/// Edge ids follow the order of first traversal, so the prefix graph of
/// length `t` holds exactly the edges with id below `edges_at(t)`. Every
/// special type is monotone in the prefix (cycle edges never turn into
/// bridges when edges are added, uncovering directions are fixed), so first
/// times determine the state of every prefix.
#[derive(Debug, Clone)]
pub struct WalkReplay {
    steps: Vec<usize>,
    edges: Vec<Edge>,
    ids: BTreeMap<Edge, usize>,
    step_edge: Vec<usize>,
    first_time: Vec<usize>,
    uncov: Vec<(usize, usize)>,
    mult: Vec<usize>,
    edges_at: Vec<usize>,
    /// `cyc_at[t][id]` for `id < edges_at[t]`.
    cyc_at: Vec<Vec<bool>>,
    report: SpecialVertexReport,
}

impl WalkReplay {
    pub fn new(steps: &[usize]) -> Self {
        let len = steps.len().saturating_sub(1);
        let mut edges = Vec::new();
        let mut ids = BTreeMap::new();
        let mut step_edge = Vec::with_capacity(len);
        let mut first_time = Vec::new();
        let mut uncov = Vec::new();
        let mut mult = Vec::new();
        let mut edges_at = vec![0usize];
        let mut local: BTreeMap<usize, usize> = BTreeMap::new();
        local.insert(steps[0], 0);
        let mut local_edges: Vec<Edge> = Vec::new();
        let mut cyc_at: Vec<Vec<bool>> = vec![Vec::new()];
        let mut completion: BTreeMap<usize, usize> = BTreeMap::new();
        let mut meeting: BTreeMap<usize, usize> = BTreeMap::new();
        let mut splitting: BTreeMap<usize, usize> = BTreeMap::new();

        for t in 1..=len {
            let (a, b) = (steps[t - 1], steps[t]);
            let e = edge(a, b);
            let id = match ids.get(&e) {
                Some(&id) => {
                    mult[id] += 1;
                    id
                }
                None => {
                    let id = edges.len();
                    ids.insert(e, id);
                    edges.push(e);
                    first_time.push(t);
                    uncov.push((a, b));
                    mult.push(1);
                    let known = local.contains_key(&b);
                    if known {
                        // A new edge between visited vertices adds a cycle.
                        completion.entry(b).or_insert(t);
                    }
                    let nl = local.len();
                    let lb = *local.entry(b).or_insert(nl);
                    local_edges.push((local[&a], lb));
                    id
                }
            };
            step_edge.push(id);
            edges_at.push(edges.len());
            let flags = bridge_flags(local.len(), &local_edges);
            let cyc: Vec<bool> = flags.iter().map(|&br| !br).collect();
            let mut inc: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
            for (i, &c) in cyc.iter().enumerate() {
                if !c {
                    continue;
                }
                let (x, y) = edges[i];
                let (from, _) = uncov[i];
                for v in [x, y] {
                    let ent = inc.entry(v).or_insert((0, 0));
                    ent.0 += 1;
                    if from == v {
                        ent.1 += 1;
                    }
                }
            }
            for (&v, &(deg, out)) in &inc {
                if deg >= 3 {
                    meeting.entry(v).or_insert(t);
                }
                if out >= 2 {
                    splitting.entry(v).or_insert(t);
                }
            }
            cyc_at.push(cyc);
        }
        let report = SpecialVertexReport {
            meeting: meeting.into_iter().collect(),
            splitting: splitting.into_iter().collect(),
            completion: completion.into_iter().collect(),
        };
        WalkReplay { steps: steps.to_vec(), edges, ids, step_edge, first_time, uncov, mult, edges_at, cyc_at, report }
    }

    pub fn len(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn steps(&self) -> &[usize] {
        &self.steps
    }

    /// Distinct edges in order of first traversal.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_id(&self, e: Edge) -> Option<usize> {
        self.ids.get(&edge(e.0, e.1)).copied()
    }

    /// Id of the edge traversed at step `t` (1-based).
    pub fn step_edge(&self, t: usize) -> usize {
        self.step_edge[t - 1]
    }

    /// Step at which edge `id` is first traversed.
    pub fn first_time(&self, id: usize) -> usize {
        self.first_time[id]
    }

    /// Direction `(from, to)` of the first traversal.
    pub fn uncov(&self, id: usize) -> (usize, usize) {
        self.uncov[id]
    }

    pub fn multiplicity(&self, id: usize) -> usize {
        self.mult[id]
    }

    pub fn edges_at(&self, t: usize) -> usize {
        self.edges_at[t]
    }

    /// Whether edge `id` lies on a cycle of the prefix graph of length `t`.
    pub fn is_cycle_edge_at(&self, id: usize, t: usize) -> bool {
        id < self.edges_at[t] && self.cyc_at[t][id]
    }

    /// Cycle edge of the whole walk's graph.
    pub fn is_cycle_edge(&self, id: usize) -> bool {
        self.is_cycle_edge_at(id, self.len())
    }

    /// Cyclomatic number of the prefix graph of length `t`.
    pub fn cycle_count_at(&self, t: usize) -> usize {
        let mut verts: Vec<usize> = self.steps[..=t].to_vec();
        verts.sort_unstable();
        verts.dedup();
        self.edges_at[t] + 1 - verts.len()
    }

    pub fn report(&self) -> &SpecialVertexReport {
        &self.report
    }

    /// Steps on cycle edges of multiplicity one or at least three.
    pub fn c_times(&self) -> Vec<usize> {
        (1..=self.len())
            .filter(|&t| {
                let id = self.step_edge(t);
                self.is_cycle_edge(id) && self.mult[id] != 2
            })
            .collect()
    }

    /// Discovery time of every cycle edge of the walk graph: the first step in
    /// the set of `c_times` traversing it, or the first prefix containing it
    /// on a cycle, whichever is earlier. `None` for non-cycle edges.
    pub fn edge_discovery(&self) -> Vec<Option<usize>> {
        let mut disc: Vec<Option<usize>> = vec![None; self.edges.len()];
        for t in self.c_times() {
            let id = self.step_edge(t);
            disc[id] = Some(disc[id].map_or(t, |d| d.min(t)));
        }
        for (id, d) in disc.iter_mut().enumerate() {
            if !self.is_cycle_edge(id) {
                continue;
            }
            if let Some(t) = (1..=self.len()).find(|&t| self.is_cycle_edge_at(id, t)) {
                *d = Some(d.map_or(t, |x| x.min(t)));
            }
        }
        disc
    }
}

/// Special cycle vertices of an arbitrary walk (closed or not).
pub fn classify_walk(steps: &[usize]) -> SpecialVertexReport {
    WalkReplay::new(steps).report
}

pub fn classify_special_vertices(p: &ClosedPath) -> SpecialVertexReport {
    classify_walk(p.steps())
}
