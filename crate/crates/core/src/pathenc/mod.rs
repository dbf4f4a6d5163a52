//! Injective encoding of closed paths into data structures
//! `<v, H, A, B, C, W, BC>`, the structural properties of those structures
//! and the pointwise weight bound.

mod corpus;
mod props;

pub use corpus::{check_injectivity, enumerate_closed_paths, InjectivityReport};
pub use props::{
    assigned_majorizer_weight, path_weight, structure_weight_bound, verify_structure_props, StructureReport,
};

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{invalid, Error, Result};
use crate::graphcomb::{edge, ClosedPath, WalkReplay};
use crate::majorizers::{classify, is_heavy, rearranged, Majorizer, MajorizerNet};
use crate::sampler::SparseSymMatrix;

/// `H(0..2k)` with `H(0) = 0` and unit steps.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagram {
    values: Vec<i64>,
}

impl Diagram {
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// Up arrow from `t-1` to `t`, `t >= 1`.
    pub fn is_up(&self, t: usize) -> bool {
        self.values[t] > self.values[t - 1]
    }

    pub fn len(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Diagram of a closed path: new edges go up; a re-traversed non-cycle edge
/// goes up iff it follows its uncovering direction; a re-traversed cycle edge
/// goes down.
pub fn build_diagram(p: &ClosedPath) -> Diagram {
    diagram_from_replay(&WalkReplay::new(p.steps()))
}

fn diagram_from_replay(r: &WalkReplay) -> Diagram {
    let steps = r.steps();
    let mut values = vec![0i64];
    for t in 1..=r.len() {
        let id = r.step_edge(t);
        let up = if r.first_time(id) == t {
            true
        } else if r.is_cycle_edge(id) {
            false
        } else {
            r.uncov(id) == (steps[t - 1], steps[t])
        };
        values.push(values[t - 1] + if up { 1 } else { -1 });
    }
    Diagram { values }
}

/// Everything except `BC`: the part whose injectivity is asserted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReducedStructure {
    pub v: usize,
    pub h: Vec<i64>,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub c: Vec<usize>,
    pub w: Vec<i64>,
}

#[derive(Debug, Clone)]
pub struct PathDataStructure {
    pub v: usize,
    pub h: Diagram,
    pub a: BTreeSet<usize>,
    pub b: BTreeSet<usize>,
    pub c: BTreeSet<usize>,
    /// `w[t-1] = W(t)`.
    pub w: Vec<i64>,
    /// Classified majorizers on `B-up` and `V`.
    pub bc: BTreeMap<usize, Majorizer>,
    /// Classified majorizers on `B-down` times inside `A` or `C`. The weight
    /// bound can reference these through `f(t-1) = t-1`, outside the domain
    /// of `bc`.
    pub bc_extra: BTreeMap<usize, Majorizer>,
    /// The auxiliary set `V`.
    pub v_times: BTreeSet<usize>,
}

impl PathDataStructure {
    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn weight(&self, t: usize) -> i64 {
        self.w[t - 1]
    }

    /// Time 0 counts as an up time for `B`.
    pub fn is_up_time(&self, t: usize) -> bool {
        t == 0 || self.h.is_up(t)
    }

    pub fn b_up(&self) -> BTreeSet<usize> {
        self.b.iter().copied().filter(|&t| self.is_up_time(t)).collect()
    }

    pub fn b_down(&self) -> BTreeSet<usize> {
        self.b.iter().copied().filter(|&t| !self.is_up_time(t)).collect()
    }

    pub fn up_part(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        set.iter().copied().filter(|&t| self.is_up_time(t)).collect()
    }

    pub fn down_part(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        set.iter().copied().filter(|&t| !self.is_up_time(t)).collect()
    }

    pub fn reduced(&self) -> ReducedStructure {
        ReducedStructure {
            v: self.v,
            h: self.h.values.clone(),
            a: self.a.iter().copied().collect(),
            b: self.b.iter().copied().collect(),
            c: self.c.iter().copied().collect(),
            w: self.w.clone(),
        }
    }

    /// `v|H|A|B|C|W` with comma-separated fields.
    pub fn dump_line(&self) -> String {
        fn csv<T: ToString>(it: impl IntoIterator<Item = T>) -> String {
            it.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        }
        format!(
            "{}|{}|{}|{}|{}|{}",
            self.v,
            csv(self.h.values.iter()),
            csv(self.a.iter()),
            csv(self.b.iter()),
            csv(self.c.iter()),
            csv(self.w.iter())
        )
    }
}

/// Row access restricted to the off-diagonal support, with `|mu|`-ranks.
pub(crate) struct RowIndex<'a> {
    m: &'a SparseSymMatrix,
}

impl<'a> RowIndex<'a> {
    pub(crate) fn new(m: &'a SparseSymMatrix) -> Self {
        RowIndex { m }
    }

    pub(crate) fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + 'a {
        let (cols, vals) = self.m.row(u);
        cols.iter().zip(vals.iter()).filter(move |(&j, &v)| j != u && v != 0.0).map(|(&j, &v)| (j, v))
    }

    pub(crate) fn row_sq(&self, u: usize) -> Vec<f64> {
        self.neighbors(u).map(|(_, v)| v * v).collect()
    }

    /// `|{y in set : |mu_uy| >= |mu_uv|}|`.
    pub(crate) fn rank_in(&self, u: usize, v: usize, set: impl Iterator<Item = usize>) -> usize {
        let target = self.m.value(u, v).abs();
        set.filter(|&y| self.m.value(u, y).abs() >= target).count()
    }

    pub(crate) fn simple_index(&self, u: usize, v: usize) -> usize {
        let target = self.m.value(u, v).abs();
        self.neighbors(u).filter(|(_, x)| x.abs() >= target).count()
    }

    pub(crate) fn check_distinct(&self, u: usize) -> Result<()> {
        let mut mags: Vec<f64> = self.neighbors(u).map(|(_, v)| v.abs()).collect();
        mags.sort_unstable_by(f64::total_cmp);
        if mags.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::TiedEntries { row: u });
        }
        Ok(())
    }
}

/// Encodes `p` against matrix `m`, standard majorizer `y` and classifier net.
pub fn encode(p: &ClosedPath, m: &SparseSymMatrix, y: &Majorizer, net: &MajorizerNet) -> Result<PathDataStructure> {
    let steps = p.steps();
    let len = p.len();
    let rows = RowIndex::new(m);
    if steps.iter().any(|&v| v >= m.n()) {
        return Err(invalid("path leaves the matrix index range"));
    }
    for t in 1..=len {
        let (a, b) = (steps[t - 1], steps[t]);
        if m.value(a, b) == 0.0 {
            return Err(invalid(format!("step {t} ({a} -> {b}) is not an edge of G_M")));
        }
    }
    let mut visited: Vec<usize> = steps.to_vec();
    visited.sort_unstable();
    visited.dedup();
    for &u in &visited {
        if m.value(u, u) != 0.0 {
            return Err(invalid(format!("diagonal entry at {u} must be zero")));
        }
        rows.check_distinct(u)?;
    }

    let replay = WalkReplay::new(steps);
    let h = diagram_from_replay(&replay);
    let report = replay.report();
    let disc_edge = replay.edge_discovery();
    let disc_vertex = |v: usize| report.discovery(v);
    let special_before = |v: usize, t: usize| disc_vertex(v).is_some_and(|d| d < t);
    let c: BTreeSet<usize> = replay.c_times().into_iter().collect();

    let mut a = BTreeSet::new();
    for t in 1..=len {
        let up = h.is_up(t);
        if (!up && special_before(steps[t - 1], t)) || (up && special_before(steps[t], t)) {
            a.insert(t);
        }
    }

    let mut heavy_cache: HashMap<usize, bool> = HashMap::new();
    let mut heavy = |v: usize| *heavy_cache.entry(v).or_insert_with(|| is_heavy(&rows.row_sq(v), y));
    let b: BTreeSet<usize> = (0..=len).filter(|&t| heavy(steps[t])).collect();

    // Neighbors of each path vertex in G_P.
    let mut gp_adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(x, z) in replay.edges() {
        gp_adj.entry(x).or_default().push(z);
        gp_adj.entry(z).or_default().push(x);
    }
    let cycle_edge_before = |e_id: usize, t: usize| disc_edge[e_id].is_some_and(|d| d < t);

    let mut w = Vec::with_capacity(len);
    for t in 1..=len {
        let (prev, cur) = (steps[t - 1], steps[t]);
        let id = replay.step_edge(t);
        let up = h.is_up(t);
        let case_a = ((a.contains(&t) || c.contains(&t)) && cycle_edge_before(id, t)) || special_before(cur, t);
        let value = if case_a {
            // Cycle local index over N_C(P, t); indices start at 1 so the
            // value is never confused with case (B).
            let nc: Vec<usize> = gp_adj[&prev]
                .iter()
                .copied()
                .filter(|&x| {
                    let eid = replay.edge_id(edge(prev, x)).expect("edge of G_P");
                    cycle_edge_before(eid, t) || special_before(x, t)
                })
                .collect();
            debug_assert!(nc.contains(&cur));
            -(rows.rank_in(prev, cur, nc.into_iter()) as i64)
        } else if a.contains(&t) {
            0
        } else if b.contains(&t) && up {
            let hv: Vec<usize> = rows.neighbors(prev).map(|(j, _)| j).filter(|&j| heavy(j)).collect();
            rows.rank_in(prev, cur, hv.into_iter()) as i64
        } else if up {
            rows.simple_index(prev, cur) as i64
        } else {
            1
        };
        w.push(value);
    }

    let is_up_time = |t: usize| t == 0 || h.is_up(t);
    let mut v_times = BTreeSet::new();
    for &t in b.iter().filter(|&&t| !is_up_time(t) && !a.contains(&t) && !c.contains(&t)) {
        let s = *b.range(..t).next_back().expect("a vertex reached by a down arrow was visited before");
        let hit = (s..=t).any(|x| a.contains(&x) || c.contains(&x) || (b.contains(&x) && is_up_time(x)));
        if h.values()[s] != h.values()[t] || hit {
            v_times.insert(t);
        }
    }

    let classify_at = |t: usize| -> Result<Majorizer> { classify(&rearranged(&rows.row_sq(steps[t])), net) };
    let mut bc = BTreeMap::new();
    let mut bc_extra = BTreeMap::new();
    for &t in &b {
        if is_up_time(t) || v_times.contains(&t) {
            bc.insert(t, classify_at(t)?);
        } else if a.contains(&t) || c.contains(&t) {
            bc_extra.insert(t, classify_at(t)?);
        }
    }

    Ok(PathDataStructure { v: steps[0], h, a, b, c, w, bc, bc_extra, v_times })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorizers::build_net;
    use crate::sampler::DiagMode;

    fn path(v: &[usize]) -> ClosedPath {
        ClosedPath::new(v.to_vec()).unwrap()
    }

    /// Distinct magnitudes on K4 and a 4-cycle with a pendant.
    fn k4() -> SparseSymMatrix {
        let t = vec![(0, 1, 0.9), (0, 2, -0.8), (0, 3, 0.7), (1, 2, 0.6), (1, 3, -0.5), (2, 3, 0.4)];
        SparseSymMatrix::from_upper_triplets(4, DiagMode::Zero, t).unwrap()
    }

    fn light() -> (Majorizer, MajorizerNet) {
        (Majorizer::new(vec![2.0; 8]).unwrap(), build_net(2.0, 16.0, 8, 0.5).unwrap())
    }

    #[test]
    fn diagram_examples() {
        assert_eq!(build_diagram(&path(&[0, 1, 0])).values(), &[0, 1, 0]);
        assert_eq!(build_diagram(&path(&[1, 2, 3, 4, 1])).values(), &[0, 1, 2, 3, 4]);
        assert_eq!(build_diagram(&path(&[1, 2, 3, 4, 1, 2, 3, 4, 1])).values(), &[0, 1, 2, 3, 4, 3, 2, 1, 0]);
    }

    #[test]
    fn tree_walk_uses_simple_indices() {
        let m = k4();
        let (y, net) = light();
        let ds = encode(&path(&[0, 1, 0, 2, 0]), &m, &y, &net).unwrap();
        assert!(ds.a.is_empty() && ds.b.is_empty() && ds.c.is_empty());
        // Row 0 ranks: 1 -> 1, 2 -> 2, 3 -> 3.
        assert_eq!(ds.w, vec![1, 1, 2, 1]);
        assert_eq!(ds.dump_line(), "0|0,1,0,1,0||||1,1,2,1");
    }

    #[test]
    fn square_walked_and_reversed() {
        let m = k4();
        let (y, net) = light();
        let ds = encode(&path(&[0, 1, 2, 3, 0, 3, 2, 1, 0]), &m, &y, &net).unwrap();
        assert!(ds.c.is_empty());
        let ds = encode(&path(&[0, 1, 2, 3, 0, 1, 2, 3, 0]), &m, &y, &net).unwrap();
        assert!(ds.c.is_empty());
        assert!(ds.a.contains(&5));
        assert_eq!(ds.h.values(), &[0, 1, 2, 3, 4, 3, 2, 1, 0]);
        assert!(ds.w.iter().any(|&x| x < 0));
    }

    #[test]
    fn rejects_ties_and_non_edges() {
        let t = vec![(0, 1, 0.5), (0, 2, -0.5), (1, 2, 0.3)];
        let m = SparseSymMatrix::from_upper_triplets(3, DiagMode::Zero, t).unwrap();
        let (y, net) = light();
        assert!(matches!(encode(&path(&[0, 1, 0]), &m, &y, &net), Err(Error::TiedEntries { row: 0 })));
        let t = vec![(0, 1, 0.5), (1, 2, 0.3)];
        let m = SparseSymMatrix::from_upper_triplets(3, DiagMode::Zero, t).unwrap();
        assert!(encode(&path(&[0, 2, 0]), &m, &y, &net).is_err());
    }
}
