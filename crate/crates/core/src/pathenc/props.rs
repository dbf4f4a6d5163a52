use std::collections::BTreeSet;

use super::{PathDataStructure, RowIndex};
use crate::graphcomb::{ClosedPath, WalkReplay};
use crate::majorizers::Majorizer;
use crate::sampler::SparseSymMatrix;

/// `prod_t mu_{P(t-1), P(t)}`.
pub fn path_weight(p: &ClosedPath, m: &SparseSymMatrix) -> f64 {
    p.steps().windows(2).map(|w| m.value(w[0], w[1])).product()
}

/// Product of squared majorizer coordinates over the up steps: the majorizer
/// assigned to `P(t-1)` is read at the simple local index of `P(t)`.
/// Majorizers here bound the absolute row entries, not their squares.
pub fn assigned_majorizer_weight(
    p: &ClosedPath,
    m: &SparseSymMatrix,
    assign: &dyn Fn(usize) -> Majorizer,
) -> f64 {
    let rows = RowIndex::new(m);
    let h = super::build_diagram(p);
    let s = p.steps();
    (1..=p.len())
        .filter(|&t| h.is_up(t))
        .map(|t| {
            let y = assign(s[t - 1]);
            let v = y.get(rows.simple_index(s[t - 1], s[t]) - 1);
            v * v
        })
        .product()
}

/// Right-hand side of the pointwise bound on `|Psi_M(P)|`:
/// `sqrt(h)` on `C`, `h` on up times of `(A u B) \ C`, and for the remaining
/// up times the squared-row majorizer of `P(t-1)` read at `W(t)`: `BC(f(t-1))`
/// when `t-1` is in `B`, else `Y`.
pub fn structure_weight_bound(ds: &PathDataStructure, y: &Majorizer, h: f64) -> f64 {
    let mut bound = 1.0f64;
    let b_up = ds.b_up();
    for t in 1..=ds.len() {
        if ds.c.contains(&t) {
            bound *= h.sqrt();
            continue;
        }
        if !ds.h.is_up(t) {
            continue;
        }
        if ds.a.contains(&t) || ds.b.contains(&t) {
            bound *= h;
            continue;
        }
        let idx = ds.weight(t);
        debug_assert!(idx >= 1, "simple local index expected outside A, B and C");
        let coord = (idx - 1) as usize;
        if ds.b.contains(&(t - 1)) {
            let prev = t - 1;
            let f = if ds.a.contains(&prev) || b_up.contains(&prev) || ds.c.contains(&prev) {
                prev
            } else {
                *ds.v_times.range(..=prev).next_back().expect("V meets every B-down time outside A and C")
            };
            let maj = ds.bc.get(&f).or_else(|| ds.bc_extra.get(&f)).expect("BC defined at f(t-1)");
            bound *= maj.get(coord);
        } else {
            bound *= y.get(coord);
        }
    }
    bound
}

/// Outcome of the exact structural checks on one encoded path.
#[derive(Debug, Clone, Default)]
pub struct StructureReport {
    pub violations: Vec<String>,
    /// `|A-down \ C| - |A-up \ C|`, logged only.
    pub up_minus_down_excess: i64,
    pub b_prime: usize,
    pub v_size: usize,
}

impl StructureReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks, with witnesses on failure:
/// equal-level excursions avoiding `A u C` return to the same vertex; the
/// level bound `|B'| <= 3|C-down| + |B-up| + 1`; the three properties of
/// `V`; up/down balance on non-cycle edges; and the total up count
/// `k + (|C-up| - |C-down|)/2`.
pub fn verify_structure_props(p: &ClosedPath, ds: &PathDataStructure) -> StructureReport {
    let mut rep = StructureReport::default();
    let s = p.steps();
    let len = p.len();
    let hv = ds.h.values();
    let in_ac = |t: usize| ds.a.contains(&t) || ds.c.contains(&t);

    for t in 0..len {
        let mut min_seen = hv[t];
        for t2 in t + 1..=len {
            if in_ac(t2) {
                break;
            }
            min_seen = min_seen.min(hv[t2]);
            if min_seen < hv[t] {
                break;
            }
            if hv[t2] == hv[t] && s[t] != s[t2] {
                rep.violations.push(format!("above-B-point: P({t}) = {} != P({t2}) = {}", s[t], s[t2]));
            }
        }
    }

    let b_up = ds.b_up();
    let c_down = ds.down_part(&ds.c);
    let b_prime = ds.b.iter().filter(|&&t| t < len && !ds.h.is_up(t + 1)).count();
    rep.b_prime = b_prime;
    if b_prime > 3 * c_down.len() + b_up.len() + 1 {
        rep.violations.push(format!(
            "nb-levels: |B'| = {b_prime} > 3*{} + {} + 1",
            c_down.len(),
            b_up.len()
        ));
    }

    let acb: BTreeSet<usize> = ds.a.iter().chain(ds.c.iter()).chain(b_up.iter()).copied().collect();
    rep.v_size = ds.v_times.len();
    if ds.v_times.len() > 5 * acb.len() + 1 {
        rep.violations.push(format!("properties-V (i): |V| = {} > 5*{} + 1", ds.v_times.len(), acb.len()));
    }
    for &t in ds.b_down().iter().filter(|&&t| !in_ac(t)) {
        match ds.v_times.range(..=t).next_back() {
            None => rep.violations.push(format!("properties-V (ii): no V time in [1, {t}]")),
            Some(&kappa) if s[kappa] != s[t] => rep
                .violations
                .push(format!("properties-V (iii): P({kappa}) = {} != P({t}) = {}", s[kappa], s[t])),
            Some(_) => {}
        }
    }

    let replay = WalkReplay::new(s);
    let mut balance = vec![0i64; replay.edges().len()];
    for t in 1..=len {
        balance[replay.step_edge(t)] += if ds.h.is_up(t) { 1 } else { -1 };
    }
    for (id, &b) in balance.iter().enumerate() {
        if !replay.is_cycle_edge(id) && b != 0 {
            rep.violations.push(format!("up-down-total: edge {:?} has up - down = {b}", replay.edges()[id]));
        }
    }

    let ups = (1..=len).filter(|&t| ds.h.is_up(t)).count() as i64;
    let c_up = ds.up_part(&ds.c).len() as i64;
    let diff = c_up - c_down.len() as i64;
    if 2 * ups != len as i64 + diff {
        rep.violations.push(format!("up count: {ups} != k + ({c_up} - {})/2", c_down.len()));
    }

    let a_up = ds.up_part(&ds.a).difference(&ds.c).count() as i64;
    let a_down = ds.down_part(&ds.a).difference(&ds.c).count() as i64;
    rep.up_minus_down_excess = a_down - a_up;
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::DiagMode;

    #[test]
    fn toy_majorizer_illustration() {
        let d = [0.0, 1.0, -0.8, 0.0, 1.0, 0.0, 0.6, 0.5, -0.8, 0.6, 0.0, 0.3, 0.0, 0.5, 0.3, 0.0];
        let m = SparseSymMatrix::from_dense(4, DiagMode::Zero, &d).unwrap();
        let p = ClosedPath::new(vec![0, 2, 1, 2, 0]).unwrap();
        assert!((path_weight(&p, &m).abs() - 0.2304).abs() < 1e-12);
        let a = Majorizer::new(vec![1.0, 1.0, 0.0, 0.0]).unwrap();
        let b = Majorizer::new(vec![1.0, 0.7, 0.5, 0.0]).unwrap();
        let assign = |v: usize| if v == 0 || v == 3 { a.clone() } else { b.clone() };
        let w = assigned_majorizer_weight(&p, &m, &assign);
        assert!((w - 0.49).abs() < 1e-12);
        assert!(path_weight(&p, &m).abs() <= w);
    }
}
