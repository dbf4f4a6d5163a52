use std::collections::HashMap;

use rayon::prelude::*;

use super::{encode, ReducedStructure};
use crate::error::{invalid, Result};
use crate::graphcomb::{ClosedPath, Graph};
use crate::majorizers::{Majorizer, MajorizerNet};
use crate::sampler::SparseSymMatrix;

/// All closed walks of length `2k` on `g`, every start vertex, in
/// lexicographic order.
pub fn enumerate_closed_paths(g: &Graph, k: usize) -> Vec<ClosedPath> {
    let mut out = Vec::new();
    let mut buf = Vec::with_capacity(2 * k + 1);
    for v in 0..g.n() {
        buf.clear();
        buf.push(v);
        extend(g, 2 * k, &mut buf, &mut out);
    }
    out
}

fn extend(g: &Graph, len: usize, buf: &mut Vec<usize>, out: &mut Vec<ClosedPath>) {
    let cur = *buf.last().unwrap();
    if buf.len() == len + 1 {
        if cur == buf[0] {
            out.push(ClosedPath::new(buf.clone()).expect("walk on a simple graph"));
        }
        return;
    }
    for &next in g.neighbors(cur) {
        buf.push(next);
        extend(g, len, buf, out);
        buf.pop();
    }
}

#[derive(Debug, Clone, Default)]
pub struct InjectivityReport {
    pub paths: usize,
    pub distinct: usize,
    pub collisions: Vec<(ClosedPath, ClosedPath)>,
}

impl InjectivityReport {
    pub fn ok(&self) -> bool {
        self.collisions.is_empty()
    }
}

/// Encodes every path and reports pairs sharing a reduced structure.
pub fn check_injectivity(
    paths: &[ClosedPath],
    m: &SparseSymMatrix,
    y: &Majorizer,
    net: &MajorizerNet,
) -> Result<InjectivityReport> {
    if let Some(first) = paths.first() {
        if paths.iter().any(|p| p.len() != first.len()) {
            return Err(invalid("injectivity corpus mixes path lengths"));
        }
    }
    let encoded: Vec<ReducedStructure> =
        paths.par_iter().map(|p| encode(p, m, y, net).map(|ds| ds.reduced())).collect::<Result<_>>()?;
    let mut seen: HashMap<&ReducedStructure, usize> = HashMap::with_capacity(paths.len());
    let mut collisions = Vec::new();
    for (i, r) in encoded.iter().enumerate() {
        if let Some(&j) = seen.get(r) {
            if paths[i] != paths[j] {
                collisions.push((paths[j].clone(), paths[i].clone()));
            }
        } else {
            seen.insert(r, i);
        }
    }
    Ok(InjectivityReport { paths: paths.len(), distinct: seen.len(), collisions })
}
