//! Symmetric sparse matrices in compressed-row layout.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};

/// How the diagonal of a sampled matrix is populated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagMode {
    /// Diagonal forced to zero.
    Zero,
    /// Diagonal entries drawn i.i.d. with the off-diagonal ones.
    Iid,
}

impl DiagMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagMode::Zero => "zero",
            DiagMode::Iid => "iid",
        }
    }
}

impl FromStr for DiagMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(DiagMode::Zero),
            "iid" => Ok(DiagMode::Iid),
            other => Err(invalid(format!("unknown diag mode `{other}`"))),
        }
    }
}

/// Symmetric `n x n` matrix stored as CSR with both triangles present.
///
/// Column indices are strictly increasing within each row and stored values
/// are nonzero. Symmetry holds bit-exactly because every off-diagonal value
/// is written once from the upper triangle and mirrored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    n: usize,
    diag_mode: DiagMode,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseSymMatrix {
    /// Builds a matrix from upper-triangle entries `(i, j, value)` with `i <= j`.
    ///
    /// Zero values are dropped. Duplicate coordinates, lower-triangle input and
    /// diagonal entries under [`DiagMode::Zero`] are rejected.
    pub fn from_upper_triplets<I>(n: usize, diag_mode: DiagMode, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n == 0 {
            return Err(invalid("matrix dimension must be positive"));
        }
        let mut upper: Vec<(usize, usize, f64)> = Vec::new();
        for (i, j, v) in triplets {
            if i > j {
                return Err(invalid(format!("entry ({i},{j}) is below the diagonal")));
            }
            if j >= n {
                return Err(invalid(format!("entry ({i},{j}) out of range for n={n}")));
            }
            if !v.is_finite() {
                return Err(invalid(format!("entry ({i},{j}) is not finite")));
            }
            if i == j && diag_mode == DiagMode::Zero && v != 0.0 {
                return Err(invalid(format!("nonzero diagonal entry at {i} with zero diagonal")));
            }
            if v != 0.0 {
                upper.push((i, j, v));
            }
        }
        upper.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        if let Some(w) = upper.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(invalid(format!("duplicate entry ({},{})", w[0].0, w[0].1)));
        }
        Ok(Self::from_sorted_upper(n, diag_mode, &upper))
    }

    /// Builds from sorted, duplicate-free, nonzero upper-triangle entries.
    pub(crate) fn from_sorted_upper(n: usize, diag_mode: DiagMode, upper: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; n];
        for &(i, j, _) in upper {
            counts[i] += 1;
            if i != j {
                counts[j] += 1;
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        for c in &counts {
            row_ptr.push(row_ptr.last().unwrap() + c);
        }
        let nnz = *row_ptr.last().unwrap();
        let mut cols = vec![0usize; nnz];
        let mut vals = vec![0.0f64; nnz];
        let mut fill = row_ptr[..n].to_vec();
        // Lower-triangle entries of row j come from rows i < j, which are
        // visited in increasing i, so each row is filled in column order.
        for &(i, j, v) in upper {
            if i != j {
                let p = fill[j];
                cols[p] = i;
                vals[p] = v;
                fill[j] += 1;
            }
            let p = fill[i];
            cols[p] = j;
            vals[p] = v;
            fill[i] += 1;
        }
        SparseSymMatrix { n, diag_mode, row_ptr, cols, vals }
    }

    /// Dense row-major input; the upper triangle is used and symmetry is checked.
    pub fn from_dense(n: usize, diag_mode: DiagMode, dense: &[f64]) -> Result<Self> {
        if dense.len() != n * n {
            return Err(invalid("dense input has wrong length"));
        }
        for i in 0..n {
            for j in 0..i {
                if dense[i * n + j] != dense[j * n + i] {
                    return Err(invalid(format!("dense input not symmetric at ({i},{j})")));
                }
            }
        }
        let triplets = (0..n).flat_map(|i| (i..n).map(move |j| (i, j, dense[i * n + j])));
        Self::from_upper_triplets(n, diag_mode, triplets)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diag_mode(&self) -> DiagMode {
        self.diag_mode
    }

    /// Number of stored entries (both triangles).
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.cols[a..b], &self.vals[a..b])
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }

    /// Iterates the stored upper-triangle entries `(i, j, value)`, `i <= j`, in row order.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).filter(move |(&j, _)| j >= i).map(move |(&j, &v)| (i, j, v))
        })
    }

    /// `y = M x`. Rows are independent, so the result does not depend on the
    /// thread count.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        y.par_iter_mut().enumerate().with_min_len(1024).for_each(|(i, yi)| {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                acc += v * x[j];
            }
            *yi = acc;
        });
    }

    /// The same matrix with its diagonal removed.
    pub fn without_diagonal(&self) -> SparseSymMatrix {
        let upper: Vec<_> = self.upper_entries().filter(|&(i, j, _)| i != j).collect();
        Self::from_sorted_upper(self.n, DiagMode::Zero, &upper)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                d[i * n + j] = v;
            }
        }
        d
    }

    /// Line-oriented text form: `n <n> diag <mode>` followed by one
    /// `i j value` line per upper-triangle nonzero, values with 17
    /// significant digits.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "n {} diag {}", self.n, self.diag_mode.as_str()).unwrap();
        for (i, j, v) in self.upper_entries() {
            writeln!(s, "{i} {j} {v:.16e}").unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 4 || parts[0] != "n" || parts[2] != "diag" {
            return Err(Error::Parse { line: 1, msg: format!("bad header `{header}`") });
        }
        let n: usize = parts[1].parse().map_err(|_| Error::Parse { line: 1, msg: "bad n".into() })?;
        let diag_mode: DiagMode = parts[3].parse().map_err(|_| Error::Parse { line: 1, msg: "bad diag".into() })?;
        let mut triplets = Vec::new();
        for (ln, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            let err = || Error::Parse { line: ln + 1, msg: format!("bad entry `{line}`") };
            if f.len() != 3 {
                return Err(err());
            }
            let i: usize = f[0].parse().map_err(|_| err())?;
            let j: usize = f[1].parse().map_err(|_| err())?;
            let v: f64 = f[2].parse().map_err(|_| err())?;
            triplets.push((i, j, v));
        }
        Self::from_upper_triplets(n, diag_mode, triplets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mirrored_and_sorted() {
        let m = SparseSymMatrix::from_upper_triplets(3, DiagMode::Zero, vec![(1, 2, 0.5), (0, 2, -1.0)]).unwrap();
        assert_eq!(m.row(2).0, &[0, 1]);
        assert_eq!(m.value(2, 0), -1.0);
        assert_eq!(m.value(0, 2), -1.0);
        assert_eq!(m.nnz(), 4);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SparseSymMatrix::from_upper_triplets(3, DiagMode::Zero, vec![(1, 1, 1.0)]).is_err());
        assert!(SparseSymMatrix::from_upper_triplets(3, DiagMode::Iid, vec![(2, 1, 1.0)]).is_err());
        assert!(SparseSymMatrix::from_upper_triplets(3, DiagMode::Iid, vec![(0, 1, 1.0), (0, 1, 2.0)]).is_err());
        assert!(SparseSymMatrix::from_upper_triplets(2, DiagMode::Iid, vec![(0, 2, 1.0)]).is_err());
    }

    #[test]
    fn text_round_trip_is_exact() {
        let m = SparseSymMatrix::from_upper_triplets(
            4,
            DiagMode::Iid,
            vec![(0, 0, 0.1), (0, 3, 1.0 / 3.0), (1, 2, -2.0f64.sqrt())],
        )
        .unwrap();
        let text = m.to_text();
        assert!(text.starts_with("n 4 diag iid\n"));
        assert!(text.contains("0 3 3.3333333333333331e-1"));
        assert_eq!(SparseSymMatrix::from_text(&text).unwrap(), m);
    }

    #[test]
    fn matvec_matches_dense() {
        let d = [0.0, 1.0, -0.8, 0.0, 1.0, 0.0, 0.6, 0.5, -0.8, 0.6, 0.0, 0.3, 0.0, 0.5, 0.3, 0.0];
        let m = SparseSymMatrix::from_dense(4, DiagMode::Zero, &d).unwrap();
        let x = [1.0, 2.0, 3.0, 4.0];
        let mut y = [0.0; 4];
        m.matvec(&x, &mut y);
        for i in 0..4 {
            let e: f64 = (0..4).map(|j| d[i * 4 + j] * x[j]).sum();
            assert!((y[i] - e).abs() < 1e-15);
        }
    }
}
