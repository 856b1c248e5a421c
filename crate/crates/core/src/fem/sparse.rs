//! Compressed-row symmetric matrices (both triangles stored).

use std::sync::Arc;

/// Row-compressed sparsity layout with sorted column indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsityPattern {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
}

impl SparsityPattern {
    /// Builds a pattern from per-row column lists (deduplicated here).
    pub fn from_rows(mut rows: Vec<Vec<usize>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        row_ptr.push(0);
        for r in rows.iter_mut() {
            r.sort_unstable();
            r.dedup();
            cols.extend_from_slice(r);
            row_ptr.push(cols.len());
        }
        SparsityPattern { n, row_ptr, cols }
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    #[inline]
    pub fn find(&self, i: usize, j: usize) -> Option<usize> {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.cols[lo..hi].binary_search(&j).ok().map(|k| lo + k)
    }
}

#[derive(Debug, Clone)]
pub struct SparseSym {
    pub pattern: Arc<SparsityPattern>,
    pub vals: Vec<f64>,
}

impl SparseSym {
    pub fn zeros(pattern: Arc<SparsityPattern>) -> Self {
        let vals = vec![0.0; pattern.nnz()];
        SparseSym { pattern, vals }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| vec![i]).collect();
        let mut m = SparseSym::zeros(Arc::new(SparsityPattern::from_rows(rows)));
        m.vals.iter_mut().for_each(|v| *v = 1.0);
        m
    }

    /// Dense row-major input; zero entries are dropped.
    pub fn from_dense(a: &[Vec<f64>]) -> Self {
        let n = a.len();
        let rows = (0..n)
            .map(|i| (0..n).filter(|&j| a[i][j] != 0.0 || i == j).collect())
            .collect();
        let mut m = SparseSym::zeros(Arc::new(SparsityPattern::from_rows(rows)));
        for i in 0..n {
            for j in 0..n {
                if let Some(k) = m.pattern.find(i, j) {
                    m.vals[k] = a[i][j];
                }
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.pattern.n
    }

    pub fn nnz(&self) -> usize {
        self.pattern.nnz()
    }

    /// Adds `v` to entry `(i, j)`; the entry must be in the pattern.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .pattern
            .find(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside sparsity pattern"));
        self.vals[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.pattern.find(i, j).map_or(0.0, |k| self.vals[k])
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.pattern.row_ptr[i]..self.pattern.row_ptr[i + 1];
        self.pattern.cols[r.clone()]
            .iter()
            .copied()
            .zip(self.vals[r].iter().copied())
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n()];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        let p = &self.pattern;
        for i in 0..p.n {
            let mut s = 0.0;
            for k in p.row_ptr[i]..p.row_ptr[i + 1] {
                s += self.vals[k] * x[p.cols[k]];
            }
            y[i] = s;
        }
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.get(i, i)).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.row(i).map(|(_, v)| v).sum()).collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        let mut a = vec![vec![0.0; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] += v;
            }
        }
        a
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |a_ij - a_ji| / max |a_ij|` (zero for the zero matrix).
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n() {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        let m = self.max_abs();
        if m == 0.0 {
            0.0
        } else {
            worst / m
        }
    }

    pub fn scale(&mut self, s: f64) {
        self.vals.iter_mut().for_each(|v| *v *= s);
    }

    /// `self + alpha * other`, merging patterns when they differ.
    pub fn plus(&self, alpha: f64, other: &SparseSym) -> SparseSym {
        assert_eq!(self.n(), other.n(), "dimension mismatch");
        if Arc::ptr_eq(&self.pattern, &other.pattern) || self.pattern == other.pattern {
            let vals = self
                .vals
                .iter()
                .zip(&other.vals)
                .map(|(a, b)| a + alpha * b)
                .collect();
            return SparseSym {
                pattern: self.pattern.clone(),
                vals,
            };
        }
        let rows = (0..self.n())
            .map(|i| {
                self.row(i)
                    .map(|(j, _)| j)
                    .chain(other.row(i).map(|(j, _)| j))
                    .collect()
            })
            .collect();
        let mut out = SparseSym::zeros(Arc::new(SparsityPattern::from_rows(rows)));
        for i in 0..self.n() {
            for (j, v) in self.row(i) {
                out.add(i, j, v);
            }
            for (j, v) in other.row(i) {
                out.add(i, j, alpha * v);
            }
        }
        out
    }

    /// Principal submatrix on the listed indices; `map[i]` gives the new
    /// index of row `i` or `None` to drop it.
    pub fn submatrix(&self, map: &[Option<usize>], n_new: usize) -> SparseSym {
        let mut rows = vec![Vec::new(); n_new];
        for i in 0..self.n() {
            if let Some(ni) = map[i] {
                rows[ni] = self.row(i).filter_map(|(j, _)| map[j]).collect();
            }
        }
        let mut out = SparseSym::zeros(Arc::new(SparsityPattern::from_rows(rows)));
        for i in 0..self.n() {
            if let Some(ni) = map[i] {
                for (j, v) in self.row(i) {
                    if let Some(nj) = map[j] {
                        out.add(ni, nj, v);
                    }
                }
            }
        }
        out
    }
}
