//! CSR sparse matrices.
//!
//! Invariants enforced at construction: non-decreasing row pointers, strictly
//! increasing column indices within each row, no stored zeros, finite values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::dense::DenseMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Build from (row, col, value) triplets. Entries are sorted internally;
    /// duplicate coordinates are rejected and zero values dropped.
    pub fn from_entries(
        rows: usize,
        cols: usize,
        mut entries: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        entries.retain(|&(_, _, v)| v != 0.0);
        for &(r, c, v) in &entries {
            if r >= rows || c >= cols {
                return Err(Error::invalid(format!(
                    "SparseMatrix entry ({r},{c}) outside {rows}x{cols}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("SparseMatrix entry ({r},{c})")));
            }
        }
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::invalid(format!(
                    "duplicate SparseMatrix entry at ({},{})",
                    w[0].0, w[0].1
                )));
            }
        }
        let mut indptr = vec![0usize; rows + 1];
        let mut indices = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            indptr[r + 1] += 1;
            indices.push(c);
            values.push(v);
        }
        for r in 0..rows {
            indptr[r + 1] += indptr[r];
        }
        Ok(SparseMatrix {
            rows,
            cols,
            indptr,
            indices,
            values,
        })
    }

    pub fn empty(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            indptr: vec![0; rows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            cols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`, in ascending column order.
    pub fn row_entries(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[lo..hi], &self.values[lo..hi])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row_entries(i);
        match cols.binary_search(&j) {
            Ok(pos) => vals[pos],
            Err(_) => 0.0,
        }
    }

    pub fn iter_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |i| {
            let (cols, vals) = self.row_entries(i);
            cols.iter().zip(vals).map(move |(&c, &v)| (i, c, v))
        })
    }

    /// Sparse-dense product. Each output entry accumulates this row's stored
    /// entries in ascending column-index order, so the result is
    /// bit-reproducible.
    pub fn spmm(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != b.rows() {
            return Err(Error::shape(
                "spmm",
                format!("lhs cols = rhs rows ({})", self.cols),
                format!("{}", b.rows()),
            ));
        }
        let d = b.cols();
        let mut out = DenseMatrix::zeros(self.rows, d);
        for i in 0..self.rows {
            let (cols, vals) = (
                &self.indices[self.indptr[i]..self.indptr[i + 1]],
                &self.values[self.indptr[i]..self.indptr[i + 1]],
            );
            let o_row = &mut out.data_mut()[i * d..(i + 1) * d];
            for (&c, &v) in cols.iter().zip(vals) {
                let b_row = &b.data()[c * d..(c + 1) * d];
                for (o, x) in o_row.iter_mut().zip(b_row) {
                    *o += v * x;
                }
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.iter_entries() {
            out.set(i, j, v);
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && self
                .iter_entries()
                .all(|(i, j, v)| self.get(j, i) == v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::RngStream;

    #[test]
    fn spmm_identity_returns_input() {
        let id = SparseMatrix::identity(3);
        let b = DenseMatrix::from_rows(&[
            vec![1.0, 2.0],
            vec![3.0, 4.0],
            vec![5.0, 6.0],
        ])
        .unwrap();
        assert_eq!(id.spmm(&b).unwrap(), b);
    }

    #[test]
    fn spmm_zero_matrix() {
        let z = SparseMatrix::empty(3, 3);
        let b = DenseMatrix::from_rows(&[vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        assert_eq!(z.spmm(&b).unwrap(), DenseMatrix::zeros(3, 1));
    }

    #[test]
    fn spmm_half_matrix_times_identity() {
        let a = SparseMatrix::from_entries(
            2,
            2,
            vec![(0, 0, 0.5), (0, 1, 0.5), (1, 0, 0.5), (1, 1, 0.5)],
        )
        .unwrap();
        let out = a.spmm(&DenseMatrix::identity(2)).unwrap();
        assert_eq!(out.data(), &[0.5, 0.5, 0.5, 0.5]);
    }

    #[test]
    fn spmm_dimension_mismatch() {
        let a = SparseMatrix::identity(3);
        let b = DenseMatrix::zeros(2, 2);
        assert!(a.spmm(&b).is_err());
    }

    #[test]
    fn duplicate_entries_rejected() {
        let r = SparseMatrix::from_entries(2, 2, vec![(0, 0, 1.0), (0, 0, 2.0)]);
        assert!(r.is_err());
    }

    #[test]
    fn explicit_zeros_dropped() {
        let m = SparseMatrix::from_entries(2, 2, vec![(0, 0, 0.0), (1, 1, 2.0)]).unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 0), 0.0);
        assert_eq!(m.get(1, 1), 2.0);
    }

    // spec invariant: spmm equals the dense product to 1e-12 on random 20x20
    // instances, with the dense route as the independent oracle.
    #[test]
    fn spmm_matches_dense_oracle_on_random_instances() {
        let mut rng = RngStream::seed_from(7);
        for _ in 0..10 {
            let n = 20;
            let mut entries = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if rng.uniform_f64() < 0.15 {
                        entries.push((i, j, rng.normal(0.0, 1.0)));
                    }
                }
            }
            let a = SparseMatrix::from_entries(n, n, entries).unwrap();
            let mut b = DenseMatrix::zeros(n, 8);
            for v in b.data_mut() {
                *v = rng.normal(0.0, 1.0);
            }
            let sparse_route = a.spmm(&b).unwrap();
            let dense_route = a.to_dense().matmul(&b).unwrap();
            assert!(sparse_route.max_abs_diff(&dense_route) < 1e-12);
        }
    }
}
