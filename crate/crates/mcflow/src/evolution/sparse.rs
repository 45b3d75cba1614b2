//! Compressed-row matrices over a shared sparsity pattern.
//!
//! The pattern of a scheme matrix never changes during a run (it comes from
//! the mesh connectivity), so it is built once, shared behind an `Arc`, and
//! every assembly just rewrites the value array.  Values are generally
//! nonsymmetric; the pattern is structurally symmetric.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

/// Row-pointer/column-index structure with sorted columns in every row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsityPattern {
    n_rows: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
}

impl SparsityPattern {
    /// Builds a pattern from per-row sorted, deduplicated column lists.
    pub fn from_rows(n_rows: usize, rows: &[Vec<usize>]) -> Self {
        assert_eq!(rows.len(), n_rows);
        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for cols in rows {
            debug_assert!(cols.windows(2).all(|w| w[0] < w[1]), "sorted unique columns");
            col_idx.extend(cols.iter().map(|&c| c as u32));
            row_ptr.push(col_idx.len());
        }
        Self {
            n_rows,
            row_ptr,
            col_idx,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row_range(&self, row: usize) -> std::ops::Range<usize> {
        self.row_ptr[row]..self.row_ptr[row + 1]
    }

    pub fn row_cols(&self, row: usize) -> &[u32] {
        &self.col_idx[self.row_range(row)]
    }

    /// Flat value index of `(row, col)`, if present.
    pub fn index_of(&self, row: usize, col: usize) -> Option<usize> {
        let range = self.row_range(row);
        self.col_idx[range.clone()]
            .binary_search(&(col as u32))
            .ok()
            .map(|k| range.start + k)
    }
}

/// Expands scalar node adjacency into the interleaved 3x3-block pattern:
/// row `3 i + r` holds columns `3 j + s` for every neighbor `j` of `i`.
pub fn block3_pattern(node_neighbors: &[Vec<usize>]) -> SparsityPattern {
    let n = node_neighbors.len();
    let mut rows = Vec::with_capacity(3 * n);
    for neighbors in node_neighbors {
        debug_assert!(neighbors.windows(2).all(|w| w[0] < w[1]));
        let cols: Vec<usize> = neighbors
            .iter()
            .flat_map(|&j| [3 * j, 3 * j + 1, 3 * j + 2])
            .collect();
        rows.push(cols.clone());
        rows.push(cols.clone());
        rows.push(cols);
    }
    SparsityPattern::from_rows(3 * n, &rows)
}

/// CSR matrix sharing its pattern.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pattern: Arc<SparsityPattern>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(pattern: Arc<SparsityPattern>) -> Self {
        let nnz = pattern.nnz();
        Self {
            pattern,
            values: vec![0.0; nnz],
        }
    }

    pub fn pattern(&self) -> &Arc<SparsityPattern> {
        &self.pattern
    }

    pub fn n_rows(&self) -> usize {
        self.pattern.n_rows()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn set_zero(&mut self) {
        self.values.fill(0.0);
    }

    pub fn add_at(&mut self, row: usize, col: usize, value: f64) {
        let idx = self
            .pattern
            .index_of(row, col)
            .expect("entry outside the sparsity pattern");
        self.values[idx] += value;
    }

    /// `y = self * x`.
    pub fn spmv(&self, x: &DVector<f64>, y: &mut DVector<f64>) {
        debug_assert_eq!(x.len(), self.n_rows());
        for row in 0..self.n_rows() {
            let range = self.pattern.row_range(row);
            let mut acc = 0.0;
            for k in range {
                acc += self.values[k] * x[self.pattern.col_idx[k] as usize];
            }
            y[row] = acc;
        }
    }

    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut y = DVector::zeros(self.n_rows());
        self.spmv(x, &mut y);
        y
    }

    /// `a * self + b * other` over the shared pattern.
    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Self {
        assert!(Arc::ptr_eq(&self.pattern, &other.pattern), "patterns differ");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Self {
            pattern: self.pattern.clone(),
            values,
        }
    }

    /// Dense copy, for small systems and tests.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.n_rows();
        let mut dense = DMatrix::zeros(n, n);
        for row in 0..n {
            for k in self.pattern.row_range(row) {
                dense[(row, self.pattern.col_idx[k] as usize)] = self.values[k];
            }
        }
        dense
    }

    /// Maximum absolute row-sum asymmetry, for tests.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for row in 0..self.n_rows() {
            for k in self.pattern.row_range(row) {
                let col = self.pattern.col_idx[k] as usize;
                if let Some(t) = self.pattern.index_of(col, row) {
                    worst = worst.max((self.values[k] - self.values[t]).abs());
                }
            }
        }
        worst
    }
}
