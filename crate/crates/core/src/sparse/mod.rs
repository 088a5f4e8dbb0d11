//! Complex sparse matrices in compressed-column form, symmetric
//! permutations, adjacency graphs, MatrixMarket I/O and spy plots.

mod graph;
mod matrix_market;
mod permutation;
mod spy;

pub use graph::AdjacencyGraph;
pub use matrix_market::{read_matrix_market, write_matrix_market};
pub use permutation::Permutation;
pub use spy::{spy_svg, spy_svg_string};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uncompressed `(row, col, value)` entries of a square matrix.
#[derive(Debug, Clone, Default)]
pub struct Triplets {
    pub dim: usize,
    pub entries: Vec<(usize, usize, Complex64)>,
}

impl Triplets {
    pub fn new(dim: usize) -> Self {
        Triplets {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, cap: usize) -> Self {
        Triplets {
            dim,
            entries: Vec::with_capacity(cap),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries.push((row, col, value));
    }

    /// Sums duplicates in insertion order and drops entries that come out
    /// exactly zero.
    pub fn compress(&self) -> Result<SparseMatrix> {
        self.compress_with(true)
    }

    /// Like [`Triplets::compress`] but keeps every pushed position, even when
    /// its entries sum to exactly zero. Used where the pattern is defined by
    /// connectivity rather than by the computed values.
    pub fn compress_structural(&self) -> Result<SparseMatrix> {
        self.compress_with(false)
    }

    fn compress_with(&self, drop_zeros: bool) -> Result<SparseMatrix> {
        let n = self.dim;
        if let Some(&(row, col, _)) = self.entries.iter().find(|(r, c, _)| *r >= n || *c >= n) {
            return Err(Error::IndexOutOfRange { row, col, dim: n });
        }
        let mut order: Vec<usize> = (0..self.entries.len()).collect();
        // stable, so duplicates are summed in insertion order
        order.sort_by_key(|&k| (self.entries[k].1, self.entries[k].0));

        let mut col_ptr = vec![0usize; n + 1];
        let mut row_idx = Vec::with_capacity(order.len());
        let mut values = Vec::with_capacity(order.len());
        let mut k = 0;
        while k < order.len() {
            let (r, c, mut sum) = self.entries[order[k]];
            k += 1;
            while k < order.len() && {
                let (r2, c2, _) = self.entries[order[k]];
                r2 == r && c2 == c
            } {
                sum += self.entries[order[k]].2;
                k += 1;
            }
            if !drop_zeros || sum != Complex64::new(0.0, 0.0) {
                row_idx.push(r);
                values.push(sum);
                col_ptr[c + 1] += 1;
            }
        }
        for j in 0..n {
            col_ptr[j + 1] += col_ptr[j];
        }
        Ok(SparseMatrix {
            dim: n,
            col_ptr,
            row_idx,
            values,
        })
    }
}

/// Square complex matrix in compressed sparse column form with strictly
/// increasing row indices in every column.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseMatrix {
    /// Builds a matrix from raw CSC arrays, checking the structure.
    pub fn from_csc(
        dim: usize,
        col_ptr: Vec<usize>,
        row_idx: Vec<usize>,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        if col_ptr.len() != dim + 1 || col_ptr[0] != 0 || col_ptr[dim] != row_idx.len() {
            return Err(Error::invalid("inconsistent column pointers"));
        }
        if row_idx.len() != values.len() {
            return Err(Error::invalid("row index and value arrays differ in length"));
        }
        for j in 0..dim {
            if col_ptr[j] > col_ptr[j + 1] {
                return Err(Error::invalid("column pointers must be non-decreasing"));
            }
            let rows = &row_idx[col_ptr[j]..col_ptr[j + 1]];
            if rows.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid(format!("rows of column {j} not strictly increasing")));
            }
            if let Some(&r) = rows.last() {
                if r >= dim {
                    return Err(Error::IndexOutOfRange { row: r, col: j, dim });
                }
            }
        }
        Ok(SparseMatrix {
            dim,
            col_ptr,
            row_idx,
            values,
        })
    }

    pub(crate) fn from_csc_unchecked(
        dim: usize,
        col_ptr: Vec<usize>,
        row_idx: Vec<usize>,
        values: Vec<Complex64>,
    ) -> Self {
        debug_assert!(SparseMatrix::from_csc(dim, col_ptr.clone(), row_idx.clone(), values.clone()).is_ok());
        SparseMatrix {
            dim,
            col_ptr,
            row_idx,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            dim: n,
            col_ptr: (0..=n).collect(),
            row_idx: (0..n).collect(),
            values: vec![Complex64::new(1.0, 0.0); n],
        }
    }

    /// Keeps the nonzero entries of a dense row-major matrix.
    pub fn from_dense(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        let mut t = Triplets::new(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                t.push(i, j, v);
            }
        }
        t.compress()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    pub fn col_ptr(&self) -> &[usize] {
        &self.col_ptr
    }

    pub fn row_idx(&self) -> &[usize] {
        &self.row_idx
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn col(&self, j: usize) -> (&[usize], &[Complex64]) {
        let r = self.col_ptr[j]..self.col_ptr[j + 1];
        (&self.row_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let (rows, vals) = self.col(j);
        match rows.binary_search(&i) {
            Ok(k) => vals[k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |j| {
            let (rows, vals) = self.col(j);
            rows.iter().zip(vals).map(move |(&i, &v)| (i, j, v))
        })
    }

    pub fn to_triplets(&self) -> Triplets {
        Triplets {
            dim: self.dim,
            entries: self.iter().collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let mut d = vec![vec![Complex64::new(0.0, 0.0); self.dim]; self.dim];
        for (i, j, v) in self.iter() {
            d[i][j] = v;
        }
        d
    }

    pub fn transpose(&self) -> SparseMatrix {
        let n = self.dim;
        let mut count = vec![0usize; n + 1];
        for &i in &self.row_idx {
            count[i + 1] += 1;
        }
        for i in 0..n {
            count[i + 1] += count[i];
        }
        let col_ptr = count.clone();
        let mut next = count;
        let mut row_idx = vec![0; self.nnz()];
        let mut values = vec![Complex64::new(0.0, 0.0); self.nnz()];
        for (i, j, v) in self.iter() {
            let k = next[i];
            row_idx[k] = j;
            values[k] = v;
            next[i] += 1;
        }
        SparseMatrix {
            dim: n,
            col_ptr,
            row_idx,
            values,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference `max |A - B|`.
    pub fn max_abs_diff(&self, other: &SparseMatrix) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut t = self.to_triplets();
        t.entries
            .extend(other.iter().map(|(i, j, v)| (i, j, -v)));
        // compress would drop exact zeros, which is what we want here
        Ok(t.compress()?.max_abs())
    }

    pub fn mat_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim];
        for j in 0..self.dim {
            let (rows, vals) = self.col(j);
            for (&i, &v) in rows.iter().zip(vals) {
                y[i] += v * x[j];
            }
        }
        Ok(y)
    }

    /// Scales every entry by a complex factor.
    pub fn scaled(&self, s: Complex64) -> SparseMatrix {
        SparseMatrix {
            values: self.values.iter().map(|v| v * s).collect(),
            ..self.clone()
        }
    }

    pub fn pattern(&self) -> Pattern {
        Pattern {
            dim: self.dim,
            col_ptr: self.col_ptr.clone(),
            row_idx: self.row_idx.clone(),
        }
    }

    /// Whether `A == A^T` entry for entry (no conjugation).
    pub fn is_symmetric(&self) -> bool {
        self.transpose() == *self
    }
}

/// Nonzero structure of a square matrix in compressed-column form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub dim: usize,
    pub col_ptr: Vec<usize>,
    pub row_idx: Vec<usize>,
}

impl Pattern {
    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.dim).flat_map(move |j| {
            self.row_idx[self.col_ptr[j]..self.col_ptr[j + 1]]
                .iter()
                .map(move |&i| (i, j))
        })
    }
}

/// Computes `P A P^T`, i.e. `B[k][l] = A[perm[k]][perm[l]]`.
pub fn permute_symmetric(a: &SparseMatrix, p: &Permutation) -> Result<SparseMatrix> {
    let n = a.dim();
    if p.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.len(),
        });
    }
    let mut col_ptr = Vec::with_capacity(n + 1);
    let mut row_idx = Vec::with_capacity(a.nnz());
    let mut values = Vec::with_capacity(a.nnz());
    col_ptr.push(0);
    let mut scratch: Vec<(usize, Complex64)> = Vec::new();
    for &old_col in p.order() {
        let (rows, vals) = a.col(old_col);
        scratch.clear();
        scratch.extend(rows.iter().zip(vals).map(|(&i, &v)| (p.new_index(i), v)));
        scratch.sort_unstable_by_key(|&(i, _)| i);
        for &(i, v) in &scratch {
            row_idx.push(i);
            values.push(v);
        }
        col_ptr.push(row_idx.len());
    }
    Ok(SparseMatrix::from_csc_unchecked(n, col_ptr, row_idx, values))
}

/// Adjacency graph of the off-diagonal pattern of `A + A^T`.
pub fn pattern_graph(a: &SparseMatrix) -> AdjacencyGraph {
    AdjacencyGraph::from_entries(a.dim(), a.iter().map(|(i, j, _)| (i, j)))
}
