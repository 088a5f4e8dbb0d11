//! Sparse LU factorization without row pivoting, symbolic fill prediction
//! and fill accounting for the combined factor `L + U - I`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sparse::{pattern_graph, AdjacencyGraph, Pattern, Permutation, SparseMatrix};

const NONE: usize = usize::MAX;

/// Predicted nonzero count of `L + U - I` when the symmetric pattern `g`
/// (plus a full diagonal) is eliminated in the order `perm`, assuming no
/// numerical cancellation.
///
/// Eliminating a vertex joins its uneliminated neighbors into a clique. The
/// filled graph is built by merging each vertex's higher neighbors into the
/// lowest of them, which yields the same edges as pairwise elimination.
pub fn symbolic_fill(g: &AdjacencyGraph, perm: &Permutation) -> Result<usize> {
    let n = g.len();
    if perm.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: perm.len(),
        });
    }
    let pos = perm.inverse_map();
    let mut higher: Vec<Vec<usize>> = (0..n)
        .map(|k| {
            let v = perm.order()[k];
            g.neighbors(v).iter().map(|&w| pos[w]).filter(|&w| w > k).collect()
        })
        .collect();
    let mut filled_edges = 0;
    for k in 0..n {
        let mut h = std::mem::take(&mut higher[k]);
        h.sort_unstable();
        h.dedup();
        filled_edges += h.len();
        if let Some((&parent, rest)) = h.split_first() {
            higher[parent].extend_from_slice(rest);
        }
    }
    Ok(n + 2 * filled_edges)
}

/// [`symbolic_fill`] on the pattern of a matrix.
pub fn symbolic_fill_of(a: &SparseMatrix, perm: &Permutation) -> Result<usize> {
    symbolic_fill(&pattern_graph(a), perm)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LuOptions {
    /// A pivot is rejected when `|pivot| <= pivot_tol * max|A|`.
    pub pivot_tol: f64,
    /// Partial pivoting with this threshold in `(0, 1]`; the diagonal is kept
    /// when `|a_kk| >= threshold * max_i |a_ik|`. `None` disables pivoting.
    pub threshold_pivoting: Option<f64>,
}

impl Default for LuOptions {
    fn default() -> Self {
        LuOptions {
            pivot_tol: 1e-13,
            threshold_pivoting: None,
        }
    }
}

/// `P_r A = L U` with `L` unit lower triangular (diagonal not stored) and
/// `P_r` the identity unless threshold pivoting chose other rows.
#[derive(Debug, Clone)]
pub struct LUFactors {
    l: SparseMatrix,
    u: SparseMatrix,
    row_perm: Permutation,
}

impl LUFactors {
    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    /// Strictly lower part of `L`.
    pub fn l(&self) -> &SparseMatrix {
        &self.l
    }

    pub fn u(&self) -> &SparseMatrix {
        &self.u
    }

    /// `row_perm().order()[k]` is the row of `A` used as pivot `k`.
    pub fn row_perm(&self) -> &Permutation {
        &self.row_perm
    }

    /// Nonzeros of `L + U - I`, counting entries that cancelled to zero.
    pub fn combined_nnz(&self) -> usize {
        self.l.nnz() + self.u.nnz()
    }

    /// Pattern of `L + U - I`.
    pub fn combined_pattern(&self) -> Pattern {
        let n = self.dim();
        let (lp, lr) = (self.l.col_ptr(), self.l.row_idx());
        let (up, ur) = (self.u.col_ptr(), self.u.row_idx());
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::with_capacity(self.combined_nnz());
        col_ptr.push(0);
        for j in 0..n {
            row_idx.extend_from_slice(&ur[up[j]..up[j + 1]]);
            row_idx.extend_from_slice(&lr[lp[j]..lp[j + 1]]);
            col_ptr.push(row_idx.len());
        }
        Pattern {
            dim: n,
            col_ptr,
            row_idx,
        }
    }

    /// Solves `A x = b` for the factored matrix.
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        let mut x: Vec<Complex64> = self.row_perm.order().iter().map(|&r| b[r]).collect();
        for k in 0..n {
            let xk = x[k];
            if xk == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (rows, vals) = self.l.col(k);
            for (&i, &v) in rows.iter().zip(vals) {
                x[i] -= v * xk;
            }
        }
        for k in (0..n).rev() {
            let (rows, vals) = self.u.col(k);
            let last = rows.len() - 1;
            x[k] /= vals[last];
            let xk = x[k];
            for (&i, &v) in rows[..last].iter().zip(&vals[..last]) {
                x[i] -= v * xk;
            }
        }
        Ok(x)
    }

    /// `max |P_r A - L U|` over all entries, computed column by column
    /// without forming the product.
    pub fn factorization_error(&self, a: &SparseMatrix) -> Result<f64> {
        let n = self.dim();
        if a.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.dim(),
            });
        }
        let pos = self.row_perm.inverse_map();
        let mut acc = vec![Complex64::new(0.0, 0.0); n];
        let mut touched = vec![false; n];
        let mut list = Vec::new();
        let mut err: f64 = 0.0;
        let touch = |i: usize, list: &mut Vec<usize>, touched: &mut Vec<bool>| {
            if !touched[i] {
                touched[i] = true;
                list.push(i);
            }
        };
        for j in 0..n {
            let (urows, uvals) = self.u.col(j);
            for (&k, &ukj) in urows.iter().zip(uvals) {
                touch(k, &mut list, &mut touched);
                acc[k] += ukj;
                let (lrows, lvals) = self.l.col(k);
                for (&i, &lik) in lrows.iter().zip(lvals) {
                    touch(i, &mut list, &mut touched);
                    acc[i] += lik * ukj;
                }
            }
            let (arows, avals) = a.col(j);
            for (&r, &v) in arows.iter().zip(avals) {
                let i = pos[r];
                touch(i, &mut list, &mut touched);
                acc[i] -= v;
            }
            for &i in &list {
                err = err.max(acc[i].norm());
                acc[i] = Complex64::new(0.0, 0.0);
                touched[i] = false;
            }
            list.clear();
        }
        Ok(err)
    }
}

/// Factors `A = L U` with the diagonal as pivot sequence.
pub fn lu_numeric(a: &SparseMatrix) -> Result<LUFactors> {
    lu_numeric_with(a, &LuOptions::default())
}

/// Left-looking factorization: column `k` of the factors comes from a sparse
/// triangular solve with the finished columns of `L`, whose nonzero pattern
/// is found by depth-first reachability from the entries of `A(:, k)`.
pub fn lu_numeric_with(a: &SparseMatrix, opts: &LuOptions) -> Result<LUFactors> {
    let n = a.dim();
    if !(opts.pivot_tol >= 0.0 && opts.pivot_tol.is_finite()) {
        return Err(Error::invalid("pivot tolerance must be finite and non-negative"));
    }
    if let Some(t) = opts.threshold_pivoting {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::invalid("pivoting threshold must lie in (0, 1]"));
        }
    }
    let tol = opts.pivot_tol * a.max_abs();
    let zero = Complex64::new(0.0, 0.0);

    let mut lp = vec![0usize];
    let mut li: Vec<usize> = Vec::new();
    let mut lx: Vec<Complex64> = Vec::new();
    let mut up = vec![0usize];
    let mut ui: Vec<usize> = Vec::new();
    let mut ux: Vec<Complex64> = Vec::new();
    let mut pinv = vec![NONE; n];

    let mut x = vec![zero; n];
    let mut mark = vec![NONE; n];
    let mut post: Vec<usize> = Vec::new();
    let mut stack: Vec<(usize, usize)> = Vec::new();

    for k in 0..n {
        // reach of A(:, k) in the graph of L, in postorder
        post.clear();
        let (arows, avals) = a.col(k);
        for &start in arows {
            if mark[start] == k {
                continue;
            }
            mark[start] = k;
            stack.push((start, 0));
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                let col = pinv[node];
                let children: &[usize] = if col == NONE { &[] } else { &li[lp[col]..lp[col + 1]] };
                if let Some(&child) = children.get(*next) {
                    *next += 1;
                    if mark[child] != k {
                        mark[child] = k;
                        stack.push((child, 0));
                    }
                } else {
                    stack.pop();
                    post.push(node);
                }
            }
        }

        for (&i, &v) in arows.iter().zip(avals) {
            x[i] = v;
        }
        for &i in post.iter().rev() {
            let col = pinv[i];
            if col == NONE {
                continue;
            }
            let xi = x[i];
            for p in lp[col]..lp[col + 1] {
                x[li[p]] -= lx[p] * xi;
            }
        }

        let pivot_row = match opts.threshold_pivoting {
            None => {
                if mark[k] != k || pinv[k] != NONE {
                    return Err(Error::ZeroPivot {
                        column: k,
                        magnitude: 0.0,
                    });
                }
                k
            }
            Some(threshold) => {
                let mut best = NONE;
                let mut best_abs = -1.0;
                for &i in &post {
                    if pinv[i] == NONE {
                        let v = x[i].norm();
                        if v > best_abs || (v == best_abs && i < best) {
                            best = i;
                            best_abs = v;
                        }
                    }
                }
                if best == NONE {
                    return Err(Error::ZeroPivot {
                        column: k,
                        magnitude: 0.0,
                    });
                }
                if mark[k] == k && pinv[k] == NONE && x[k].norm() >= threshold * best_abs {
                    k
                } else {
                    best
                }
            }
        };
        let pivot = x[pivot_row];
        if !(pivot.norm() > tol) || !pivot.is_finite() {
            return Err(Error::ZeroPivot {
                column: k,
                magnitude: pivot.norm(),
            });
        }

        for &i in &post {
            if pinv[i] != NONE {
                ui.push(i);
                ux.push(x[i]);
            }
        }
        ui.push(pivot_row);
        ux.push(pivot);
        up.push(ui.len());
        pinv[pivot_row] = k;
        for &i in &post {
            if pinv[i] == NONE {
                li.push(i);
                lx.push(x[i] / pivot);
            }
            x[i] = zero;
        }
        lp.push(li.len());
    }

    let row_perm = {
        let mut order = vec![0; n];
        for (row, &k) in pinv.iter().enumerate() {
            order[k] = row;
        }
        Permutation::from_order(order)?
    };
    let l = sorted_csc(n, lp, li, lx, &pinv);
    let u = sorted_csc(n, up, ui, ux, &pinv);
    Ok(LUFactors { l, u, row_perm })
}

/// Renumbers rows through `pinv` and sorts every column.
fn sorted_csc(n: usize, ptr: Vec<usize>, rows: Vec<usize>, vals: Vec<Complex64>, pinv: &[usize]) -> SparseMatrix {
    let mut row_idx = Vec::with_capacity(rows.len());
    let mut values = Vec::with_capacity(vals.len());
    let mut buf: Vec<(usize, Complex64)> = Vec::new();
    for j in 0..n {
        buf.clear();
        buf.extend((ptr[j]..ptr[j + 1]).map(|p| (pinv[rows[p]], vals[p])));
        buf.sort_unstable_by_key(|e| e.0);
        for &(r, v) in &buf {
            row_idx.push(r);
            values.push(v);
        }
    }
    SparseMatrix::from_csc_unchecked(n, ptr, row_idx, values)
}

/// Nonzero counts of a matrix and its combined factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FillReport {
    pub dim: usize,
    pub input_nnz: usize,
    pub factor_nnz: usize,
    pub total_entries: u64,
    /// `100 * factor_nnz / N^2`, unrounded.
    pub fill_percent: f64,
}

impl FillReport {
    pub fn new(dim: usize, input_nnz: usize, factor_nnz: usize) -> Self {
        let total_entries = (dim as u64) * (dim as u64);
        FillReport {
            dim,
            input_nnz,
            factor_nnz,
            total_entries,
            fill_percent: percent_of(factor_nnz, total_entries),
        }
    }

    /// `100 * input_nnz / N^2`, unrounded.
    pub fn input_percent(&self) -> f64 {
        percent_of(self.input_nnz, self.total_entries)
    }
}

fn percent_of(count: usize, total: u64) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * count as f64 / total as f64
    }
}

pub fn fill_report(a: &SparseMatrix, factors: &LUFactors) -> FillReport {
    FillReport::new(a.dim(), a.nnz(), factors.combined_nnz())
}
