//! Compressed sparse row storage for symmetric operators.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Symmetric sparse matrix. The full pattern (both triangles) is stored so
/// the matrix-vector product is a plain CSR loop.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSymMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymMatrix {
    /// Zero matrix whose pattern couples every pair of dofs that share a group
    /// (for finite elements: the dofs of one element).
    pub fn from_groups<'a>(n: usize, groups: impl Iterator<Item = &'a [usize]>) -> Self {
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); n];
        for g in groups {
            for &i in g {
                rows[i].extend_from_slice(g);
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for mut r in rows {
            r.sort_unstable();
            r.dedup();
            col_idx.extend(r);
            row_ptr.push(col_idx.len());
        }
        let nnz = col_idx.len();
        SparseSymMatrix {
            n,
            row_ptr,
            col_idx,
            values: vec![0.0; nnz],
        }
    }

    /// Dense-to-sparse conversion, mostly for tests and tiny systems.
    pub fn from_dense(a: &[Vec<f64>]) -> Result<Self> {
        let n = a.len();
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for (i, row) in a.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Input("matrix is not square".into()));
            }
            for (j, &v) in row.iter().enumerate() {
                if v != a[j][i] {
                    return Err(Error::Input(format!("matrix is not symmetric at ({i}, {j})")));
                }
                if v != 0.0 || i == j {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(SparseSymMatrix {
            n,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    fn position(&self, i: usize, j: usize) -> Option<usize> {
        let row = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
        row.binary_search(&j).ok().map(|k| self.row_ptr[i] + k)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |k| self.values[k])
    }

    /// Adds `v` to entry `(i, j)`. Panics if the entry is outside the pattern.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .position(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) is not in the sparsity pattern"));
        self.values[k] += v;
    }

    /// Scatters a dense symmetric element block.
    pub fn add_block(&mut self, dofs: &[usize], block: &[[f64; 6]]) {
        for (a, &i) in dofs.iter().enumerate() {
            for (b, &j) in dofs.iter().enumerate() {
                self.add(i, j, block[a][b]);
            }
        }
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    /// `y = A x`
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[k] * x[self.col_idx[k]];
            }
            *yi = s;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `v^T A w`
    pub fn bilinear(&self, v: &[f64], w: &[f64]) -> f64 {
        (0..self.n)
            .map(|i| v[i] * self.row(i).map(|(j, a)| a * w[j]).sum::<f64>())
            .sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Largest `|a_ij - a_ji|` over the stored pattern.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for (j, a) in self.row(i) {
                worst = worst.max((a - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// `self + alpha * other`, both on the same pattern.
    pub fn add_scaled(&self, alpha: f64, other: &SparseSymMatrix) -> Result<SparseSymMatrix> {
        if self.row_ptr != other.row_ptr || self.col_idx != other.col_idx {
            return Err(Error::Input("matrices have different sparsity patterns".into()));
        }
        let mut out = self.clone();
        for (v, o) in out.values.iter_mut().zip(&other.values) {
            *v += alpha * o;
        }
        Ok(out)
    }

    /// Principal submatrix on `keep` (sorted, unique), renumbered 0..keep.len().
    pub fn principal_submatrix(&self, keep: &[usize]) -> SparseSymMatrix {
        let mut new_index = vec![usize::MAX; self.n];
        for (k, &i) in keep.iter().enumerate() {
            new_index[i] = k;
        }
        let mut row_ptr = Vec::with_capacity(keep.len() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for &i in keep {
            for (j, a) in self.row(i) {
                let nj = new_index[j];
                if nj != usize::MAX {
                    col_idx.push(nj);
                    values.push(a);
                }
            }
            row_ptr.push(col_idx.len());
        }
        SparseSymMatrix {
            n: keep.len(),
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Largest eigenvalue estimate by power iteration.
    pub fn max_eigenvalue(&self, iters: usize) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        // deterministic, non-symmetric start vector
        let mut x: Vec<f64> = (0..self.n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
        let mut lambda = 0.0;
        let mut y = vec![0.0; self.n];
        for _ in 0..iters {
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
            self.mul_vec_into(&x, &mut y);
            let next: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
            std::mem::swap(&mut x, &mut y);
            if (next - lambda).abs() <= 1e-10 * next.abs() {
                lambda = next;
                break;
            }
            lambda = next;
        }
        lambda
    }

    /// Coordinate text dump, one `i j value` line per stored entry.
    pub fn to_coordinate_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {} {} {}", self.n, self.n, self.nnz());
        for i in 0..self.n {
            for (j, a) in self.row(i) {
                let _ = writeln!(out, "{i} {j} {a:.16e}");
            }
        }
        out
    }

    pub fn write_coordinate(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_coordinate_text()).map_err(|e| Error::io(path, e))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
