//! Complex sparse matrices and a direct solver for the indefinite
//! Helmholtz systems.
//!
//! The solver is a multifrontal LU factorization over a nested-dissection
//! ordering of the symmetrized sparsity pattern. Dense front kernels (LU with
//! partial pivoting inside each pivot block, triangular solves, updates) run
//! through `faer`. The computed solution is polished by iterative refinement
//! until the requested residual is reached.

mod mmio;
mod multifrontal;
mod ordering;

pub use mmio::{read_matrix_market, read_vector_market, write_matrix_market, write_vector_market};
pub use multifrontal::{FactorStats, SparseLu};

use crate::{Complex64, Error, Result};

/// Compressed-row complex matrix with sorted, duplicate-free column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<Complex64>,
}

impl CsrMatrix {
    /// Build from raw arrays, validating the storage invariants.
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        if row_ptr.len() != n_rows + 1 || row_ptr[0] != 0 {
            return Err(Error::Validation("row offsets have the wrong shape".into()));
        }
        if col_idx.len() != values.len() || *row_ptr.last().unwrap() != col_idx.len() {
            return Err(Error::Validation("row offsets do not match the entry count".into()));
        }
        for i in 0..n_rows {
            if row_ptr[i] > row_ptr[i + 1] {
                return Err(Error::Validation(format!("row offsets decrease at row {i}")));
            }
            let row = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            if row.windows(2).any(|w| w[0] >= w[1]) || row.iter().any(|&c| c >= n_cols) {
                return Err(Error::Validation(format!(
                    "column indices of row {i} are not strictly increasing and in range"
                )));
            }
        }
        Ok(CsrMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Assemble from `(row, col, value)` triplets; duplicates are summed in
    /// input order.
    pub fn from_triplets(n_rows: usize, n_cols: usize, triplets: &[(usize, usize, Complex64)]) -> Result<Self> {
        let mut counts = vec![0usize; n_rows + 1];
        for &(r, c, _) in triplets {
            if r >= n_rows || c >= n_cols {
                return Err(Error::Validation(format!("triplet ({r}, {c}) out of range")));
            }
            counts[r + 1] += 1;
        }
        for i in 0..n_rows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![Complex64::new(0.0, 0.0); triplets.len()];
        for &(r, c, v) in triplets {
            cols[next[r]] = c;
            vals[next[r]] = v;
            next[r] += 1;
        }
        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        let mut scratch: Vec<(usize, usize)> = Vec::new();
        for i in 0..n_rows {
            scratch.clear();
            scratch.extend((counts[i]..counts[i + 1]).map(|k| (cols[k], k)));
            // Duplicates are summed in input order.
            scratch.sort_unstable();
            for &(c, k) in &scratch {
                if col_idx.len() > row_ptr[i] && *col_idx.last().unwrap() == c {
                    *values.last_mut().unwrap() += vals[k];
                } else {
                    col_idx.push(c);
                    values.push(vals[k]);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(CsrMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            n_rows: n,
            n_cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![Complex64::new(1.0, 0.0); n],
        }
    }

    pub fn from_diagonal(d: &[Complex64]) -> Self {
        let mut m = Self::identity(d.len());
        m.values.copy_from_slice(d);
        m
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[Complex64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut counts = vec![0usize; self.n_cols + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for j in 0..self.n_cols {
            counts[j + 1] += counts[j];
        }
        let mut next = counts.clone();
        let mut col_idx = vec![0usize; self.nnz()];
        let mut values = vec![Complex64::new(0.0, 0.0); self.nnz()];
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                col_idx[next[c]] = i;
                values[next[c]] = v;
                next[c] += 1;
            }
        }
        CsrMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_ptr: counts,
            col_idx,
            values,
        }
    }

    pub fn is_structurally_symmetric(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let t = self.transpose();
        t.row_ptr == self.row_ptr && t.col_idx == self.col_idx
    }

    /// Largest `|a_ij - a_ji|` relative to `max(|a_ij|, 1)`.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let d = (v - self.get(j, i)).norm() / v.norm().max(1.0);
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let mut d = vec![vec![Complex64::new(0.0, 0.0); self.n_cols]; self.n_rows];
        for (i, row) in d.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                row[c] = v;
            }
        }
        d
    }
}

/// `y = m x`, summing each row left to right.
pub fn spmv(m: &CsrMatrix, x: &[Complex64]) -> Result<Vec<Complex64>> {
    if x.len() != m.n_cols {
        return Err(Error::Dimension {
            expected: m.n_cols,
            found: x.len(),
        });
    }
    Ok((0..m.n_rows)
        .map(|i| {
            let (cols, vals) = m.row(i);
            cols.iter()
                .zip(vals)
                .fold(Complex64::new(0.0, 0.0), |acc, (&c, &v)| acc + v * x[c])
        })
        .collect())
}

pub fn norm2(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub const DEFAULT_TOL: f64 = 1e-10;

/// Solve `m x = b` with `||m x - b|| <= tol ||b||`.
pub fn solve(m: &CsrMatrix, b: &[Complex64], tol: f64) -> Result<Vec<Complex64>> {
    let lu = SparseLu::factor(m)?;
    lu.solve_refined(m, b, tol).map(|(x, _)| x)
}
