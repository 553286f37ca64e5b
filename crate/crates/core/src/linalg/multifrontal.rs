use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::lu::partial_pivoting::factor::{lu_in_place, lu_in_place_scratch};
use faer::linalg::matmul::matmul;
use faer::linalg::triangular_solve::{solve_lower_triangular_in_place, solve_unit_lower_triangular_in_place};
use faer::{Accum, Mat, Par};

use super::ordering::{nested_dissection, Graph};
use super::{norm2, spmv, CsrMatrix};
use crate::{Complex64, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FactorStats {
    pub n: usize,
    pub fronts: usize,
    /// Stored complex entries of the factors.
    pub factor_entries: usize,
    pub max_front: usize,
}

struct Front {
    start: usize,
    np: usize,
    /// Positions (new ordering) of the boundary variables.
    boundary: Vec<u32>,
    /// Column-major `(np + nb) x np`: LU of the pivot block above `L_BP`.
    panel: Vec<Complex64>,
    /// Column-major `np x nb`: `U_PB`.
    upper: Vec<Complex64>,
    /// Pivot-block row permutation: row `i` of the factored block is row
    /// `row_perm[i]` of the assembled one.
    row_perm: Vec<u32>,
}

/// Multifrontal sparse LU factorization.
pub struct SparseLu {
    n: usize,
    perm: Vec<usize>,
    fronts: Vec<Front>,
    stats: FactorStats,
}

impl SparseLu {
    pub fn factor(m: &CsrMatrix) -> Result<SparseLu> {
        if !m.is_square() {
            return Err(Error::Dimension {
                expected: m.n_rows,
                found: m.n_cols,
            });
        }
        let n = m.n_rows;
        let (perm, inv, tree) = {
            let g = Graph::from_matrix(m);
            let ord = nested_dissection(&g);
            let tree = symbolic(&g, &ord);
            (ord.perm, ord.inv, tree)
        };
        let at = m.transpose();

        let mut loc = vec![0u32; n];
        let mut updates: Vec<Mat<Complex64>> = Vec::new();
        let mut fronts = Vec::with_capacity(tree.len());
        let mut stats = FactorStats {
            n,
            fronts: tree.len(),
            ..Default::default()
        };
        let mut row_perm_buf: Vec<usize> = Vec::new();
        let mut row_perm_inv: Vec<usize> = Vec::new();

        for node in tree {
            let SymbolicNode {
                start,
                end,
                n_children,
                boundary,
                child_boundaries,
            } = node;
            let np = end - start;
            let nb = boundary.len();
            let size = np + nb;
            stats.max_front = stats.max_front.max(size);
            for k in 0..np {
                loc[start + k] = k as u32;
            }
            for (k, &b) in boundary.iter().enumerate() {
                loc[b as usize] = (np + k) as u32;
            }

            let mut f = Mat::<Complex64>::zeros(size, size);
            for k in 0..np {
                let old = perm[start + k];
                let (cols, vals) = m.row(old);
                for (&c, &v) in cols.iter().zip(vals) {
                    let pc = inv[c];
                    if pc >= start {
                        f[(k, loc[pc] as usize)] += v;
                    }
                }
                let (rows, vals) = at.row(old);
                for (&r, &v) in rows.iter().zip(vals) {
                    let pr = inv[r];
                    if pr >= end {
                        f[(loc[pr] as usize, k)] += v;
                    }
                }
            }
            let first_child = updates.len() - n_children;
            for (u, cb) in updates.drain(first_child..).zip(&child_boundaries) {
                let idx: Vec<usize> = cb.iter().map(|&b| loc[b as usize] as usize).collect();
                for (j, &lj) in idx.iter().enumerate() {
                    for (i, &li) in idx.iter().enumerate() {
                        f[(li, lj)] += u[(i, j)];
                    }
                }
            }

            row_perm_buf.resize(np, 0);
            row_perm_inv.resize(np, 0);
            {
                let req = lu_in_place_scratch::<usize, Complex64>(np, np, Par::Seq, Default::default());
                let mut buf = MemBuffer::new(req);
                let stack = MemStack::new(&mut buf);
                lu_in_place(
                    f.as_mut().submatrix_mut(0, 0, np, np),
                    &mut row_perm_buf,
                    &mut row_perm_inv,
                    Par::Seq,
                    stack,
                    Default::default(),
                );
            }
            for i in 0..np {
                let d = f[(i, i)];
                if !(d.norm() > 0.0) || !d.is_finite() {
                    return Err(Error::Singular {
                        pivot: perm[start + i],
                    });
                }
            }

            if nb > 0 {
                // Apply the pivot-block row permutation to U_PB's rows.
                let mut tmp = vec![ZERO; np];
                for j in np..size {
                    for i in 0..np {
                        tmp[i] = f[(row_perm_buf[i], j)];
                    }
                    for i in 0..np {
                        f[(i, j)] = tmp[i];
                    }
                }
                let (top, bottom) = f.as_mut().split_at_row_mut(np);
                let (pp, mut pb) = top.split_at_col_mut(np);
                let (mut bp, bb) = bottom.split_at_col_mut(np);
                solve_unit_lower_triangular_in_place(pp.as_ref(), pb.as_mut(), Par::Seq);
                solve_lower_triangular_in_place(pp.as_ref().transpose(), bp.as_mut().transpose_mut(), Par::Seq);
                matmul(bb, Accum::Add, bp.as_ref(), pb.as_ref(), Complex64::new(-1.0, 0.0), Par::Seq);
            }

            let mut panel = Vec::with_capacity(size * np);
            for j in 0..np {
                panel.extend_from_slice(f.col_as_slice(j));
            }
            let mut upper = Vec::with_capacity(np * nb);
            for j in np..size {
                upper.extend_from_slice(&f.col_as_slice(j)[..np]);
            }
            stats.factor_entries += panel.len() + upper.len();
            let update = if nb > 0 {
                f.as_ref().submatrix(np, np, nb, nb).to_owned()
            } else {
                Mat::zeros(0, 0)
            };
            drop(f);
            updates.push(update);
            fronts.push(Front {
                start,
                np,
                boundary,
                panel,
                upper,
                row_perm: row_perm_buf.iter().map(|&p| p as u32).collect(),
            });
        }
        Ok(SparseLu {
            n,
            perm,
            fronts,
            stats,
        })
    }

    pub fn stats(&self) -> FactorStats {
        self.stats
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// One application of the factors: `x = A^{-1} b` up to rounding.
    pub fn solve_once(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        if b.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: b.len(),
            });
        }
        let mut xb: Vec<Complex64> = self.perm.iter().map(|&old| b[old]).collect();
        let mut w: Vec<Complex64> = Vec::new();
        for f in &self.fronts {
            let np = f.np;
            let m = np + f.boundary.len();
            w.clear();
            w.extend(f.row_perm.iter().map(|&r| xb[f.start + r as usize]));
            for j in 0..np {
                let wj = w[j];
                if wj == ZERO {
                    continue;
                }
                let col = &f.panel[j * m..(j + 1) * m];
                for i in j + 1..np {
                    w[i] -= col[i] * wj;
                }
                for (k, &b) in f.boundary.iter().enumerate() {
                    xb[b as usize] -= col[np + k] * wj;
                }
            }
            xb[f.start..f.start + np].copy_from_slice(&w);
        }
        for f in self.fronts.iter().rev() {
            let np = f.np;
            let m = np + f.boundary.len();
            w.clear();
            w.extend_from_slice(&xb[f.start..f.start + np]);
            for (k, &b) in f.boundary.iter().enumerate() {
                let xk = xb[b as usize];
                if xk == ZERO {
                    continue;
                }
                let col = &f.upper[k * np..(k + 1) * np];
                for i in 0..np {
                    w[i] -= col[i] * xk;
                }
            }
            for j in (0..np).rev() {
                let col = &f.panel[j * m..(j + 1) * m];
                w[j] /= col[j];
                let wj = w[j];
                for i in 0..j {
                    w[i] -= col[i] * wj;
                }
            }
            xb[f.start..f.start + np].copy_from_slice(&w);
        }
        let mut x = vec![ZERO; self.n];
        for (pos, &old) in self.perm.iter().enumerate() {
            x[old] = xb[pos];
        }
        Ok(x)
    }

    /// Solve with iterative refinement until `||m x - b|| <= tol ||b||`.
    /// Returns the solution and the achieved relative residual.
    pub fn solve_refined(&self, m: &CsrMatrix, b: &[Complex64], tol: f64) -> Result<(Vec<Complex64>, f64)> {
        let nb = norm2(b);
        if nb == 0.0 {
            return Ok((vec![ZERO; self.n], 0.0));
        }
        let mut x = self.solve_once(b)?;
        let mut prev = f64::INFINITY;
        for _ in 0..10 {
            let ax = spmv(m, &x)?;
            let r: Vec<Complex64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
            let res = norm2(&r) / nb;
            if res <= tol {
                return Ok((x, res));
            }
            if !res.is_finite() || res > 0.5 * prev {
                return Err(Error::Convergence { achieved: res, tol });
            }
            prev = res;
            let d = self.solve_once(&r)?;
            for (xi, di) in x.iter_mut().zip(&d) {
                *xi += di;
            }
        }
        Err(Error::Convergence { achieved: prev, tol })
    }
}

struct SymbolicNode {
    start: usize,
    end: usize,
    n_children: usize,
    boundary: Vec<u32>,
    child_boundaries: Vec<Vec<u32>>,
}

/// Boundary (later-eliminated variables coupled to the pivots) of every
/// front, in postorder. Each front also carries copies of its children's
/// boundaries for the extend-add step.
fn symbolic(g: &Graph, ord: &super::ordering::Ordering) -> Vec<SymbolicNode> {
    let n = g.len();
    let mut tag = vec![u32::MAX; n];
    let mut boundaries: Vec<Option<Vec<u32>>> = Vec::with_capacity(ord.nodes.len());
    let mut out = Vec::with_capacity(ord.nodes.len());
    for (fi, node) in ord.nodes.iter().enumerate() {
        let (start, end) = (node.start, node.end);
        let mut bnd: Vec<u32> = Vec::new();
        for pos in start..end {
            for &w in g.neighbors(ord.perm[pos]) {
                let pw = ord.inv[w as usize];
                if pw >= end && tag[pw] != fi as u32 {
                    tag[pw] = fi as u32;
                    bnd.push(pw as u32);
                }
            }
        }
        let mut child_boundaries = Vec::with_capacity(node.children.len());
        for &c in &node.children {
            let cb = boundaries[c].take().expect("child visited once");
            for &b in &cb {
                if b as usize >= end && tag[b as usize] != fi as u32 {
                    tag[b as usize] = fi as u32;
                    bnd.push(b);
                }
            }
            child_boundaries.push(cb);
        }
        bnd.sort_unstable();
        boundaries.push(Some(bnd.clone()));
        out.push(SymbolicNode {
            start,
            end,
            n_children: node.children.len(),
            boundary: bnd,
            child_boundaries,
        });
    }
    out
}
