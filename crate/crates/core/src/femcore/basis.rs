use super::{node_count, EDGE_VERTICES};
use crate::{Error, Result};

/// Highest degree the equispaced lattice basis supports. Geometry maps use
/// the same basis, so this also bounds the element-map degree.
pub const MAX_BASIS_DEGREE: usize = 6;

/// Degree-`p` Lagrange basis on the equispaced lattice of the reference
/// triangle, evaluated through the inverse of the monomial Vandermonde
/// matrix.
#[derive(Debug, Clone)]
pub struct LagrangeBasis {
    pub p: usize,
    pub nodes: Vec<[f64; 2]>,
    /// `coeffs[m * n + i]`: coefficient of monomial `m` in basis function `i`.
    coeffs: Vec<f64>,
    exponents: Vec<(usize, usize)>,
}

/// Basis values and reference gradients at a set of points.
#[derive(Debug, Clone)]
pub struct Tabulation {
    pub n_basis: usize,
    pub n_points: usize,
    /// `values[q * n_basis + i]`
    pub values: Vec<f64>,
    /// `grads[q * n_basis + i]`
    pub grads: Vec<[f64; 2]>,
}

impl Tabulation {
    #[inline]
    pub fn values_at(&self, q: usize) -> &[f64] {
        &self.values[q * self.n_basis..(q + 1) * self.n_basis]
    }

    #[inline]
    pub fn grads_at(&self, q: usize) -> &[[f64; 2]] {
        &self.grads[q * self.n_basis..(q + 1) * self.n_basis]
    }
}

/// Lattice nodes in the crate-wide local ordering.
fn lattice(p: usize) -> Vec<[f64; 2]> {
    let pf = p as f64;
    let mut nodes = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    for &[a, b] in EDGE_VERTICES.iter() {
        for j in 1..p {
            let (s, t) = ((p - j) as f64 / pf, j as f64 / pf);
            let va = nodes[a];
            let vb = nodes[b];
            nodes.push([s * va[0] + t * vb[0], s * va[1] + t * vb[1]]);
        }
    }
    for b in 1..p {
        for a in 1..p - b {
            nodes.push([a as f64 / pf, b as f64 / pf]);
        }
    }
    nodes
}

fn invert(mut m: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| m[a * n + col].abs().total_cmp(&m[b * n + col].abs()))
            .unwrap();
        if m[piv * n + col].abs() < 1e-14 {
            return Err(Error::Computation("singular Vandermonde matrix".into()));
        }
        if piv != col {
            for j in 0..n {
                m.swap(col * n + j, piv * n + j);
                inv.swap(col * n + j, piv * n + j);
            }
        }
        let d = m[col * n + col];
        for j in 0..n {
            m[col * n + j] /= d;
            inv[col * n + j] /= d;
        }
        for r in 0..n {
            if r != col {
                let f = m[r * n + col];
                if f != 0.0 {
                    for j in 0..n {
                        m[r * n + j] -= f * m[col * n + j];
                        inv[r * n + j] -= f * inv[col * n + j];
                    }
                }
            }
        }
    }
    Ok(inv)
}

impl LagrangeBasis {
    pub fn new(p: usize) -> Result<Self> {
        if !(1..=MAX_BASIS_DEGREE).contains(&p) {
            return Err(Error::Parameter(format!(
                "basis degree must be in 1..={MAX_BASIS_DEGREE}, got {p}"
            )));
        }
        let nodes = lattice(p);
        let n = nodes.len();
        debug_assert_eq!(n, node_count(p));
        let exponents: Vec<(usize, usize)> = (0..=p)
            .flat_map(|total| (0..=total).map(move |b| (total - b, b)))
            .collect();
        let mut v = vec![0.0; n * n];
        for (i, x) in nodes.iter().enumerate() {
            for (m, &(a, b)) in exponents.iter().enumerate() {
                v[i * n + m] = x[0].powi(a as i32) * x[1].powi(b as i32);
            }
        }
        let coeffs = invert(v, n)?;
        Ok(LagrangeBasis {
            p,
            nodes,
            coeffs,
            exponents,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Values and reference gradients of all basis functions at `x`.
    pub fn eval(&self, x: [f64; 2]) -> (Vec<f64>, Vec<[f64; 2]>) {
        let n = self.len();
        let mut values = vec![0.0; n];
        let mut grads = vec![[0.0; 2]; n];
        self.eval_into(x, &mut values, &mut grads);
        (values, grads)
    }

    fn eval_into(&self, x: [f64; 2], values: &mut [f64], grads: &mut [[f64; 2]]) {
        let n = self.len();
        let p = self.p;
        let mut px = [0.0; MAX_BASIS_DEGREE + 1];
        let mut py = [0.0; MAX_BASIS_DEGREE + 1];
        px[0] = 1.0;
        py[0] = 1.0;
        for d in 1..=p {
            px[d] = px[d - 1] * x[0];
            py[d] = py[d - 1] * x[1];
        }
        values.fill(0.0);
        grads.fill([0.0; 2]);
        for (m, &(a, b)) in self.exponents.iter().enumerate() {
            let val = px[a] * py[b];
            let dx = if a > 0 { a as f64 * px[a - 1] * py[b] } else { 0.0 };
            let dy = if b > 0 { b as f64 * px[a] * py[b - 1] } else { 0.0 };
            let row = &self.coeffs[m * n..(m + 1) * n];
            for i in 0..n {
                let c = row[i];
                values[i] += c * val;
                grads[i][0] += c * dx;
                grads[i][1] += c * dy;
            }
        }
    }

    pub fn tabulate(&self, points: &[[f64; 2]]) -> Tabulation {
        let n = self.len();
        let mut values = vec![0.0; n * points.len()];
        let mut grads = vec![[0.0; 2]; n * points.len()];
        for (q, x) in points.iter().enumerate() {
            self.eval_into(
                *x,
                &mut values[q * n..(q + 1) * n],
                &mut grads[q * n..(q + 1) * n],
            );
        }
        Tabulation {
            n_basis: n,
            n_points: points.len(),
            values,
            grads,
        }
    }

    /// Local indices of the nodes on local edge `e`, excluding vertices,
    /// ordered from the edge's first vertex to its second.
    pub fn edge_interior_nodes(&self, e: usize) -> std::ops::Range<usize> {
        let m = self.p - 1;
        let start = 3 + e * m;
        start..start + m
    }

    pub fn interior_nodes(&self) -> std::ops::Range<usize> {
        3 + 3 * (self.p - 1)..self.len()
    }
}
