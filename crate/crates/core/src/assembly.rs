//! Assembly of the Helmholtz sesquilinear form
//! `-k^2 (mu u, v) + (A grad u, grad v)` and the load vector, plus
//! Dirichlet elimination.

use crate::coefficients::{a_in_region, mu_in_region, rhs_f, Mat2, ProblemSpec, Region};
use crate::exec::Execution;
use crate::femcore::{node_count, quadrature, DofMap, LagrangeBasis, QuadratureRule, Tabulation};
use crate::linalg::CsrMatrix;
use crate::mesh::{map_from_nodes, Mesh};
use crate::{Complex64, Error, Point, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Where the coefficients `mu` and `A` are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampling {
    /// Once per element, at the image of the reference centroid.
    #[default]
    Midpoint,
    /// At every quadrature point.
    PerPoint,
}

/// Coefficients and load of a Helmholtz problem.
pub trait Problem: Sync {
    fn wavenumber(&self) -> f64;
    fn mu(&self, x: Point, region: Region) -> Result<Complex64>;
    fn a(&self, x: Point, region: Region) -> Result<Mat2>;
    fn source(&self, x: Point) -> Complex64;
    /// `true` when the source is negligible on the annulus `r_min..=r_max`.
    fn source_vanishes_on(&self, _r_min: f64, _r_max: f64) -> bool {
        false
    }
}

impl Problem for ProblemSpec {
    fn wavenumber(&self) -> f64 {
        self.k
    }

    fn mu(&self, x: Point, region: Region) -> Result<Complex64> {
        mu_in_region(x, region, self)
    }

    fn a(&self, x: Point, region: Region) -> Result<Mat2> {
        a_in_region(x, region, self)
    }

    fn source(&self, x: Point) -> Complex64 {
        rhs_f(x, self)
    }

    fn source_vanishes_on(&self, r_min: f64, r_max: f64) -> bool {
        // The cutoff derivatives carry exp(-((r - c)/sigma)^2) < 1e-21 here.
        let band = 7.0 * self.cutoff_width;
        r_max < self.cutoff_center - band || r_min > self.cutoff_center + band
    }
}

/// `-lap u - k^2 u = 0` with `mu = 1`, `A = I`.
#[derive(Debug, Clone, Copy)]
pub struct FreeSpace {
    pub k: f64,
}

impl Problem for FreeSpace {
    fn wavenumber(&self) -> f64 {
        self.k
    }

    fn mu(&self, _: Point, _: Region) -> Result<Complex64> {
        Ok(Complex64::new(1.0, 0.0))
    }

    fn a(&self, _: Point, _: Region) -> Result<Mat2> {
        let one = Complex64::new(1.0, 0.0);
        Ok([[one, ZERO], [ZERO, one]])
    }

    fn source(&self, _: Point) -> Complex64 {
        ZERO
    }

    fn source_vanishes_on(&self, _: f64, _: f64) -> bool {
        true
    }
}

/// Square system `matrix * u = rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<Complex64>,
}

impl SparseSystem {
    pub fn n_dofs(&self) -> usize {
        self.rhs.len()
    }
}

/// Reference-element integrals `S^{ab}_{ij} = int d_a phi_i d_b phi_j` and
/// `M_ij = int phi_i phi_j`, row-major.
struct ReferenceMatrices {
    stiff: [Vec<f64>; 4],
    mass: Vec<f64>,
}

impl ReferenceMatrices {
    fn new(basis: &LagrangeBasis) -> Result<Self> {
        let rule = quadrature((2 * basis.p).max(1))?;
        let tab = basis.tabulate(&rule.points);
        let n = basis.len();
        let mut stiff = [vec![0.0; n * n], vec![0.0; n * n], vec![0.0; n * n], vec![0.0; n * n]];
        let mut mass = vec![0.0; n * n];
        for (q, w) in rule.weights.iter().enumerate() {
            let (v, g) = (tab.values_at(q), tab.grads_at(q));
            for i in 0..n {
                for j in 0..n {
                    mass[i * n + j] += w * v[i] * v[j];
                    for a in 0..2 {
                        for b in 0..2 {
                            stiff[2 * a + b][i * n + j] += w * g[i][a] * g[j][b];
                        }
                    }
                }
            }
        }
        Ok(ReferenceMatrices { stiff, mass })
    }
}

struct ElementKernel<'a, P: Problem> {
    mesh: &'a Mesh,
    problem: &'a P,
    sampling: Sampling,
    n: usize,
    rule: QuadratureRule,
    tab: Tabulation,
    geom_tab: Option<Tabulation>,
    geom_centroid: Option<(Vec<f64>, Vec<[f64; 2]>)>,
    reference: ReferenceMatrices,
}

/// Local matrix (row-major) and load vector of one element.
type ElementData = (Vec<Complex64>, Vec<Complex64>);

#[inline]
fn inverse(j: &[[f64; 2]; 2], det: f64) -> [[f64; 2]; 2] {
    [[j[1][1] / det, -j[0][1] / det], [-j[1][0] / det, j[0][0] / det]]
}

/// `G A G^T` for real `G` and complex symmetric `A`.
#[inline]
fn congruence(g: &[[f64; 2]; 2], a: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            let mut s = ZERO;
            for k in 0..2 {
                for l in 0..2 {
                    s += a[k][l] * (g[r][k] * g[c][l]);
                }
            }
            out[r][c] = s;
        }
    }
    out
}

impl<'a, P: Problem> ElementKernel<'a, P> {
    fn new(mesh: &'a Mesh, p: usize, problem: &'a P, sampling: Sampling) -> Result<Self> {
        let basis = LagrangeBasis::new(p)?;
        let rule = quadrature(2 * p + 2 * (mesh.q - 1) + 2)?;
        let tab = basis.tabulate(&rule.points);
        let (geom_tab, geom_centroid) = match mesh.geometry_basis() {
            Some(gb) => (Some(gb.tabulate(&rule.points)), Some(gb.eval([1.0 / 3.0, 1.0 / 3.0]))),
            None => (None, None),
        };
        Ok(ElementKernel {
            mesh,
            problem,
            sampling,
            n: basis.len(),
            reference: ReferenceMatrices::new(&basis)?,
            rule,
            tab,
            geom_tab,
            geom_centroid,
        })
    }

    fn centroid(&self, t: usize) -> Point {
        match (self.mesh.curved_geometry(t), &self.geom_centroid) {
            (Some(nodes), Some((v, g))) => map_from_nodes(nodes, v, g).x,
            _ => {
                let [a, b, c] = self.mesh.vertex_coords(t);
                [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
            }
        }
    }

    fn source_is_zero(&self, t: usize) -> bool {
        let rs = self.mesh.vertex_coords(t).map(|v| v[0].hypot(v[1]));
        let h = self.mesh.measured_h;
        let lo = rs.iter().cloned().fold(f64::INFINITY, f64::min) - h;
        let hi = rs.iter().cloned().fold(0.0, f64::max) + h;
        self.problem.source_vanishes_on(lo.max(0.0), hi)
    }

    fn compute(&self, t: usize) -> Result<ElementData> {
        let n = self.n;
        let k2 = self.problem.wavenumber().powi(2);
        let region = self.mesh.regions[t];
        let mut mat = vec![ZERO; n * n];
        let mut load = vec![ZERO; n];
        let with_source = !self.source_is_zero(t);
        let affine = self.mesh.is_affine(t);

        if affine && self.sampling == Sampling::Midpoint {
            let (jac, det) = self.mesh.affine_jacobian(t);
            if !(det > 0.0) {
                return Err(Error::InvalidElement { element: t, det });
            }
            let xk = self.centroid(t);
            let mu = self.problem.mu(xk, region)?;
            let kk = congruence(&inverse(&jac, det), &self.problem.a(xk, region)?);
            let mass_coef = -k2 * mu * det;
            let s = &self.reference.stiff;
            for idx in 0..n * n {
                let stiff = kk[0][0] * s[0][idx] + kk[0][1] * s[1][idx] + kk[1][0] * s[2][idx] + kk[1][1] * s[3][idx];
                mat[idx] = stiff * det + mass_coef * self.reference.mass[idx];
            }
            if with_source {
                let a = self.mesh.vertices[self.mesh.triangles[t][0]];
                for (q, (xi, w)) in self.rule.points.iter().zip(&self.rule.weights).enumerate() {
                    let x = [
                        a[0] + jac[0][0] * xi[0] + jac[0][1] * xi[1],
                        a[1] + jac[1][0] * xi[0] + jac[1][1] * xi[1],
                    ];
                    let f = self.problem.source(x) * (w * det);
                    for (li, v) in load.iter_mut().zip(self.tab.values_at(q)) {
                        *li += f * *v;
                    }
                }
            }
            return Ok((mat, load));
        }

        let midpoint = if self.sampling == Sampling::Midpoint {
            let xk = self.centroid(t);
            Some((self.problem.mu(xk, region)?, self.problem.a(xk, region)?))
        } else {
            None
        };
        let curved = self.mesh.curved_geometry(t);
        let mut grads = vec![[0.0f64; 2]; n];
        let mut flux = vec![[ZERO; 2]; n];
        for (q, (xi, w)) in self.rule.points.iter().zip(&self.rule.weights).enumerate() {
            let map = match (curved, &self.geom_tab) {
                (Some(nodes), Some(gt)) => map_from_nodes(nodes, gt.values_at(q), gt.grads_at(q)),
                _ => self.mesh.element_map_unchecked(t, *xi),
            };
            if !(map.det > 0.0) {
                return Err(Error::InvalidElement { element: t, det: map.det });
            }
            let g = inverse(&map.jacobian, map.det);
            let (mu, a) = match midpoint {
                Some(c) => c,
                None => (self.problem.mu(map.x, region)?, self.problem.a(map.x, region)?),
            };
            let values = self.tab.values_at(q);
            for (gi, rg) in grads.iter_mut().zip(self.tab.grads_at(q)) {
                // grad phi = J^{-T} grad_ref phi
                *gi = [g[0][0] * rg[0] + g[1][0] * rg[1], g[0][1] * rg[0] + g[1][1] * rg[1]];
            }
            for (fl, gi) in flux.iter_mut().zip(&grads) {
                *fl = [a[0][0] * gi[0] + a[0][1] * gi[1], a[1][0] * gi[0] + a[1][1] * gi[1]];
            }
            let dw = w * map.det;
            let mass_coef = -k2 * mu * dw;
            for i in 0..n {
                let row = &mut mat[i * n..(i + 1) * n];
                let (gi, vi) = (grads[i], values[i]);
                for j in 0..n {
                    row[j] += (flux[j][0] * gi[0] + flux[j][1] * gi[1]) * dw + mass_coef * (vi * values[j]);
                }
            }
            if with_source {
                let f = self.problem.source(map.x) * dw;
                for (li, v) in load.iter_mut().zip(values) {
                    *li += f * *v;
                }
            }
        }
        Ok((mat, load))
    }
}

/// Row pattern of the global matrix: the union of the element dof sets
/// containing each row.
fn sparsity(dofmap: &DofMap) -> (Vec<usize>, Vec<usize>) {
    let n = dofmap.n_dofs;
    let nt = dofmap.num_cells();
    let mut count = vec![0usize; n + 1];
    for t in 0..nt {
        for &g in dofmap.cell(t) {
            count[g + 1] += 1;
        }
    }
    for i in 0..n {
        count[i + 1] += count[i];
    }
    let mut next = count.clone();
    let mut cells = vec![0u32; count[n]];
    for t in 0..nt {
        for &g in dofmap.cell(t) {
            cells[next[g]] = t as u32;
            next[g] += 1;
        }
    }
    let mut row_ptr = Vec::with_capacity(n + 1);
    row_ptr.push(0);
    let mut col_idx = Vec::new();
    let mut scratch = Vec::new();
    for i in 0..n {
        scratch.clear();
        for &t in &cells[count[i]..count[i + 1]] {
            scratch.extend_from_slice(dofmap.cell(t as usize));
        }
        scratch.sort_unstable();
        scratch.dedup();
        col_idx.extend_from_slice(&scratch);
        row_ptr.push(col_idx.len());
    }
    (row_ptr, col_idx)
}

const CHUNK: usize = 2048;

/// Assemble without boundary conditions. Element contributions are
/// computed under `exec` and summed in element order.
pub fn assemble_raw<P: Problem>(
    mesh: &Mesh,
    dofmap: &DofMap,
    problem: &P,
    sampling: Sampling,
    exec: Execution,
) -> Result<SparseSystem> {
    if dofmap.num_cells() != mesh.num_triangles() || dofmap.local_size != node_count(dofmap.p) {
        return Err(Error::Parameter("dof map does not match the mesh".into()));
    }
    let kernel = ElementKernel::new(mesh, dofmap.p, problem, sampling)?;
    let (row_ptr, col_idx) = sparsity(dofmap);
    let mut values = vec![ZERO; col_idx.len()];
    let mut rhs = vec![ZERO; dofmap.n_dofs];
    let n = kernel.n;
    let nt = mesh.num_triangles();
    let mut positions = vec![0usize; n * n];
    for chunk_start in (0..nt).step_by(CHUNK) {
        let chunk_end = (chunk_start + CHUNK).min(nt);
        let results = exec.map_range(chunk_end - chunk_start, |i| kernel.compute(chunk_start + i));
        for (off, res) in results.into_iter().enumerate() {
            let t = chunk_start + off;
            let (mat, load) = res?;
            let dofs = dofmap.cell(t);
            for (i, &gi) in dofs.iter().enumerate() {
                let row = &col_idx[row_ptr[gi]..row_ptr[gi + 1]];
                for (j, &gj) in dofs.iter().enumerate() {
                    positions[i * n + j] = row_ptr[gi] + row.binary_search(&gj).expect("pattern covers element");
                }
                rhs[gi] += load[i];
            }
            for (pos, v) in positions.iter().zip(&mat) {
                values[*pos] += *v;
            }
        }
    }
    Ok(SparseSystem {
        matrix: CsrMatrix {
            n_rows: dofmap.n_dofs,
            n_cols: dofmap.n_dofs,
            row_ptr,
            col_idx,
            values,
        },
        rhs,
    })
}

/// Assemble the scattering problem and eliminate the homogeneous
/// Dirichlet dofs.
pub fn assemble(mesh: &Mesh, dofmap: &DofMap, spec: &ProblemSpec, sampling: Sampling) -> Result<SparseSystem> {
    let raw = assemble_raw(mesh, dofmap, spec, sampling, Execution::default())?;
    apply_dirichlet(raw, dofmap)
}

/// Zero Dirichlet data: masked rows and columns are replaced by the
/// identity and their load entries set to zero.
pub fn apply_dirichlet(system: SparseSystem, dofmap: &DofMap) -> Result<SparseSystem> {
    eliminate(system, &dofmap.dirichlet_mask, &vec![ZERO; dofmap.n_dofs])
}

/// Dirichlet data `g`: masked dofs take the value `g(coord)`, their
/// couplings are moved to the right-hand side.
pub fn apply_dirichlet_inhomogeneous(
    system: SparseSystem,
    dofmap: &DofMap,
    g: impl Fn(Point) -> Complex64,
) -> Result<SparseSystem> {
    let values: Vec<Complex64> = dofmap
        .coords
        .iter()
        .zip(&dofmap.dirichlet_mask)
        .map(|(x, &m)| if m { g(*x) } else { ZERO })
        .collect();
    eliminate(system, &dofmap.dirichlet_mask, &values)
}

fn eliminate(system: SparseSystem, mask: &[bool], data: &[Complex64]) -> Result<SparseSystem> {
    let SparseSystem { matrix, mut rhs } = system;
    if mask.len() != matrix.n_rows || rhs.len() != matrix.n_rows {
        return Err(Error::Dimension {
            expected: matrix.n_rows,
            found: mask.len(),
        });
    }
    let n = matrix.n_rows;
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(matrix.nnz());
    let mut values = Vec::with_capacity(matrix.nnz());
    row_ptr.push(0);
    for i in 0..n {
        let (cols, vals) = matrix.row(i);
        if mask[i] {
            col_idx.push(i);
            values.push(Complex64::new(1.0, 0.0));
            rhs[i] = data[i];
        } else {
            for (&c, &v) in cols.iter().zip(vals) {
                if mask[c] {
                    rhs[i] -= v * data[c];
                } else {
                    col_idx.push(c);
                    values.push(v);
                }
            }
        }
        row_ptr.push(col_idx.len());
    }
    drop(matrix);
    Ok(SparseSystem {
        matrix: CsrMatrix {
            n_rows: n,
            n_cols: n,
            row_ptr,
            col_idx,
            values,
        },
        rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::ProblemKind;
    use crate::femcore::build_dofmap;
    use crate::mesh::{generate_polar, BoundaryTag};

    struct Constant {
        mu: f64,
        a: f64,
        k: f64,
    }

    impl Problem for Constant {
        fn wavenumber(&self) -> f64 {
            self.k
        }
        fn mu(&self, _: Point, _: Region) -> Result<Complex64> {
            Ok(Complex64::new(self.mu, 0.0))
        }
        fn a(&self, _: Point, _: Region) -> Result<Mat2> {
            let v = Complex64::new(self.a, 0.0);
            Ok([[v, ZERO], [ZERO, v]])
        }
        fn source(&self, _: Point) -> Complex64 {
            ZERO
        }
    }

    fn reference_triangle() -> Mesh {
        Mesh::from_triangles(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]], vec![Region::Physical], vec![]).unwrap()
    }

    fn dense(sys: &SparseSystem) -> Vec<Vec<Complex64>> {
        sys.matrix.to_dense()
    }

    #[test]
    fn p1_stiffness_on_reference_triangle() {
        let m = reference_triangle();
        let dm = build_dofmap(&m, 1, &[]).unwrap();
        let sys = assemble_raw(&m, &dm, &Constant { mu: 0.0, a: 1.0, k: 3.0 }, Sampling::Midpoint, Execution::Sequential).unwrap();
        let want = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        let d = dense(&sys);
        for i in 0..3 {
            for j in 0..3 {
                assert!((d[i][j] - Complex64::new(want[i][j], 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn p1_mass_on_reference_triangle() {
        let m = reference_triangle();
        let dm = build_dofmap(&m, 1, &[]).unwrap();
        let sys = assemble_raw(&m, &dm, &Constant { mu: 1.0, a: 0.0, k: 1.0 }, Sampling::PerPoint, Execution::Sequential).unwrap();
        let d = dense(&sys);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { -1.0 / 12.0 } else { -1.0 / 24.0 };
                assert!((d[i][j].re - want).abs() < 1e-14 && d[i][j].im == 0.0);
            }
        }
    }

    #[test]
    fn constant_coefficients_ignore_sampling() {
        let spec = ProblemSpec::new(ProblemKind::SoundSoft, 2.0);
        let mesh = generate_polar(&spec, 0.5, 2).unwrap();
        let dm = build_dofmap(&mesh, 2, &[]).unwrap();
        let pr = Constant { mu: 0.7, a: 1.3, k: 2.0 };
        let a = assemble_raw(&mesh, &dm, &pr, Sampling::Midpoint, Execution::Sequential).unwrap();
        let b = assemble_raw(&mesh, &dm, &pr, Sampling::PerPoint, Execution::Sequential).unwrap();
        for (x, y) in a.matrix.values.iter().zip(&b.matrix.values) {
            assert!((x - y).norm() <= 1e-12 * x.norm().max(1.0));
        }
    }

    #[test]
    fn assembled_matrix_is_complex_symmetric() {
        for kind in [ProblemKind::SoundSoft, ProblemKind::Penetrable] {
            let spec = ProblemSpec::new(kind, 4.0);
            for (p, q) in [(1, 1), (2, 2), (3, 3)] {
                let mesh = generate_polar(&spec, 0.6, q).unwrap();
                let dm = build_dofmap(&mesh, p, &[]).unwrap();
                for s in [Sampling::Midpoint, Sampling::PerPoint] {
                    let sys = assemble_raw(&mesh, &dm, &spec, s, Execution::Sequential).unwrap();
                    assert!(sys.matrix.is_structurally_symmetric());
                    assert!(sys.matrix.symmetry_defect() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn zero_source_gives_zero_load() {
        let spec = ProblemSpec::new(ProblemKind::Penetrable, 4.0);
        let mesh = generate_polar(&spec, 0.5, 2).unwrap();
        let dm = build_dofmap(&mesh, 2, &[]).unwrap();
        let sys = assemble_raw(&mesh, &dm, &FreeSpace { k: 4.0 }, Sampling::PerPoint, Execution::Sequential).unwrap();
        assert!(sys.rhs.iter().all(|v| *v == ZERO));
    }

    #[test]
    fn imaginary_entries_only_from_pml() {
        let spec = ProblemSpec::new(ProblemKind::SoundSoft, 3.0);
        let mesh = generate_polar(&spec, 0.5, 1).unwrap();
        let dm = build_dofmap(&mesh, 2, &[]).unwrap();
        let sys = assemble_raw(&mesh, &dm, &spec, Sampling::Midpoint, Execution::Sequential).unwrap();
        let mut pml_dof = vec![false; dm.n_dofs];
        for t in 0..mesh.num_triangles() {
            if mesh.regions[t] == Region::Pml {
                for &g in dm.cell(t) {
                    pml_dof[g] = true;
                }
            }
        }
        let mut saw_complex = false;
        for i in 0..dm.n_dofs {
            let (cols, vals) = sys.matrix.row(i);
            for (&j, v) in cols.iter().zip(vals) {
                if pml_dof[i] && pml_dof[j] {
                    saw_complex |= v.im.abs() > 1e-8;
                } else {
                    assert!(v.im.abs() <= 1e-14);
                }
            }
        }
        assert!(saw_complex);
    }

    #[test]
    fn sequential_and_parallel_are_bitwise_equal() {
        let spec = ProblemSpec::new(ProblemKind::Penetrable, 5.0);
        let mesh = generate_polar(&spec, 0.3, 3).unwrap();
        let dm = build_dofmap(&mesh, 3, &[BoundaryTag::OuterCircle]).unwrap();
        let a = assemble_raw(&mesh, &dm, &spec, Sampling::Midpoint, Execution::Sequential).unwrap();
        let b = assemble_raw(&mesh, &dm, &spec, Sampling::Midpoint, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn homogeneous_elimination() {
        let spec = ProblemSpec::new(ProblemKind::SoundSoft, 3.0);
        let mesh = generate_polar(&spec, 0.5, 1).unwrap();
        let dm = build_dofmap(&mesh, 2, &[BoundaryTag::InnerCircle, BoundaryTag::OuterCircle]).unwrap();
        let raw = assemble_raw(&mesh, &dm, &spec, Sampling::Midpoint, Execution::Sequential).unwrap();
        let hom = apply_dirichlet(raw.clone(), &dm).unwrap();
        let inh = apply_dirichlet_inhomogeneous(raw, &dm, |_| ZERO).unwrap();
        assert_eq!(hom, inh);
        for i in 0..dm.n_dofs {
            if dm.dirichlet_mask[i] {
                let (cols, vals) = hom.matrix.row(i);
                assert_eq!(cols, &[i]);
                assert_eq!(vals[0], Complex64::new(1.0, 0.0));
                assert_eq!(hom.rhs[i], ZERO);
            }
        }
        assert!(hom.matrix.is_structurally_symmetric());
    }

    #[test]
    fn constant_dirichlet_data_gives_constant_laplace_solution() {
        let mesh = Mesh::unit_square(6).unwrap();
        let dm = build_dofmap(&mesh, 2, &[BoundaryTag::Exterior]).unwrap();
        let raw = assemble_raw(&mesh, &dm, &Constant { mu: 0.0, a: 1.0, k: 1.0 }, Sampling::Midpoint, Execution::Sequential).unwrap();
        let c = Complex64::new(0.3, -1.2);
        let sys = apply_dirichlet_inhomogeneous(raw, &dm, |_| c).unwrap();
        let u = crate::linalg::solve(&sys.matrix, &sys.rhs, 1e-12).unwrap();
        assert!(u.iter().all(|v| (v - c).norm() < 1e-12));
    }
}
