//! Triangular meshes with per-element polynomial geometry maps.
//!
//! Straight (affine) elements are described by their three vertices alone.
//! Curved elements additionally store the full lattice of degree-`q`
//! geometry nodes, in the local ordering of [`crate::femcore`].

mod msh;
mod polar;

pub use msh::{parse_msh, read_msh, write_msh};
pub use polar::generate_polar;

use crate::coefficients::Region;
use crate::femcore::{node_count, quadrature, LagrangeBasis, EDGE_VERTICES};
use crate::{Error, Point, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryTag {
    InnerCircle,
    OuterCircle,
    /// Any other boundary edge (e.g. the sides of a rectangular domain).
    Exterior,
}

impl BoundaryTag {
    pub fn physical_id(self) -> u32 {
        match self {
            BoundaryTag::InnerCircle => 11,
            BoundaryTag::OuterCircle => 12,
            BoundaryTag::Exterior => 13,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoundaryEdge {
    pub triangle: usize,
    pub local_edge: usize,
    pub tag: BoundaryTag,
}

/// Value and Jacobian of an element map at a reference point.
/// `jacobian[i][j] = d x_i / d xi_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapSample {
    pub x: Point,
    pub jacobian: [[f64; 2]; 2],
    pub det: f64,
}

const STRAIGHT: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub regions: Vec<Region>,
    pub boundary_edges: Vec<BoundaryEdge>,
    /// Geometry degree.
    pub q: usize,
    pub measured_h: f64,
    curved_slot: Vec<u32>,
    curved_nodes: Vec<Point>,
    geometry_basis: Option<LagrangeBasis>,
}

/// Global edges and the triangle-to-edge incidence.
#[derive(Debug, Clone)]
pub struct EdgeTable {
    /// `(lo, hi)` vertex pairs with `lo < hi`, sorted.
    pub edges: Vec<[usize; 2]>,
    pub triangle_edges: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementQuality {
    pub diameter: f64,
    /// Diameter over inradius of the straight triangle.
    pub shape_ratio: f64,
    /// Max over min of the Jacobian determinant at quadrature points.
    pub det_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct QualityReport {
    pub elements: Vec<ElementQuality>,
    pub max_shape_ratio: f64,
    pub max_det_ratio: f64,
    /// Elements with shape ratio above 10 or determinant ratio above 4.
    pub flagged: Vec<usize>,
}

pub const SHAPE_RATIO_LIMIT: f64 = 10.0;
pub const DET_RATIO_LIMIT: f64 = 4.0;

fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Point at fraction `t` along the straight edge from `a` to `b`.
pub(crate) fn lerp(a: Point, b: Point, t: f64) -> Point {
    [(1.0 - t) * a[0] + t * b[0], (1.0 - t) * a[1] + t * b[1]]
}

/// Maximum straight edge length over all triangles.
pub fn measured_h(vertices: &[Point], triangles: &[[usize; 3]]) -> f64 {
    triangles
        .iter()
        .flat_map(|t| EDGE_VERTICES.iter().map(move |[a, b]| dist(vertices[t[*a]], vertices[t[*b]])))
        .fold(0.0, f64::max)
}

impl Mesh {
    /// Straight mesh from raw parts. Triangles are reoriented to be
    /// counterclockwise; degenerate triangles are rejected.
    pub fn from_triangles(
        vertices: Vec<Point>,
        mut triangles: Vec<[usize; 3]>,
        regions: Vec<Region>,
        mut boundary_edges: Vec<BoundaryEdge>,
    ) -> Result<Mesh> {
        if regions.len() != triangles.len() {
            return Err(Error::Dimension {
                expected: triangles.len(),
                found: regions.len(),
            });
        }
        for (i, t) in triangles.iter_mut().enumerate() {
            if t.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::Validation(format!("triangle {i} references a missing vertex")));
            }
            let area = signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
            if area == 0.0 || !area.is_finite() {
                return Err(Error::InvalidElement { element: i, det: 2.0 * area });
            }
            if area < 0.0 {
                t.swap(1, 2);
                // Local edges 0 and 2 exchange, edge 1 keeps its vertices.
                for be in boundary_edges.iter_mut().filter(|be| be.triangle == i) {
                    be.local_edge = [2, 1, 0][be.local_edge];
                }
            }
        }
        let measured_h = measured_h(&vertices, &triangles);
        Ok(Mesh {
            curved_slot: vec![STRAIGHT; triangles.len()],
            vertices,
            triangles,
            regions,
            boundary_edges,
            q: 1,
            measured_h,
            curved_nodes: Vec::new(),
            geometry_basis: None,
        })
    }

    /// Uniform `n x n` grid of the unit square split into `2 n^2` triangles;
    /// every boundary edge is tagged [`BoundaryTag::Exterior`].
    pub fn unit_square(n: usize) -> Result<Mesh> {
        if n == 0 {
            return Err(Error::Parameter("unit square needs at least one cell".into()));
        }
        let nf = n as f64;
        let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            for i in 0..=n {
                vertices.push([i as f64 / nf, j as f64 / nf]);
            }
        }
        let id = |i: usize, j: usize| j * (n + 1) + i;
        let mut triangles = Vec::with_capacity(2 * n * n);
        let mut boundary = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let lower = triangles.len();
                triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
                let mut tag = |t, e| {
                    boundary.push(BoundaryEdge {
                        triangle: t,
                        local_edge: e,
                        tag: BoundaryTag::Exterior,
                    })
                };
                if j == 0 {
                    tag(lower, 0);
                }
                if i == n - 1 {
                    tag(lower, 1);
                }
                if j == n - 1 {
                    tag(lower + 1, 1);
                }
                if i == 0 {
                    tag(lower + 1, 2);
                }
            }
        }
        let regions = vec![Region::Physical; triangles.len()];
        Mesh::from_triangles(vertices, triangles, regions, boundary)
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_affine(&self, t: usize) -> bool {
        self.curved_slot[t] == STRAIGHT
    }

    pub fn curved_count(&self) -> usize {
        self.curved_slot.iter().filter(|&&s| s != STRAIGHT).count()
    }

    /// Stored geometry nodes of a curved element; `None` when the element
    /// is straight.
    pub fn curved_geometry(&self, t: usize) -> Option<&[Point]> {
        let slot = self.curved_slot[t];
        if slot == STRAIGHT {
            return None;
        }
        let n = node_count(self.q);
        let start = slot as usize * n;
        Some(&self.curved_nodes[start..start + n])
    }

    /// Degree-`q` geometry basis (only for `q >= 2`).
    pub fn geometry_basis(&self) -> Option<&LagrangeBasis> {
        self.geometry_basis.as_ref()
    }

    pub fn vertex_coords(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// All `(q+1)(q+2)/2` geometry nodes of element `t`. For straight
    /// elements the nodes are generated from the vertices; edge nodes are
    /// always computed from the lower-indexed endpoint so that neighbours
    /// produce identical values.
    pub fn geometry_nodes(&self, t: usize) -> Vec<Point> {
        if let Some(g) = self.curved_geometry(t) {
            return g.to_vec();
        }
        straight_lattice(&self.vertices, self.triangles[t], self.q)
    }

    /// Jacobian and determinant of a straight element.
    pub fn affine_jacobian(&self, t: usize) -> ([[f64; 2]; 2], f64) {
        let [a, b, c] = self.vertex_coords(t);
        let j = [[b[0] - a[0], c[0] - a[0]], [b[1] - a[1], c[1] - a[1]]];
        (j, j[0][0] * j[1][1] - j[0][1] * j[1][0])
    }

    /// Evaluate `F_K` and its Jacobian at a reference point. Fails when the
    /// determinant is not positive.
    pub fn element_map(&self, t: usize, xi: Point) -> Result<MapSample> {
        let s = self.element_map_unchecked(t, xi);
        if !(s.det > 0.0) {
            return Err(Error::InvalidElement { element: t, det: s.det });
        }
        Ok(s)
    }

    pub(crate) fn element_map_unchecked(&self, t: usize, xi: Point) -> MapSample {
        match (self.curved_geometry(t), &self.geometry_basis) {
            (Some(nodes), Some(basis)) => {
                let (values, grads) = basis.eval(xi);
                map_from_nodes(nodes, &values, &grads)
            }
            _ => {
                let a = self.vertices[self.triangles[t][0]];
                let (jacobian, det) = self.affine_jacobian(t);
                let x = [
                    a[0] + jacobian[0][0] * xi[0] + jacobian[0][1] * xi[1],
                    a[1] + jacobian[1][0] * xi[0] + jacobian[1][1] * xi[1],
                ];
                MapSample { x, jacobian, det }
            }
        }
    }

    /// Sum of `int det` over all elements, i.e. the area of the meshed domain.
    pub fn area(&self) -> Result<f64> {
        let rule = quadrature((2 * self.q).max(2))?;
        let mut total = 0.0;
        for t in 0..self.num_triangles() {
            if self.is_affine(t) {
                total += 0.5 * self.affine_jacobian(t).1;
            } else {
                for (x, w) in rule.points.iter().zip(&rule.weights) {
                    total += w * self.element_map_unchecked(t, *x).det;
                }
            }
        }
        Ok(total)
    }

    /// Check that every element map has positive determinant at the
    /// quadrature points of a rule of degree `2q`.
    pub fn validate(&self) -> Result<()> {
        let rule = quadrature((2 * self.q).max(2))?;
        for t in 0..self.num_triangles() {
            if self.is_affine(t) {
                let det = self.affine_jacobian(t).1;
                if !(det > 0.0) {
                    return Err(Error::InvalidElement { element: t, det });
                }
            } else {
                for x in &rule.points {
                    self.element_map(t, *x)?;
                }
            }
        }
        Ok(())
    }

    pub fn edges(&self) -> EdgeTable {
        let mut keyed: Vec<([usize; 2], usize)> = Vec::with_capacity(3 * self.triangles.len());
        for (t, tri) in self.triangles.iter().enumerate() {
            for (e, [a, b]) in EDGE_VERTICES.iter().enumerate() {
                let (u, v) = (tri[*a], tri[*b]);
                keyed.push(([u.min(v), u.max(v)], 3 * t + e));
            }
        }
        keyed.sort_unstable();
        let mut edges: Vec<[usize; 2]> = Vec::new();
        let mut triangle_edges = vec![[0usize; 3]; self.triangles.len()];
        for (key, slot) in keyed {
            if edges.last() != Some(&key) {
                edges.push(key);
            }
            triangle_edges[slot / 3][slot % 3] = edges.len() - 1;
        }
        EdgeTable {
            edges,
            triangle_edges,
        }
    }

    pub fn quality_report(&self) -> Result<QualityReport> {
        mesh_quality_report(self)
    }
}

pub(crate) fn straight_lattice(vertices: &[Point], tri: [usize; 3], q: usize) -> Vec<Point> {
    let [a, b, c] = [vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]];
    let mut nodes = vec![a, b, c];
    for [i, j] in EDGE_VERTICES {
        for s in 1..q {
            nodes.push(straight_edge_node(vertices, tri[i], tri[j], s, q));
        }
    }
    let qf = q as f64;
    for jb in 1..q {
        for ia in 1..q - jb {
            let (xi, eta) = (ia as f64 / qf, jb as f64 / qf);
            nodes.push([
                a[0] + xi * (b[0] - a[0]) + eta * (c[0] - a[0]),
                a[1] + xi * (b[1] - a[1]) + eta * (c[1] - a[1]),
            ]);
        }
    }
    nodes
}

/// Lattice node `s` (of `q`) on the edge from vertex `u` to vertex `v`,
/// computed from the lower-indexed endpoint.
pub(crate) fn straight_edge_node(vertices: &[Point], u: usize, v: usize, s: usize, q: usize) -> Point {
    if u < v {
        lerp(vertices[u], vertices[v], s as f64 / q as f64)
    } else {
        lerp(vertices[v], vertices[u], (q - s) as f64 / q as f64)
    }
}

pub(crate) fn map_from_nodes(nodes: &[Point], values: &[f64], grads: &[[f64; 2]]) -> MapSample {
    let mut x = [0.0; 2];
    let mut jac = [[0.0; 2]; 2];
    for ((g, v), d) in nodes.iter().zip(values).zip(grads) {
        for i in 0..2 {
            x[i] += g[i] * v;
            jac[i][0] += g[i] * d[0];
            jac[i][1] += g[i] * d[1];
        }
    }
    MapSample {
        x,
        jacobian: jac,
        det: jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0],
    }
}

pub fn mesh_quality_report(mesh: &Mesh) -> Result<QualityReport> {
    let rule = quadrature((2 * mesh.q).max(2))?;
    let mut elements = Vec::with_capacity(mesh.num_triangles());
    let mut flagged = Vec::new();
    for t in 0..mesh.num_triangles() {
        let [a, b, c] = mesh.vertex_coords(t);
        let (la, lb, lc) = (dist(b, c), dist(c, a), dist(a, b));
        let diameter = la.max(lb).max(lc);
        let area = signed_area(a, b, c).abs();
        let inradius = 2.0 * area / (la + lb + lc);
        let shape_ratio = diameter / inradius;
        let det_ratio = if mesh.is_affine(t) {
            1.0
        } else {
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for x in &rule.points {
                let d = mesh.element_map_unchecked(t, *x).det;
                lo = lo.min(d);
                hi = hi.max(d);
            }
            if lo > 0.0 {
                hi / lo
            } else {
                f64::INFINITY
            }
        };
        if shape_ratio > SHAPE_RATIO_LIMIT || det_ratio > DET_RATIO_LIMIT {
            flagged.push(t);
        }
        elements.push(ElementQuality {
            diameter,
            shape_ratio,
            det_ratio,
        });
    }
    let max_shape_ratio = elements.iter().map(|e| e.shape_ratio).fold(0.0, f64::max);
    let max_det_ratio = elements.iter().map(|e| e.det_ratio).fold(0.0, f64::max);
    Ok(QualityReport {
        elements,
        max_shape_ratio,
        max_det_ratio,
        flagged,
    })
}

/// Builder shared by the generator and the MSH reader.
pub(crate) struct MeshParts {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub regions: Vec<Region>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub q: usize,
    /// Geometry lattice for curved elements, `None` for straight ones.
    pub curved: Vec<Option<Vec<Point>>>,
}

impl MeshParts {
    pub fn build(self) -> Result<Mesh> {
        let geometry_basis = if self.q >= 2 {
            Some(LagrangeBasis::new(self.q)?)
        } else {
            None
        };
        let n = node_count(self.q);
        let mut curved_slot = vec![STRAIGHT; self.triangles.len()];
        let mut curved_nodes = Vec::new();
        let mut count = 0u32;
        for (t, c) in self.curved.into_iter().enumerate() {
            if let Some(nodes) = c {
                if nodes.len() != n {
                    return Err(Error::Dimension {
                        expected: n,
                        found: nodes.len(),
                    });
                }
                curved_slot[t] = count;
                count += 1;
                curved_nodes.extend(nodes);
            }
        }
        let measured_h = measured_h(&self.vertices, &self.triangles);
        let mesh = Mesh {
            vertices: self.vertices,
            triangles: self.triangles,
            regions: self.regions,
            boundary_edges: self.boundary_edges,
            q: self.q,
            measured_h,
            curved_slot,
            curved_nodes,
            geometry_basis,
        };
        mesh.validate()?;
        Ok(mesh)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(vertices: Vec<Point>) -> Mesh {
        Mesh::from_triangles(vertices, vec![[0, 1, 2]], vec![Region::Physical], vec![]).unwrap()
    }

    #[test]
    fn measured_h_of_unit_triangle() {
        let m = single(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        assert!((m.measured_h - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn identity_map() {
        let m = single(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let s = m.element_map(0, [0.3, 0.2]).unwrap();
        assert_eq!(s.x, [0.3, 0.2]);
        assert_eq!(s.jacobian, [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(s.det, 1.0);
    }

    #[test]
    fn scaled_map() {
        let m = single(vec![[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]]);
        for xi in [[0.0, 0.0], [0.2, 0.7], [1.0, 0.0]] {
            assert_eq!(m.element_map(0, xi).unwrap().det, 4.0);
        }
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let m = single(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]);
        assert!(m.affine_jacobian(0).1 > 0.0);
    }

    #[test]
    fn equilateral_shape_ratio() {
        let m = single(vec![[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]]);
        let r = m.quality_report().unwrap();
        assert!((r.elements[0].shape_ratio - 2.0 * 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.elements[0].det_ratio, 1.0);
    }

    #[test]
    fn unit_square_counts() {
        let m = Mesh::unit_square(4).unwrap();
        assert_eq!(m.num_triangles(), 32);
        assert_eq!(m.num_vertices(), 25);
        assert_eq!(m.boundary_edges.len(), 16);
        assert!((m.area().unwrap() - 1.0).abs() < 1e-14);
        let e = m.edges();
        assert_eq!(e.edges.len(), 25 + 32 - 1);
    }
}
