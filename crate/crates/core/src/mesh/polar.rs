//! Structured polar triangulation of the disk / annulus geometries.

use std::f64::consts::PI;

use super::{straight_lattice, BoundaryEdge, BoundaryTag, Mesh, MeshParts};
use crate::coefficients::{ProblemKind, ProblemSpec, Region};
use crate::femcore::{LagrangeBasis, MAX_BASIS_DEGREE};
use crate::{Error, Point, Result};

/// Largest accepted target size: the thinnest annulus (the PML) must still
/// get at least one layer.
const MAX_H: f64 = 1.0;

struct Ring {
    /// Radius of the tagged circle this ring lies on.
    circle: Option<f64>,
    first: usize,
    count: usize,
    offset: f64,
}

impl Ring {
    fn angle(&self, i: usize) -> f64 {
        2.0 * PI * (i as f64 + self.offset) / self.count as f64
    }
}

/// A triangle together with the local edge lying on a ring, if that ring is
/// a tagged circle.
struct Cell {
    tri: [usize; 3],
    region: Region,
    circle_edge: Option<(usize, f64)>,
}

/// Concentric-ring triangulation of `B_R` (penetrable) or `B_R \ B_1`
/// (sound-soft) conforming to the circles at the scatterer, PML and outer
/// radii. For `q >= 2` edges on those circles are mapped onto the arcs.
pub fn generate_polar(spec: &ProblemSpec, h_target: f64, q: usize) -> Result<Mesh> {
    spec.validate()?;
    if !(h_target > 0.0 && h_target <= MAX_H) {
        return Err(Error::Parameter(format!(
            "target mesh size must be in (0, {MAX_H}], got {h_target}"
        )));
    }
    if !(1..=MAX_BASIS_DEGREE).contains(&q) {
        return Err(Error::Parameter(format!(
            "geometry degree must be in 1..={MAX_BASIS_DEGREE}, got {q}"
        )));
    }
    let r_sc = spec.scatterer_radius;
    let r_pml = spec.pml.start_radius;
    let r_out = spec.outer_radius();
    let mut annuli = Vec::new();
    if spec.kind == ProblemKind::Penetrable {
        annuli.push((0.0, r_sc, Region::Inner));
    }
    annuli.push((r_sc, r_pml, Region::Physical));
    annuli.push((r_pml, r_out, Region::Pml));

    let mut vertices: Vec<Point> = Vec::new();
    let mut rings: Vec<Ring> = Vec::new();
    let mut ring_region: Vec<Region> = Vec::new();
    let push_ring = |radius: f64, circle: Option<f64>, vertices: &mut Vec<Point>, rings: &mut Vec<Ring>| {
        let count = ((2.0 * PI * radius / h_target).ceil() as usize).max(8);
        let offset = if circle.is_none() && rings.len() % 2 == 1 { 0.5 } else { 0.0 };
        let ring = Ring {
            circle,
            first: vertices.len(),
            count,
            offset,
        };
        for i in 0..count {
            let th = ring.angle(i);
            vertices.push([radius * th.cos(), radius * th.sin()]);
        }
        rings.push(ring);
    };

    if spec.kind == ProblemKind::Penetrable {
        vertices.push([0.0, 0.0]);
    } else {
        push_ring(r_sc, Some(r_sc), &mut vertices, &mut rings);
        ring_region.push(Region::Physical);
    }
    for &(r0, r1, region) in &annuli {
        let layers = ((r1 - r0) / h_target - 1e-9).ceil().max(1.0) as usize;
        for j in 1..=layers {
            let (radius, circle) = if j == layers {
                (r1, Some(r1))
            } else {
                (r0 + (r1 - r0) * j as f64 / layers as f64, None)
            };
            push_ring(radius, circle, &mut vertices, &mut rings);
            ring_region.push(region);
        }
    }

    let mut cells: Vec<Cell> = Vec::new();
    if spec.kind == ProblemKind::Penetrable {
        let ring = &rings[0];
        for i in 0..ring.count {
            let a = ring.first + i;
            let b = ring.first + (i + 1) % ring.count;
            cells.push(Cell {
                tri: [0, a, b],
                region: ring_region[0],
                circle_edge: ring.circle.map(|r| (1, r)),
            });
        }
    }
    for w in 1..rings.len() {
        zipper(&rings[w - 1], &rings[w], ring_region[w], &vertices, &mut cells);
    }

    let outer_ring = rings.len() - 1;
    let inner_ring_first = rings[0].first;
    let inner_ring_end = inner_ring_first + rings[0].count;
    let outer_first = rings[outer_ring].first;
    let mut boundary_edges = Vec::new();
    for (t, cell) in cells.iter().enumerate() {
        if let Some((e, _)) = cell.circle_edge {
            let [a, b] = crate::femcore::EDGE_VERTICES[e];
            let (u, v) = (cell.tri[a], cell.tri[b]);
            let on_outer = u >= outer_first && v >= outer_first;
            let on_inner = spec.kind == ProblemKind::SoundSoft
                && (inner_ring_first..inner_ring_end).contains(&u)
                && (inner_ring_first..inner_ring_end).contains(&v);
            let tag = if on_outer {
                Some(BoundaryTag::OuterCircle)
            } else if on_inner {
                Some(BoundaryTag::InnerCircle)
            } else {
                None
            };
            if let Some(tag) = tag {
                boundary_edges.push(BoundaryEdge {
                    triangle: t,
                    local_edge: e,
                    tag,
                });
            }
        }
    }

    let curved: Vec<Option<Vec<Point>>> = if q >= 2 {
        let basis = LagrangeBasis::new(q)?;
        cells
            .iter()
            .map(|c| {
                c.circle_edge
                    .map(|(e, radius)| curved_lattice(&vertices, c.tri, e, radius, &basis))
            })
            .collect()
    } else {
        vec![None; cells.len()]
    };

    MeshParts {
        triangles: cells.iter().map(|c| c.tri).collect(),
        regions: cells.iter().map(|c| c.region).collect(),
        vertices,
        boundary_edges,
        q,
        curved,
    }
    .build()
}

/// Triangulate the strip between ring `a` (inner) and ring `b` (outer),
/// always adding the triangle whose new diagonal is shorter.
fn zipper(a: &Ring, b: &Ring, region: Region, vertices: &[Point], cells: &mut Vec<Cell>) {
    let base = a.angle(0);
    let rel = |ring: &Ring, i: usize| (ring.angle(i) - base).rem_euclid(2.0 * PI);
    let b_start = (0..b.count)
        .min_by(|&i, &j| rel(b, i).total_cmp(&rel(b, j)))
        .unwrap_or(0);
    let av = |i: usize| a.first + i % a.count;
    let bv = |j: usize| b.first + (b_start + j) % b.count;
    let d2 = |u: usize, v: usize| {
        let (p, q) = (vertices[u], vertices[v]);
        (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)
    };
    let (mut i, mut j) = (0, 0);
    while i < a.count || j < b.count {
        let advance_a = if i == a.count {
            false
        } else if j == b.count {
            true
        } else {
            d2(av(i + 1), bv(j)) <= d2(av(i), bv(j + 1))
        };
        if advance_a {
            cells.push(Cell {
                tri: [av(i), bv(j), av(i + 1)],
                region,
                circle_edge: a.circle.map(|r| (2, r)),
            });
            i += 1;
        } else {
            cells.push(Cell {
                tri: [av(i), bv(j), bv(j + 1)],
                region,
                circle_edge: b.circle.map(|r| (1, r)),
            });
            j += 1;
        }
    }
}

/// Point at fraction `t` of the shorter arc of radius `radius` from `p` to `q`.
fn arc_point(p: Point, q: Point, t: f64, radius: f64) -> Point {
    let t0 = p[1].atan2(p[0]);
    let mut dt = q[1].atan2(q[0]) - t0;
    if dt > PI {
        dt -= 2.0 * PI;
    } else if dt < -PI {
        dt += 2.0 * PI;
    }
    let th = t0 + t * dt;
    [radius * th.cos(), radius * th.sin()]
}

/// Lattice node `s` (of `q`) on the arc from vertex `u` to vertex `v`,
/// computed from the lower-indexed endpoint.
fn arc_edge_node(vertices: &[Point], u: usize, v: usize, s: usize, q: usize, radius: f64) -> Point {
    if u < v {
        arc_point(vertices[u], vertices[v], s as f64 / q as f64, radius)
    } else {
        arc_point(vertices[v], vertices[u], (q - s) as f64 / q as f64, radius)
    }
}

/// Geometry lattice of an element whose local edge `e` lies on a circle:
/// the edge is mapped onto the arc and the correction is blended linearly
/// into the element.
fn curved_lattice(
    vertices: &[Point],
    tri: [usize; 3],
    e: usize,
    radius: f64,
    basis: &LagrangeBasis,
) -> Vec<Point> {
    let q = basis.p;
    let [ia, ib] = crate::femcore::EDGE_VERTICES[e];
    let ic = 3 - ia - ib;
    let (va, vb, vc) = (vertices[tri[ia]], vertices[tri[ib]], vertices[tri[ic]]);
    let mut nodes = straight_lattice(vertices, tri, q);
    for s in 1..q {
        let idx = basis.edge_interior_nodes(e).start + s - 1;
        nodes[idx] = arc_edge_node(vertices, tri[ia], tri[ib], s, q, radius);
    }
    // Other edges stay straight and keep their canonical nodes.
    for idx in basis.interior_nodes() {
        let [xi, eta] = basis.nodes[idx];
        let lam = [1.0 - xi - eta, xi, eta];
        let (la, lb, lc) = (lam[ia], lam[ib], lam[ic]);
        let sum = la + lb;
        let arc = arc_point(va, vb, lb / sum, radius);
        let chord = [(la * va[0] + lb * vb[0]) / sum, (la * va[1] + lb * vb[1]) / sum];
        nodes[idx] = [
            la * va[0] + lb * vb[0] + lc * vc[0] + sum * (arc[0] - chord[0]),
            la * va[1] + lb * vb[1] + lc * vc[1] + sum * (arc[1] - chord[1]),
        ];
    }
    nodes
}
