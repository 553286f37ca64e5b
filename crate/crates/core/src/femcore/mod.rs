//! Reference-element machinery: Lagrange bases on the reference triangle,
//! quadrature rules and the global degree-of-freedom map.
//!
//! The reference triangle has vertices `(0,0)`, `(1,0)`, `(0,1)`. Local
//! edge `e` runs from vertex `e` to vertex `(e+1) % 3`. Lattice nodes are
//! ordered vertices first, then edge nodes edge by edge (from the edge's
//! first vertex to its second), then interior nodes row by row.

mod basis;
mod dofmap;
mod quadrature;

pub use basis::{LagrangeBasis, Tabulation, MAX_BASIS_DEGREE};
pub use dofmap::{build_dofmap, DofMap};
pub use quadrature::{quadrature, QuadratureRule};

/// Local edge `e` joins local vertices `EDGE_VERTICES[e]`.
pub const EDGE_VERTICES: [[usize; 2]; 3] = [[0, 1], [1, 2], [2, 0]];

/// Number of lattice nodes of degree `p`.
pub const fn node_count(p: usize) -> usize {
    (p + 1) * (p + 2) / 2
}
