use super::{node_count, LagrangeBasis, EDGE_VERTICES};
use crate::mesh::{BoundaryTag, Mesh};
use crate::{Error, Point, Result};

/// Global numbering of the degree-`p` Lagrange degrees of freedom.
///
/// Vertex dofs come first (numbered like the mesh vertices), then the
/// `p - 1` dofs of each global edge ordered from its lower-indexed vertex,
/// then the interior dofs of each element.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub p: usize,
    pub n_dofs: usize,
    pub local_size: usize,
    cell_dofs: Vec<usize>,
    pub dirichlet_mask: Vec<bool>,
    pub coords: Vec<Point>,
}

impl DofMap {
    #[inline]
    pub fn cell(&self, t: usize) -> &[usize] {
        &self.cell_dofs[t * self.local_size..(t + 1) * self.local_size]
    }

    pub fn num_cells(&self) -> usize {
        self.cell_dofs.len() / self.local_size
    }

    pub fn dirichlet_count(&self) -> usize {
        self.dirichlet_mask.iter().filter(|&&m| m).count()
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate<T>(&self, f: impl Fn(Point) -> T) -> Vec<T> {
        self.coords.iter().map(|x| f(*x)).collect()
    }
}

pub fn build_dofmap(mesh: &Mesh, p: usize, dirichlet_tags: &[BoundaryTag]) -> Result<DofMap> {
    if !(1..=4).contains(&p) {
        return Err(Error::Parameter(format!("polynomial degree must be in 1..=4, got {p}")));
    }
    let basis = LagrangeBasis::new(p)?;
    let nt = mesh.num_triangles();
    let nv = mesh.num_vertices();
    let local_size = node_count(p);
    let per_edge = p - 1;
    let n_interior = local_size - 3 - 3 * per_edge;

    let table = if p > 1 { Some(mesh.edges()) } else { None };
    let n_edges = table.as_ref().map_or(0, |t| t.edges.len());
    let edge_base = nv;
    let interior_base = nv + n_edges * per_edge;
    let n_dofs = interior_base + nt * n_interior;

    let mut cell_dofs = vec![0usize; nt * local_size];
    for t in 0..nt {
        let tri = mesh.triangles[t];
        let cell = &mut cell_dofs[t * local_size..(t + 1) * local_size];
        cell[..3].copy_from_slice(&tri);
        if let Some(table) = &table {
            for (e, [a, b]) in EDGE_VERTICES.iter().enumerate() {
                let ge = table.triangle_edges[t][e];
                let forward = tri[*a] < tri[*b];
                for (j, local) in basis.edge_interior_nodes(e).enumerate() {
                    let jj = if forward { j } else { per_edge - 1 - j };
                    cell[local] = edge_base + ge * per_edge + jj;
                }
            }
        }
        for (j, local) in basis.interior_nodes().enumerate() {
            cell[local] = interior_base + t * n_interior + j;
        }
    }

    let mut coords = vec![[f64::NAN; 2]; n_dofs];
    let mut filled = vec![false; n_dofs];
    for (v, x) in mesh.vertices.iter().enumerate() {
        coords[v] = *x;
        filled[v] = true;
    }
    for t in 0..nt {
        for (local, &g) in cell_dofs[t * local_size..(t + 1) * local_size].iter().enumerate() {
            if !filled[g] {
                coords[g] = mesh.element_map(t, basis.nodes[local])?.x;
                filled[g] = true;
            }
        }
    }

    let mut dirichlet_mask = vec![false; n_dofs];
    for be in mesh.boundary_edges.iter().filter(|b| dirichlet_tags.contains(&b.tag)) {
        let cell = &cell_dofs[be.triangle * local_size..(be.triangle + 1) * local_size];
        let [a, b] = EDGE_VERTICES[be.local_edge];
        dirichlet_mask[cell[a]] = true;
        dirichlet_mask[cell[b]] = true;
        for local in basis.edge_interior_nodes(be.local_edge) {
            dirichlet_mask[cell[local]] = true;
        }
    }

    Ok(DofMap {
        p,
        n_dofs,
        local_size,
        cell_dofs,
        dirichlet_mask,
        coords,
    })
}
