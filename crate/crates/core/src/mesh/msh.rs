//! Gmsh MSH 2.2 ASCII reader and writer (3- and 6-node triangles).

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use super::{straight_lattice, BoundaryEdge, BoundaryTag, Mesh, MeshParts};
use crate::coefficients::{region_of, ProblemSpec};
use crate::femcore::EDGE_VERTICES;
use crate::{Error, Point, Result};

const CONFORMITY_TOL: f64 = 1e-9;
const CIRCLE_TOL: f64 = 1e-8;

pub fn read_msh(path: impl AsRef<Path>, spec: &ProblemSpec) -> Result<Mesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_msh(&text, path, spec)
}

struct Element {
    nodes: Vec<usize>,
}

/// Parse MSH text; `origin` is only used in error messages.
pub fn parse_msh(text: &str, origin: impl AsRef<Path>, spec: &ProblemSpec) -> Result<Mesh> {
    let origin = origin.as_ref();
    let fail = |msg: String| Error::format(origin, msg);
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let mut nodes: HashMap<usize, Point> = HashMap::new();
    let mut elements: Vec<Element> = Vec::new();
    let mut saw_format = false;

    while let Some(line) = lines.next() {
        match line {
            "$MeshFormat" => {
                let header = lines.next().ok_or_else(|| fail("truncated $MeshFormat".into()))?;
                let fields: Vec<&str> = header.split_whitespace().collect();
                if fields.len() < 3 || !fields[0].starts_with("2.") {
                    return Err(fail(format!("unsupported MSH version line '{header}'")));
                }
                if fields[1] != "0" {
                    return Err(fail("binary MSH files are not supported".into()));
                }
                saw_format = true;
                expect(&mut lines, "$EndMeshFormat", origin)?;
            }
            "$Nodes" => {
                let n = parse_count(lines.next(), origin)?;
                for _ in 0..n {
                    let l = lines.next().ok_or_else(|| fail("truncated $Nodes".into()))?;
                    let f: Vec<&str> = l.split_whitespace().collect();
                    if f.len() < 3 {
                        return Err(fail(format!("bad node line '{l}'")));
                    }
                    let id = parse_num::<usize>(f[0], origin)?;
                    let x = parse_num::<f64>(f[1], origin)?;
                    let y = parse_num::<f64>(f[2], origin)?;
                    nodes.insert(id, [x, y]);
                }
                expect(&mut lines, "$EndNodes", origin)?;
            }
            "$Elements" => {
                let n = parse_count(lines.next(), origin)?;
                for _ in 0..n {
                    let l = lines.next().ok_or_else(|| fail("truncated $Elements".into()))?;
                    let f: Vec<usize> = l
                        .split_whitespace()
                        .map(|s| parse_num::<usize>(s, origin))
                        .collect::<Result<_>>()?;
                    if f.len() < 3 {
                        return Err(fail(format!("bad element line '{l}'")));
                    }
                    let (kind, ntags) = (f[1], f[2]);
                    let conn = &f[(3 + ntags).min(f.len())..];
                    let expected = match kind {
                        2 => 3,
                        9 => 6,
                        1 | 8 | 15 => continue,
                        other => return Err(fail(format!("unsupported element type {other}"))),
                    };
                    if conn.len() != expected {
                        return Err(fail(format!("element line '{l}' has wrong node count")));
                    }
                    elements.push(Element {
                        nodes: conn.to_vec(),
                    });
                }
                expect(&mut lines, "$EndElements", origin)?;
            }
            s if s.starts_with('$') && !s.starts_with("$End") => {
                let end = format!("$End{}", &s[1..]);
                for l in lines.by_ref() {
                    if l == end {
                        break;
                    }
                }
            }
            other => return Err(fail(format!("unexpected line '{other}'"))),
        }
    }
    if !saw_format {
        return Err(fail("missing $MeshFormat".into()));
    }
    if elements.is_empty() {
        return Err(fail("no triangle elements".into()));
    }

    // Corner nodes become vertices, numbered by ascending node id.
    let mut corner_ids: Vec<usize> = elements.iter().flat_map(|e| e.nodes[..3].iter().copied()).collect();
    corner_ids.sort_unstable();
    corner_ids.dedup();
    let vertex_of: HashMap<usize, usize> = corner_ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let lookup = |id: usize| nodes.get(&id).copied().ok_or_else(|| fail(format!("unknown node {id}")));
    let vertices: Vec<Point> = corner_ids.iter().map(|id| lookup(*id)).collect::<Result<_>>()?;

    let q = if elements.iter().any(|e| e.nodes.len() == 6) { 2 } else { 1 };
    let mut triangles = Vec::with_capacity(elements.len());
    let mut curved = Vec::with_capacity(elements.len());
    let mut regions = Vec::with_capacity(elements.len());
    for e in &elements {
        let mut tri = [vertex_of[&e.nodes[0]], vertex_of[&e.nodes[1]], vertex_of[&e.nodes[2]]];
        let mut mids: Vec<Point> = e.nodes[3..].iter().map(|id| lookup(*id)).collect::<Result<_>>()?;
        let [a, b, c] = [vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]];
        let area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
        if area < 0.0 {
            tri.swap(1, 2);
            if mids.len() == 3 {
                mids = vec![mids[2], mids[1], mids[0]];
            }
        }
        let bary = [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0];
        regions.push(region_of(bary, spec)?);
        let geometry = if mids.len() == 3 {
            let mut lattice = straight_lattice(&vertices, tri, 2);
            let bent = (0..3).any(|i| {
                let m = lattice[3 + i];
                (m[0] - mids[i][0]).hypot(m[1] - mids[i][1]) > 1e-14 * (1.0 + m[0].hypot(m[1]))
            });
            if bent {
                lattice[3..6].copy_from_slice(&mids);
                Some(lattice)
            } else {
                None
            }
        } else {
            None
        };
        triangles.push(tri);
        curved.push(geometry);
    }

    check_conformity(&vertices, &triangles, spec)?;
    let boundary_edges = infer_boundary(&vertices, &triangles, spec);
    MeshParts {
        vertices,
        triangles,
        regions,
        boundary_edges,
        q,
        curved,
    }
    .build()
}

fn expect<'a>(lines: &mut impl Iterator<Item = &'a str>, tag: &str, origin: &Path) -> Result<()> {
    match lines.next() {
        Some(l) if l == tag => Ok(()),
        other => Err(Error::format(origin, format!("expected {tag}, found {other:?}"))),
    }
}

fn parse_num<T: std::str::FromStr>(s: &str, origin: &Path) -> Result<T> {
    s.parse().map_err(|_| Error::format(origin, format!("cannot parse number '{s}'")))
}

fn parse_count(line: Option<&str>, origin: &Path) -> Result<usize> {
    let l = line.ok_or_else(|| Error::format(origin, "missing count line"))?;
    parse_num(l, origin)
}

fn tagged_circles(spec: &ProblemSpec) -> [f64; 3] {
    [spec.scatterer_radius, spec.pml.start_radius, spec.outer_radius()]
}

fn check_conformity(vertices: &[Point], triangles: &[[usize; 3]], spec: &ProblemSpec) -> Result<()> {
    for (t, tri) in triangles.iter().enumerate() {
        for [a, b] in EDGE_VERTICES {
            let (pa, pb) = (vertices[tri[a]], vertices[tri[b]]);
            for radius in tagged_circles(spec) {
                let da = pa[0].hypot(pa[1]) - radius;
                let db = pb[0].hypot(pb[1]) - radius;
                if da * db < 0.0 && da.abs() > CONFORMITY_TOL && db.abs() > CONFORMITY_TOL {
                    return Err(Error::Validation(format!(
                        "edge of element {t} crosses the circle r = {radius}"
                    )));
                }
            }
        }
    }
    Ok(())
}

fn infer_boundary(vertices: &[Point], triangles: &[[usize; 3]], spec: &ProblemSpec) -> Vec<BoundaryEdge> {
    let mut count: BTreeMap<(usize, usize), (usize, usize, usize)> = BTreeMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        for (e, [a, b]) in EDGE_VERTICES.iter().enumerate() {
            let key = (tri[*a].min(tri[*b]), tri[*a].max(tri[*b]));
            count.entry(key).or_insert((t, e, 0)).2 += 1;
        }
    }
    let on = |v: usize, radius: f64| {
        let p = vertices[v];
        (p[0].hypot(p[1]) - radius).abs() <= CIRCLE_TOL
    };
    let mut edges: Vec<BoundaryEdge> = count
        .into_iter()
        .filter(|(_, (_, _, n))| *n == 1)
        .map(|((u, v), (t, e, _))| {
            let tag = if on(u, spec.outer_radius()) && on(v, spec.outer_radius()) {
                BoundaryTag::OuterCircle
            } else if on(u, spec.scatterer_radius) && on(v, spec.scatterer_radius) {
                BoundaryTag::InnerCircle
            } else {
                BoundaryTag::Exterior
            };
            BoundaryEdge {
                triangle: t,
                local_edge: e,
                tag,
            }
        })
        .collect();
    edges.sort_unstable();
    edges
}

/// Write the mesh as MSH 2.2 ASCII. Straight meshes use 3-node triangles,
/// `q = 2` meshes 6-node triangles; higher geometry degrees are rejected.
pub fn write_msh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    let text = format_msh(mesh)?;
    std::fs::write(path, text)?;
    Ok(())
}

pub(crate) fn format_msh(mesh: &Mesh) -> Result<String> {
    if mesh.q > 2 {
        return Err(Error::Parameter(format!(
            "MSH export supports geometry degree 1 or 2, mesh has {}",
            mesh.q
        )));
    }
    let nv = mesh.num_vertices();
    let mut extra: Vec<Point> = Vec::new();
    let mut mid_ids: Vec<[usize; 3]> = Vec::new();
    if mesh.q == 2 {
        let table = mesh.edges();
        let mut edge_node: Vec<Option<usize>> = vec![None; table.edges.len()];
        for t in 0..mesh.num_triangles() {
            let g = mesh.geometry_nodes(t);
            let mut ids = [0; 3];
            for e in 0..3 {
                let ge = table.triangle_edges[t][e];
                let id = *edge_node[ge].get_or_insert_with(|| {
                    extra.push(g[3 + e]);
                    nv + extra.len()
                });
                ids[e] = id;
            }
            mid_ids.push(ids);
        }
    }

    let mut s = String::new();
    s.push_str("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n");
    let _ = writeln!(s, "{}", nv + extra.len());
    for (i, p) in mesh.vertices.iter().chain(&extra).enumerate() {
        let _ = writeln!(s, "{} {:?} {:?} 0", i + 1, p[0], p[1]);
    }
    s.push_str("$EndNodes\n$Elements\n");
    let _ = writeln!(s, "{}", mesh.boundary_edges.len() + mesh.num_triangles());
    let mut id = 0;
    for be in &mesh.boundary_edges {
        id += 1;
        let tri = mesh.triangles[be.triangle];
        let [a, b] = EDGE_VERTICES[be.local_edge];
        let tag = be.tag.physical_id();
        let _ = writeln!(s, "{id} 1 2 {tag} {tag} {} {}", tri[a] + 1, tri[b] + 1);
    }
    for (t, tri) in mesh.triangles.iter().enumerate() {
        id += 1;
        let tag = mesh.regions[t].id();
        if mesh.q == 2 {
            let m = mid_ids[t];
            let _ = writeln!(
                s,
                "{id} 9 2 {tag} {tag} {} {} {} {} {} {}",
                tri[0] + 1,
                tri[1] + 1,
                tri[2] + 1,
                m[0],
                m[1],
                m[2]
            );
        } else {
            let _ = writeln!(s, "{id} 2 2 {tag} {tag} {} {} {}", tri[0] + 1, tri[1] + 1, tri[2] + 1);
        }
    }
    s.push_str("$EndElements\n");
    Ok(s)
}
