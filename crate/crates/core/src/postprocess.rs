//! Evaluation of discrete solutions and the total-field error functional.

use crate::exec::Execution;
use crate::femcore::{quadrature, DofMap, LagrangeBasis, Tabulation};
use crate::mesh::{map_from_nodes, MapSample, Mesh};
use crate::mie::{choose_truncation, Branch, FieldSample, MieSeries};
use crate::coefficients::{ProblemKind, ProblemSpec};
use crate::{Complex64, Error, Point, Result};

/// Radius up to which reference series are truncated for error evaluation.
pub const SERIES_RADIUS: f64 = 2.5;

/// Error of a discrete solution over the elements meeting the total-field
/// region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub err: f64,
    pub nor: f64,
    pub relative: f64,
    pub element_count: usize,
    pub k: f64,
    pub p: usize,
    pub q: usize,
    pub measured_h: f64,
}

fn segment_distance(x: Point, a: Point, b: Point) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 > 0.0 {
        (((x[0] - a[0]) * d[0] + (x[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (a[0] + t * d[0] - x[0]).hypot(a[1] + t * d[1] - x[1])
}

/// Euclidean distance from `x` to the closed triangle `tri`.
pub fn point_triangle_distance(x: Point, tri: [Point; 3]) -> f64 {
    let cross = |a: Point, b: Point| (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0]);
    let s = [cross(tri[0], tri[1]), cross(tri[1], tri[2]), cross(tri[2], tri[0])];
    if s.iter().all(|&v| v >= 0.0) || s.iter().all(|&v| v <= 0.0) {
        return 0.0;
    }
    (0..3)
        .map(|e| segment_distance(x, tri[e], tri[(e + 1) % 3]))
        .fold(f64::INFINITY, f64::min)
}

/// Triangles whose straight hull meets the closed disk of `radius` about
/// the origin.
pub fn select_elements(mesh: &Mesh, radius: f64) -> Result<Vec<usize>> {
    if !(radius > 0.0) {
        return Err(Error::Parameter(format!("selection radius must be positive, got {radius}")));
    }
    Ok((0..mesh.num_triangles())
        .filter(|&t| point_triangle_distance([0.0, 0.0], mesh.vertex_coords(t)) <= radius)
        .collect())
}

/// Tabulated geometry and solution bases on one quadrature rule.
struct Evaluator<'a> {
    mesh: &'a Mesh,
    dofmap: &'a DofMap,
    points: Vec<Point>,
    weights: Vec<f64>,
    tab: Tabulation,
    geom: Option<Tabulation>,
}

impl<'a> Evaluator<'a> {
    fn new(mesh: &'a Mesh, dofmap: &'a DofMap, points: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        let tab = LagrangeBasis::new(dofmap.p)?.tabulate(&points);
        let geom = mesh.geometry_basis().map(|b| b.tabulate(&points));
        Ok(Evaluator {
            mesh,
            dofmap,
            points,
            weights,
            tab,
            geom,
        })
    }

    fn map(&self, t: usize, q: usize) -> MapSample {
        match (self.mesh.curved_geometry(t), &self.geom) {
            (Some(nodes), Some(g)) => map_from_nodes(nodes, g.values_at(q), g.grads_at(q)),
            _ => self.mesh.element_map_unchecked(t, self.points[q]),
        }
    }

    fn eval(&self, solution: &[Complex64], t: usize, q: usize, map: &MapSample) -> FieldSample {
        let dofs = self.dofmap.cell(t);
        let mut value = Complex64::new(0.0, 0.0);
        let mut dref = [Complex64::new(0.0, 0.0); 2];
        for ((&g, v), d) in dofs.iter().zip(self.tab.values_at(q)).zip(self.tab.grads_at(q)) {
            let u = solution[g];
            value += u * *v;
            dref[0] += u * d[0];
            dref[1] += u * d[1];
        }
        let j = &map.jacobian;
        let det = map.det;
        let grad = [
            (dref[0] * j[1][1] - dref[1] * j[1][0]) / det,
            (dref[1] * j[0][0] - dref[0] * j[0][1]) / det,
        ];
        (value, grad)
    }
}

/// Value and physical gradient of the discrete field `solution` at the
/// reference point `xi` of triangle `t`.
pub fn fem_eval(mesh: &Mesh, dofmap: &DofMap, solution: &[Complex64], t: usize, xi: Point) -> Result<FieldSample> {
    if t >= mesh.num_triangles() || solution.len() != dofmap.n_dofs {
        return Err(Error::Dimension {
            expected: dofmap.n_dofs,
            found: solution.len(),
        });
    }
    let ev = Evaluator::new(mesh, dofmap, vec![xi], vec![1.0])?;
    let map = ev.map(t, 0);
    Ok(ev.eval(solution, t, 0, &map))
}

/// Squared error and squared reference norm summed over `elements`.
///
/// `exact(t, x)` supplies the reference field on element `t`. With
/// `weighted` the local norm is `|grad e|^2 + k^2 |e|^2`, otherwise
/// `|grad e|^2 + |e|^2`.
#[allow(clippy::too_many_arguments)]
pub fn field_error<F>(
    mesh: &Mesh,
    dofmap: &DofMap,
    solution: &[Complex64],
    elements: &[usize],
    k: f64,
    weighted: bool,
    degree: usize,
    exact: F,
    exec: Execution,
) -> Result<(f64, f64)>
where
    F: Fn(usize, Point) -> Result<FieldSample> + Sync + Send,
{
    if solution.len() != dofmap.n_dofs {
        return Err(Error::Dimension {
            expected: dofmap.n_dofs,
            found: solution.len(),
        });
    }
    let rule = quadrature(degree)?;
    let ev = Evaluator::new(mesh, dofmap, rule.points, rule.weights)?;
    let w0 = if weighted { k * k } else { 1.0 };
    let local = exec.map_slice(elements, |&t| -> Result<(f64, f64)> {
        let (mut e2, mut n2) = (0.0, 0.0);
        for q in 0..ev.points.len() {
            let map = ev.map(t, q);
            if !(map.det > 0.0) {
                return Err(Error::InvalidElement { element: t, det: map.det });
            }
            let (uh, guh) = ev.eval(solution, t, q, &map);
            let (u, gu) = exact(t, map.x)?;
            let dw = ev.weights[q] * map.det;
            let e = u - uh;
            e2 += dw * ((gu[0] - guh[0]).norm_sqr() + (gu[1] - guh[1]).norm_sqr() + w0 * e.norm_sqr());
            n2 += dw * (gu[0].norm_sqr() + gu[1].norm_sqr() + w0 * u.norm_sqr());
        }
        Ok((e2, n2))
    });
    let (mut e2, mut n2) = (0.0, 0.0);
    for r in local {
        let (a, b) = r?;
        e2 += a;
        n2 += b;
    }
    Ok((e2, n2))
}

/// Series branch used on element `t`: the interior series extended over
/// elements whose straight centroid lies in the penetrable disk, the
/// exterior series elsewhere.
pub fn element_branch(mesh: &Mesh, t: usize, spec: &ProblemSpec) -> Branch {
    let [a, b, c] = mesh.vertex_coords(t);
    let g = [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0];
    if spec.kind == ProblemKind::Penetrable && g[0].hypot(g[1]) < spec.scatterer_radius {
        Branch::ForceInner
    } else {
        Branch::ForceOuter
    }
}

/// Default error quadrature degree for solution degree `p`.
pub fn error_quadrature_degree(p: usize) -> usize {
    2 * p + 6
}

/// Error of `solution` against the extended Mie total field over the
/// elements meeting the disk of radius `spec.total_field_radius`.
pub fn total_field_error(
    mesh: &Mesh,
    dofmap: &DofMap,
    solution: &[Complex64],
    series: &MieSeries,
    spec: &ProblemSpec,
    weighted: bool,
) -> Result<ErrorReport> {
    total_field_error_with(
        mesh,
        dofmap,
        solution,
        series,
        spec,
        weighted,
        error_quadrature_degree(dofmap.p),
        Execution::default(),
    )
}

#[allow(clippy::too_many_arguments)]
pub fn total_field_error_with(
    mesh: &Mesh,
    dofmap: &DofMap,
    solution: &[Complex64],
    series: &MieSeries,
    spec: &ProblemSpec,
    weighted: bool,
    degree: usize,
    exec: Execution,
) -> Result<ErrorReport> {
    let elements = select_elements(mesh, spec.total_field_radius)?;
    let (e2, n2) = field_error(
        mesh,
        dofmap,
        solution,
        &elements,
        spec.k,
        weighted,
        degree,
        |t, x| series.eval(x, element_branch(mesh, t, spec)),
        exec,
    )?;
    let (err, nor) = (e2.sqrt(), n2.sqrt());
    Ok(ErrorReport {
        err,
        nor,
        relative: if nor > 0.0 { err / nor } else { 0.0 },
        element_count: elements.len(),
        k: spec.k,
        p: dofmap.p,
        q: mesh.q,
        measured_h: mesh.measured_h,
    })
}

/// The Mie series for `spec`, truncated for evaluation up to
/// [`SERIES_RADIUS`].
pub fn reference_series(spec: &ProblemSpec) -> Result<MieSeries> {
    crate::mie::solve(spec.kind, spec.k, choose_truncation(spec.k, SERIES_RADIUS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::Region;
    use crate::femcore::build_dofmap;
    use crate::mesh::generate_polar;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn single(tri: [Point; 3]) -> Mesh {
        Mesh::from_triangles(tri.to_vec(), vec![[0, 1, 2]], vec![Region::Physical], vec![]).unwrap()
    }

    fn brute_distance(tri: [Point; 3]) -> f64 {
        let n = 400;
        let mut best = f64::INFINITY;
        for i in 0..=n {
            for j in 0..=n - i {
                let (s, t) = (i as f64 / n as f64, j as f64 / n as f64);
                let x = [
                    tri[0][0] + s * (tri[1][0] - tri[0][0]) + t * (tri[2][0] - tri[0][0]),
                    tri[0][1] + s * (tri[1][1] - tri[0][1]) + t * (tri[2][1] - tri[0][1]),
                ];
                best = best.min(x[0].hypot(x[1]));
            }
        }
        best
    }

    #[test]
    fn selection_examples() {
        let around_origin = single([[-1.0, -1.0], [1.0, -1.0], [0.0, 1.0]]);
        assert_eq!(select_elements(&around_origin, 2.0).unwrap(), vec![0]);
        let far = single([[2.5, -3.0], [2.5, 3.0], [4.0, 0.0]]);
        assert!(select_elements(&far, 2.0).unwrap().is_empty());
        let outside = single([[2.0 + 1e-6, 0.0], [3.0, 1.0], [3.0, -1.0]]);
        assert!(select_elements(&outside, 2.0).unwrap().is_empty());
        let inside = single([[2.0 - 1e-6, 0.0], [3.0, 1.0], [3.0, -1.0]]);
        assert_eq!(select_elements(&inside, 2.0).unwrap(), vec![0]);
        assert!(select_elements(&inside, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn distance_matches_sampling(pts in proptest::array::uniform6(-4.0..4.0f64)) {
            let tri = [[pts[0], pts[1]], [pts[2], pts[3]], [pts[4], pts[5]]];
            let exact = point_triangle_distance([0.0, 0.0], tri);
            let sampled = brute_distance(tri);
            prop_assert!(exact <= sampled + 1e-12);
            prop_assert!(sampled - exact <= 0.05);
        }
    }

    fn polar(q: usize) -> Mesh {
        generate_polar(&ProblemSpec::new(ProblemKind::Penetrable, 2.0), 0.6, q).unwrap()
    }

    #[test]
    fn constant_interpolant_has_zero_gradient() {
        let mesh = polar(3);
        let dm = build_dofmap(&mesh, 3, &[]).unwrap();
        let u = vec![c(1.0); dm.n_dofs];
        for t in (0..mesh.num_triangles()).step_by(7) {
            let (v, g) = fem_eval(&mesh, &dm, &u, t, [0.2, 0.3]).unwrap();
            assert!((v - 1.0).norm() < 1e-12);
            assert!(g[0].norm() < 1e-11 && g[1].norm() < 1e-11);
        }
    }

    #[test]
    fn linear_interpolant_has_unit_gradient() {
        let mesh = polar(1);
        for p in 1..=4 {
            let dm = build_dofmap(&mesh, p, &[]).unwrap();
            let u = dm.interpolate(|x| c(x[0]));
            for t in (0..mesh.num_triangles()).step_by(5) {
                let (_, g) = fem_eval(&mesh, &dm, &u, t, [0.25, 0.5]).unwrap();
                assert!((g[0] - 1.0).norm() < 1e-12 && g[1].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn quadratic_reproduced_at_random_points() {
        let mesh = polar(1);
        let dm = build_dofmap(&mesh, 2, &[]).unwrap();
        let u = dm.interpolate(|x| c(x[0] * x[0]));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let t = rng.random_range(0..mesh.num_triangles());
            let (s, r) = (rng.random::<f64>(), rng.random::<f64>());
            let xi = [s * (1.0 - r), r];
            let x = mesh.element_map(t, xi).unwrap().x;
            let (v, g) = fem_eval(&mesh, &dm, &u, t, xi).unwrap();
            assert!((v - x[0] * x[0]).norm() < 1e-12);
            assert!((g[0] - 2.0 * x[0]).norm() < 1e-11);
        }
    }

    #[test]
    fn zero_solution_has_relative_error_one() {
        for kind in [ProblemKind::SoundSoft, ProblemKind::Penetrable] {
            let spec = ProblemSpec::new(kind, 3.0);
            let mesh = generate_polar(&spec, 0.4, 2).unwrap();
            let dm = build_dofmap(&mesh, 2, &[]).unwrap();
            let series = reference_series(&spec).unwrap();
            let rep = total_field_error(&mesh, &dm, &vec![c(0.0); dm.n_dofs], &series, &spec, true).unwrap();
            assert!(rep.nor > 0.0);
            assert_eq!(rep.err, rep.nor);
            assert_eq!(rep.relative, 1.0);
            assert!(rep.element_count > 0);
        }
    }

    fn interpolant(mesh: &Mesh, dm: &DofMap, series: &MieSeries, spec: &ProblemSpec) -> Vec<Complex64> {
        let mut u = vec![c(0.0); dm.n_dofs];
        let mut inner = vec![false; dm.n_dofs];
        for t in 0..mesh.num_triangles() {
            let b = element_branch(mesh, t, spec);
            for &g in dm.cell(t) {
                if !inner[g] {
                    u[g] = series.eval(dm.coords[g], b).unwrap().0;
                    inner[g] = b == Branch::ForceInner;
                }
            }
        }
        u
    }

    #[test]
    fn interpolant_of_reference_is_accurate() {
        let spec = ProblemSpec::new(ProblemKind::SoundSoft, 2.0);
        let mesh = generate_polar(&spec, 0.15, 4).unwrap();
        let dm = build_dofmap(&mesh, 4, &[]).unwrap();
        let series = reference_series(&spec).unwrap();
        let u = interpolant(&mesh, &dm, &series, &spec);
        let rep = total_field_error(&mesh, &dm, &u, &series, &spec, true).unwrap();
        assert!(rep.relative <= 1e-3, "{}", rep.relative);
    }

    #[test]
    fn doubling_quadrature_barely_changes_error() {
        for kind in [ProblemKind::SoundSoft, ProblemKind::Penetrable] {
            let spec = ProblemSpec::new(kind, 4.0);
            let mesh = generate_polar(&spec, 0.3, 2).unwrap();
            let dm = build_dofmap(&mesh, 2, &[]).unwrap();
            let series = reference_series(&spec).unwrap();
            let u = interpolant(&mesh, &dm, &series, &spec);
            let run = |deg| total_field_error_with(&mesh, &dm, &u, &series, &spec, true, deg, Execution::Sequential).unwrap();
            let (a, b) = (run(10), run(20));
            assert!((a.err - b.err).abs() <= 1e-8 * b.err, "{} {}", a.err, b.err);
        }
    }

    #[test]
    fn relative_error_is_phase_invariant() {
        let spec = ProblemSpec::new(ProblemKind::Penetrable, 3.0);
        let mesh = generate_polar(&spec, 0.4, 2).unwrap();
        let dm = build_dofmap(&mesh, 2, &[]).unwrap();
        let series = reference_series(&spec).unwrap();
        let u: Vec<Complex64> = interpolant(&mesh, &dm, &series, &spec).iter().map(|v| v * 1.01).collect();
        let phase = Complex64::from_polar(1.0, std::f64::consts::PI / 5.0);
        let base = total_field_error(&mesh, &dm, &u, &series, &spec, true).unwrap();
        let ur: Vec<Complex64> = u.iter().map(|v| v * phase).collect();
        let elements = select_elements(&mesh, 2.0).unwrap();
        let (e2, n2) = field_error(
            &mesh,
            &dm,
            &ur,
            &elements,
            spec.k,
            true,
            10,
            |t, x| {
                let (v, g) = series.eval(x, element_branch(&mesh, t, &spec))?;
                Ok((v * phase, [g[0] * phase, g[1] * phase]))
            },
            Execution::Sequential,
        )
        .unwrap();
        assert!(((e2 / n2).sqrt() - base.relative).abs() <= 1e-12);
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let spec = ProblemSpec::new(ProblemKind::Penetrable, 3.0);
        let mesh = generate_polar(&spec, 0.3, 2).unwrap();
        let dm = build_dofmap(&mesh, 2, &[]).unwrap();
        let series = reference_series(&spec).unwrap();
        let u = interpolant(&mesh, &dm, &series, &spec);
        let a = total_field_error_with(&mesh, &dm, &u, &series, &spec, true, 10, Execution::Sequential).unwrap();
        let b = total_field_error_with(&mesh, &dm, &u, &series, &spec, true, 10, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unweighted_norm_differs_from_weighted() {
        let spec = ProblemSpec::new(ProblemKind::SoundSoft, 3.0);
        let mesh = generate_polar(&spec, 0.4, 2).unwrap();
        let dm = build_dofmap(&mesh, 2, &[]).unwrap();
        let series = reference_series(&spec).unwrap();
        let zero = vec![c(0.0); dm.n_dofs];
        let w = total_field_error(&mesh, &dm, &zero, &series, &spec, true).unwrap();
        let u = total_field_error(&mesh, &dm, &zero, &series, &spec, false).unwrap();
        assert!(w.nor > u.nor);
    }
}
