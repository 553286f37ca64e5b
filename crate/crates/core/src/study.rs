//! Single solves, wavenumber sweeps under the mesh law
//! `k^(2p+1) h^(2p) = C`, and manufactured-solution convergence checks.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use crate::assembly::{apply_dirichlet, apply_dirichlet_inhomogeneous, assemble_raw, FreeSpace, Sampling, SparseSystem};
use crate::coefficients::{ProblemKind, ProblemSpec};
use crate::exec::Execution;
use crate::femcore::{build_dofmap, DofMap};
use crate::linalg::{SparseLu, DEFAULT_TOL};
use crate::mesh::{generate_polar, BoundaryTag, Mesh};
use crate::postprocess::{error_quadrature_degree, field_error, reference_series, total_field_error, ErrorReport};
use crate::{Complex64, Error, Result};

/// Frequencies swept by default; `k = 2 pi f`.
pub const DEFAULT_F_LIST: [f64; 5] = [0.5, 1.0, 2.0, 4.0, 8.0];

/// Mesh-law constant matching the reference lines `h = 2 k^(-5/4)`,
/// `h = 3 k^(-7/6)` and `h = 6 k^(-9/8)` for `p = 2, 3, 4`.
pub fn default_c(p: usize) -> Option<f64> {
    match p {
        2 => Some(16.0),
        3 => Some(729.0),
        4 => Some(6f64.powi(8)),
        _ => None,
    }
}

/// Target mesh size `(C / k^(2p+1))^(1/(2p))`.
pub fn h_law(k: f64, p: usize, c: f64) -> Result<f64> {
    if !(k > 0.0) || !(c > 0.0) || p == 0 {
        return Err(Error::Parameter(format!("h_law needs k, C > 0 and p >= 1 (k={k}, C={c}, p={p})")));
    }
    let two_p = 2.0 * p as f64;
    Ok(((c.ln() - (two_p + 1.0) * k.ln()) / two_p).exp())
}

/// One line of a study table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyRecord {
    pub f: f64,
    pub hmax: f64,
    pub err: f64,
    pub nor: f64,
    pub dofs: usize,
    pub wall_seconds: f64,
}

impl StudyRecord {
    pub fn relative(&self) -> f64 {
        self.err / self.nor
    }

    /// Equality of everything except the timing column.
    pub fn same_result(&self, other: &StudyRecord) -> bool {
        self.f.to_bits() == other.f.to_bits()
            && self.hmax.to_bits() == other.hmax.to_bits()
            && self.err.to_bits() == other.err.to_bits()
            && self.nor.to_bits() == other.nor.to_bits()
            && self.dofs == other.dofs
    }
}

/// Options shared by the solve drivers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub p: usize,
    pub q: usize,
    pub sampling: Sampling,
    pub weighted: bool,
    pub exec: Execution,
}

impl SolveOptions {
    pub fn new(p: usize, q: usize) -> Self {
        SolveOptions {
            p,
            q,
            sampling: Sampling::Midpoint,
            weighted: true,
            exec: Execution::default(),
        }
    }
}

/// Boundary tags carrying the zero Dirichlet condition.
pub fn dirichlet_tags(kind: ProblemKind) -> &'static [BoundaryTag] {
    match kind {
        ProblemKind::SoundSoft => &[BoundaryTag::InnerCircle, BoundaryTag::OuterCircle],
        ProblemKind::Penetrable => &[BoundaryTag::OuterCircle],
    }
}

/// Dof map and Dirichlet-reduced system of the scattering problem on `mesh`.
pub fn discretize(spec: &ProblemSpec, mesh: &Mesh, p: usize, sampling: Sampling, exec: Execution) -> Result<(DofMap, SparseSystem)> {
    spec.validate()?;
    let dofmap = build_dofmap(mesh, p, dirichlet_tags(spec.kind))?;
    let raw = assemble_raw(mesh, &dofmap, spec, sampling, exec)?;
    let system = apply_dirichlet(raw, &dofmap)?;
    Ok((dofmap, system))
}

/// Factor and solve `system` directly with iterative refinement.
pub fn solve_system(system: &SparseSystem) -> Result<Vec<Complex64>> {
    let lu = SparseLu::factor(&system.matrix)?;
    let (x, _) = lu.solve_refined(&system.matrix, &system.rhs, DEFAULT_TOL)?;
    Ok(x)
}

/// Everything produced by one scattering solve.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub report: ErrorReport,
    pub record: StudyRecord,
    pub dofmap: DofMap,
    pub system: SparseSystem,
    pub solution: Vec<Complex64>,
}

/// Discretize, solve and measure the error on a given mesh.
pub fn solve_on_mesh(spec: &ProblemSpec, mesh: &Mesh, opts: &SolveOptions) -> Result<SolveOutcome> {
    let start = Instant::now();
    let (dofmap, system) = discretize(spec, mesh, opts.p, opts.sampling, opts.exec)?;
    let solution = solve_system(&system)?;
    let series = reference_series(spec)?;
    let report = total_field_error(mesh, &dofmap, &solution, &series, spec, opts.weighted)?;
    let record = StudyRecord {
        f: spec.k / (2.0 * PI),
        hmax: mesh.measured_h,
        err: report.err,
        nor: report.nor,
        dofs: dofmap.n_dofs,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    Ok(SolveOutcome {
        report,
        record,
        dofmap,
        system,
        solution,
    })
}

/// Generate the polar mesh for `h_target`, solve, and measure the error.
pub fn run_single(spec: &ProblemSpec, p: usize, q: usize, h_target: f64, sampling: Sampling) -> Result<(ErrorReport, StudyRecord)> {
    let opts = SolveOptions {
        sampling,
        ..SolveOptions::new(p, q)
    };
    run_single_with(spec, h_target, &opts)
}

pub fn run_single_with(spec: &ProblemSpec, h_target: f64, opts: &SolveOptions) -> Result<(ErrorReport, StudyRecord)> {
    let start = Instant::now();
    let mesh = generate_polar(spec, h_target, opts.q)?;
    let out = solve_on_mesh(spec, &mesh, opts)?;
    let record = StudyRecord {
        wall_seconds: start.elapsed().as_secs_f64(),
        ..out.record
    };
    Ok((out.report, record))
}

/// One solve per frequency with `h_target = h_law(2 pi f, p, C)`.
/// `base` supplies everything but the wavenumber.
pub fn run_study(base: &ProblemSpec, c: f64, f_list: &[f64], opts: &SolveOptions) -> Result<Vec<StudyRecord>> {
    if f_list.is_empty() {
        return Err(Error::Parameter("frequency list is empty".into()));
    }
    if f_list.iter().any(|f| !(*f > 0.0)) || f_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Parameter("frequencies must be positive and increasing".into()));
    }
    let mut records = Vec::with_capacity(f_list.len());
    for &f in f_list {
        let spec = ProblemSpec { k: 2.0 * PI * f, ..*base };
        let run = h_law(spec.k, opts.p, c).and_then(|h| run_single_with(&spec, h, opts));
        match run {
            Ok((_, record)) => records.push(record),
            Err(e) => return Err(Error::Computation(format!("study failed at f = {f}: {e}"))),
        }
    }
    Ok(records)
}

pub const CSV_HEADER: &str = "f hmax err nor dofs seconds";

pub fn format_csv(records: &[StudyRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(out, "{} {} {} {} {} {}", r.f, r.hmax, r.err, r.nor, r.dofs, r.wall_seconds);
    }
    out
}

pub fn write_csv(path: &Path, records: &[StudyRecord]) -> Result<()> {
    std::fs::write(path, format_csv(records))?;
    Ok(())
}

pub fn parse_csv(text: &str, origin: &str) -> Result<Vec<StudyRecord>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.split_whitespace().eq(CSV_HEADER.split_whitespace()) => {}
        _ => return Err(Error::format(origin, "missing or unexpected header")),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let bad = || Error::format(origin, format!("malformed record on data line {}", i + 1));
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 6 {
                return Err(bad());
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
            Ok(StudyRecord {
                f: num(cols[0])?,
                hmax: num(cols[1])?,
                err: num(cols[2])?,
                nor: num(cols[3])?,
                dofs: cols[4].parse().map_err(|_| bad())?,
                wall_seconds: num(cols[5])?,
            })
        })
        .collect()
}

pub fn read_csv(path: &Path) -> Result<Vec<StudyRecord>> {
    let text = std::fs::read_to_string(path)?;
    parse_csv(&text, &path.display().to_string())
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Parameter("slope needs at least two matching samples".into()));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::Domain("slope samples must be positive".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("slope samples share one abscissa".into()));
    }
    Ok(sxy / sxx)
}

/// Plane-wave convergence data on the unit square.
#[derive(Debug, Clone, PartialEq)]
pub struct Convergence {
    pub h: Vec<f64>,
    pub errors: Vec<f64>,
    pub rate: f64,
}

/// How the discrete field of a manufactured run is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManufacturedMode {
    Solve,
    /// Nodal interpolant of the exact solution.
    Interpolate,
}

/// `u = exp(i k (0.6 x + 0.8 y))` on the unit square with its own trace as
/// Dirichlet data; returns the `H^1_k` error slope over `h_list`.
pub fn manufactured_convergence(p: usize, k: f64, h_list: &[f64]) -> Result<Convergence> {
    manufactured_convergence_with(p, k, h_list, ManufacturedMode::Solve)
}

pub fn manufactured_convergence_with(p: usize, k: f64, h_list: &[f64], mode: ManufacturedMode) -> Result<Convergence> {
    if !(1..=4).contains(&p) {
        return Err(Error::Parameter(format!("degree must be in 1..=4, got {p}")));
    }
    if h_list.len() < 3 {
        return Err(Error::Parameter(format!("need at least 3 meshes, got {}", h_list.len())));
    }
    if !(k > 0.0) {
        return Err(Error::Parameter(format!("wavenumber must be positive, got {k}")));
    }
    let d = [0.6 * k, 0.8 * k];
    let exact = |x: [f64; 2]| {
        let v = Complex64::from_polar(1.0, d[0] * x[0] + d[1] * x[1]);
        let i = Complex64::new(0.0, 1.0);
        (v, [i * d[0] * v, i * d[1] * v])
    };
    let mut hs = Vec::with_capacity(h_list.len());
    let mut errors = Vec::with_capacity(h_list.len());
    for &h in h_list {
        if !(h > 0.0 && h <= 1.0) {
            return Err(Error::Parameter(format!("mesh size must be in (0, 1], got {h}")));
        }
        let n = (1.0 / h).round().max(1.0) as usize;
        let mesh = Mesh::unit_square(n)?;
        let dofmap = build_dofmap(&mesh, p, &[BoundaryTag::Exterior])?;
        let u = match mode {
            ManufacturedMode::Interpolate => dofmap.interpolate(|x| exact(x).0),
            ManufacturedMode::Solve => {
                let raw = assemble_raw(&mesh, &dofmap, &FreeSpace { k }, Sampling::Midpoint, Execution::default())?;
                let system = apply_dirichlet_inhomogeneous(raw, &dofmap, |x| exact(x).0)?;
                solve_system(&system)?
            }
        };
        let all: Vec<usize> = (0..mesh.num_triangles()).collect();
        let (e2, _) = field_error(
            &mesh,
            &dofmap,
            &u,
            &all,
            k,
            true,
            error_quadrature_degree(p),
            |_, x| Ok(exact(x)),
            Execution::default(),
        )?;
        hs.push(1.0 / n as f64);
        errors.push(e2.sqrt());
    }
    let rate = loglog_slope(&hs, &errors)?;
    Ok(Convergence { h: hs, errors, rate })
}

/// `H^1_k` distance between the Midpoint and PerPoint discrete solutions
/// on one mesh, relative to the PerPoint solution, over the whole domain.
pub fn sampling_difference(spec: &ProblemSpec, mesh: &Mesh, p: usize) -> Result<f64> {
    let exec = Execution::default();
    let (dofmap, mid) = discretize(spec, mesh, p, Sampling::Midpoint, exec)?;
    let (_, per) = discretize(spec, mesh, p, Sampling::PerPoint, exec)?;
    let (u_mid, u_per) = (solve_system(&mid)?, solve_system(&per)?);
    let diff: Vec<Complex64> = u_mid.iter().zip(&u_per).map(|(a, b)| a - b).collect();
    let all: Vec<usize> = (0..mesh.num_triangles()).collect();
    let zero = |_: usize, _: [f64; 2]| Ok((Complex64::new(0.0, 0.0), [Complex64::new(0.0, 0.0); 2]));
    let deg = error_quadrature_degree(p);
    let (d2, _) = field_error(mesh, &dofmap, &diff, &all, spec.k, true, deg, zero, exec)?;
    let (n2, _) = field_error(mesh, &dofmap, &u_per, &all, spec.k, true, deg, zero, exec)?;
    Ok((d2 / n2).sqrt())
}
