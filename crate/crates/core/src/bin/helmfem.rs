#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use helmfem::assembly::Sampling;
use helmfem::coefficients::{ProblemKind, ProblemSpec, Region};
use helmfem::linalg::{write_matrix_market, write_vector_market};
use helmfem::mesh::{generate_polar, read_msh, write_msh, Mesh};
use helmfem::mie::Branch;
use helmfem::postprocess::reference_series;
use helmfem::study::{
    default_c, format_csv, h_law, manufactured_convergence, run_study, solve_on_mesh, write_csv, SolveOptions,
    StudyRecord, DEFAULT_F_LIST,
};
use helmfem::{Error, Result};

#[derive(Parser)]
#[command(name = "helmfem", version, about = "High-order FEM for Helmholtz scattering by a disk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scattering problem and report the total-field error.
    Solve(SolveArgs),
    /// Sweep frequencies under the mesh law k^(2p+1) h^(2p) = C.
    Study(StudyArgs),
    /// Plane-wave convergence on the unit square.
    Manufactured(ManufacturedArgs),
    /// Generate, inspect or export meshes.
    Mesh {
        #[command(subcommand)]
        action: MeshAction,
    },
    /// Evaluate the analytic reference field on a grid.
    Mie(MieArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Soundsoft,
    Penetrable,
}

impl From<ProblemArg> for ProblemKind {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Soundsoft => ProblemKind::SoundSoft,
            ProblemArg::Penetrable => ProblemKind::Penetrable,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplingArg {
    Midpoint,
    Perpoint,
}

impl From<SamplingArg> for Sampling {
    fn from(s: SamplingArg) -> Self {
        match s {
            SamplingArg::Midpoint => Sampling::Midpoint,
            SamplingArg::Perpoint => Sampling::PerPoint,
        }
    }
}

#[derive(Args)]
struct Discretization {
    #[arg(long, value_enum, default_value = "soundsoft")]
    problem: ProblemArg,
    /// Polynomial degree of the finite element space.
    #[arg(long, default_value_t = 2)]
    p: usize,
    /// Geometry degree of the curved boundary elements.
    #[arg(long, default_value_t = 1)]
    q: usize,
    #[arg(long, value_enum, default_value = "midpoint")]
    sampling: SamplingArg,
    /// Use the k-weighted H^1 norm.
    #[arg(long = "weighted-norm", default_value_t = true, action = ArgAction::Set)]
    weighted_norm: bool,
}

impl Discretization {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            sampling: self.sampling.into(),
            weighted: self.weighted_norm,
            ..SolveOptions::new(self.p, self.q)
        }
    }

    fn mesh_constant(&self, c: Option<f64>) -> Result<f64> {
        c.or_else(|| default_c(self.p))
            .ok_or_else(|| Error::Parameter(format!("no default C for p = {}; pass --C", self.p)))
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    disc: Discretization,
    /// Wavenumber.
    #[arg(long, conflicts_with = "f")]
    k: Option<f64>,
    /// Frequency, k = 2 pi f.
    #[arg(long)]
    f: Option<f64>,
    /// Mesh-law constant.
    #[arg(long = "C", conflicts_with = "h")]
    c: Option<f64>,
    /// Target mesh size.
    #[arg(long)]
    h: Option<f64>,
    /// Read the mesh from a gmsh 2.2 ASCII file instead of generating it.
    #[arg(long = "mesh-in")]
    mesh_in: Option<PathBuf>,
    /// Write the system matrix (and the load vector beside it) in Matrix Market format.
    #[arg(long = "dump-matrix")]
    dump_matrix: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StudyArgs {
    #[command(flatten)]
    disc: Discretization,
    /// Comma-separated frequencies.
    #[arg(long = "f-list", value_delimiter = ',', default_values_t = DEFAULT_F_LIST.to_vec())]
    f_list: Vec<f64>,
    #[arg(long = "C")]
    c: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ManufacturedArgs {
    #[arg(long, default_value_t = 1)]
    p: usize,
    #[arg(long, default_value_t = 2.0)]
    k: f64,
    /// Comma-separated mesh sizes.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.125, 0.0625, 0.03125])]
    h: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum MeshAction {
    /// Generate a polar mesh and write it as gmsh 2.2 ASCII.
    Generate {
        #[arg(long, value_enum, default_value = "soundsoft")]
        problem: ProblemArg,
        #[arg(long)]
        h: f64,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print size, region and quality statistics of a mesh file.
    Inspect {
        #[arg(long, value_enum, default_value = "soundsoft")]
        problem: ProblemArg,
        #[arg(long = "mesh-in")]
        mesh_in: PathBuf,
    },
    /// Read a mesh file, validate it and write it back in canonical form.
    Export {
        #[arg(long, value_enum, default_value = "soundsoft")]
        problem: ProblemArg,
        #[arg(long = "mesh-in")]
        mesh_in: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct MieArgs {
    #[arg(long, value_enum, default_value = "soundsoft")]
    problem: ProblemArg,
    #[arg(long)]
    k: f64,
    /// Grid points per direction.
    #[arg(long, default_value_t = 101)]
    n: usize,
    /// Half-width of the square grid centred at the origin.
    #[arg(long, default_value_t = 2.0)]
    extent: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn rhs_path(matrix: &Path) -> PathBuf {
    let stem = matrix.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    matrix.with_file_name(format!("{stem}_rhs.mtx"))
}

fn solve(args: SolveArgs) -> Result<()> {
    let k = match (args.k, args.f) {
        (Some(k), _) => k,
        (None, Some(f)) => 2.0 * PI * f,
        (None, None) => return Err(Error::Parameter("pass --k or --f".into())),
    };
    let spec = ProblemSpec::new(args.disc.problem.into(), k);
    let opts = args.disc.options();
    let mesh = match &args.mesh_in {
        Some(path) => read_msh(path, &spec)?,
        None => {
            let h = match args.h {
                Some(h) => h,
                None => h_law(k, opts.p, args.disc.mesh_constant(args.c)?)?,
            };
            generate_polar(&spec, h, opts.q)?
        }
    };
    let start = std::time::Instant::now();
    let out = solve_on_mesh(&spec, &mesh, &opts)?;
    if let Some(path) = &args.dump_matrix {
        write_matrix_market(&out.system.matrix, path)?;
        write_vector_market(&out.system.rhs, rhs_path(path))?;
    }
    let record = StudyRecord {
        wall_seconds: start.elapsed().as_secs_f64(),
        ..out.record
    };
    eprintln!(
        "relative error {:.6e} over {} elements (p={}, q={}, dofs={})",
        out.report.relative, out.report.element_count, opts.p, mesh.q, record.dofs
    );
    emit(&format_csv(&[record]), args.out.as_deref())
}

fn study(args: StudyArgs) -> Result<()> {
    let base = ProblemSpec::new(args.disc.problem.into(), 1.0);
    let c = args.disc.mesh_constant(args.c)?;
    let records = run_study(&base, c, &args.f_list, &args.disc.options())?;
    match &args.out {
        Some(path) => write_csv(path, &records),
        None => emit(&format_csv(&records), None),
    }
}

fn manufactured(args: ManufacturedArgs) -> Result<()> {
    let conv = manufactured_convergence(args.p, args.k, &args.h)?;
    let mut text = String::from("h err\n");
    for (h, e) in conv.h.iter().zip(&conv.errors) {
        text.push_str(&format!("{h} {e}\n"));
    }
    eprintln!("observed rate {:.4} (p = {})", conv.rate, args.p);
    emit(&text, args.out.as_deref())
}

fn describe(mesh: &Mesh) -> Result<String> {
    let count = |r: Region| mesh.regions.iter().filter(|&&x| x == r).count();
    let quality = mesh.quality_report()?;
    Ok(format!(
        "vertices {}\ntriangles {}\ngeometry degree {}\ncurved elements {}\nmeasured h {}\nregions inner {} physical {} pml {}\nboundary edges {}\narea {}\nmax shape ratio {}\nmax det ratio {}\nflagged elements {}\n",
        mesh.num_vertices(),
        mesh.num_triangles(),
        mesh.q,
        mesh.curved_count(),
        mesh.measured_h,
        count(Region::Inner),
        count(Region::Physical),
        count(Region::Pml),
        mesh.boundary_edges.len(),
        mesh.area()?,
        quality.max_shape_ratio,
        quality.max_det_ratio,
        quality.flagged.len(),
    ))
}

fn mesh_command(action: MeshAction) -> Result<()> {
    match action {
        MeshAction::Generate { problem, h, q, out } => {
            let mesh = generate_polar(&ProblemSpec::new(problem.into(), 1.0), h, q)?;
            write_msh(&mesh, &out)?;
            print!("{}", describe(&mesh)?);
        }
        MeshAction::Inspect { problem, mesh_in } => {
            let mesh = read_msh(&mesh_in, &ProblemSpec::new(problem.into(), 1.0))?;
            print!("{}", describe(&mesh)?);
        }
        MeshAction::Export { problem, mesh_in, out } => {
            let mesh = read_msh(&mesh_in, &ProblemSpec::new(problem.into(), 1.0))?;
            write_msh(&mesh, &out)?;
        }
    }
    Ok(())
}

fn mie(args: MieArgs) -> Result<()> {
    if args.n < 2 || !(args.extent > 0.0) {
        return Err(Error::Parameter("grid needs n >= 2 and a positive extent".into()));
    }
    let spec = ProblemSpec::new(args.problem.into(), args.k);
    let series = reference_series(&spec)?;
    let mut text = String::from("x y re im abs\n");
    let step = 2.0 * args.extent / (args.n - 1) as f64;
    for j in 0..args.n {
        for i in 0..args.n {
            let x = [-args.extent + i as f64 * step, -args.extent + j as f64 * step];
            if spec.kind == ProblemKind::SoundSoft && x[0].hypot(x[1]) < spec.scatterer_radius {
                continue;
            }
            let (u, _) = series.eval(x, Branch::Auto)?;
            text.push_str(&format!("{} {} {} {} {}\n", x[0], x[1], u.re, u.im, u.norm()));
        }
    }
    emit(&text, args.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Study(a) => study(a),
        Command::Manufactured(a) => manufactured(a),
        Command::Mesh { action } => mesh_command(action),
        Command::Mie(a) => mie(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
