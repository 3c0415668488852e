use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};
use slipflow::analysis::{
    audit, bernoulli_audit, diagnostics, enstrophy, head_pressure_residual, sobolev_exponent, weingarten_identity_check, AuditReport,
    BernoulliReport, HeadPressureResidual, WeingartenResidual,
};
use slipflow::assembly::{BoundaryField, DofMap, ProblemData};
use slipflow::export::{write_boundary_csv, write_trace_csv, write_vtk, Provenance};
use slipflow::flow::FlowState;
use slipflow::geometry::classify_symmetry;
use slipflow::linear::{korn_constant, solve_stokes, sobolev_constant, KornEstimate, KornOptions, SobolevEstimate, StokesOptions};
use slipflow::mesh::write_mesh_files;
use slipflow::navier_stokes::{solve_navier_stokes, solve_symmetric, symmetry_defect, IterationTrace, SolverConfig};
use slipflow::validation::{convergence_study, couette, hamel, manufactured, CouetteParams, ExactSolution, OracleReport, StudySolver};
use slipflow::{Error, Mesh, Result};

use crate::config::{load, Loaded};

/// Output directory, provenance and determinism switch shared by commands.
pub struct Ctx {
    pub out: PathBuf,
    pub provenance: Provenance,
    pub deterministic: bool,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Ctx {
    pub fn new(out: PathBuf, hashed: &[u8], deterministic: bool) -> Result<Self> {
        std::fs::create_dir_all(&out)?;
        Ok(Self { out, provenance: Provenance::new(Some(sha256_hex(hashed))), deterministic })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn seconds(&self, start: Instant) -> Option<f64> {
        (!self.deterministic).then(|| start.elapsed().as_secs_f64())
    }

    fn write_json<T: Serialize>(&self, name: &str, body: &T) -> Result<PathBuf> {
        #[derive(Serialize)]
        struct Artifact<'a, T> {
            provenance: &'a Provenance,
            #[serde(flatten)]
            body: &'a T,
        }
        let text = serde_json::to_string_pretty(&Artifact { provenance: &self.provenance, body })
            .map_err(|e| Error::Io(std::io::Error::other(e)))?;
        let p = self.path(name);
        std::fs::write(&p, text + "\n")?;
        Ok(p)
    }
}

/// Loaded configuration with everything derived from it.
pub struct Setup {
    pub loaded: Loaded,
    pub domain: slipflow::DomainSpec,
    pub data: ProblemData,
}

pub fn setup(config: &Path, pins: &[(usize, f64)]) -> Result<Setup> {
    let mut loaded = load(config)?;
    for &(c, v) in pins {
        let p = &mut loaded.config.solver.circulation_pins;
        p.retain(|q| q.0 != c);
        p.push((c, v));
    }
    loaded.config.solver.validate()?;
    let domain = loaded.config.domain()?;
    let data = loaded.config.data(&domain)?;
    Ok(Setup { loaded, domain, data })
}

impl Setup {
    pub fn mesh(&self) -> Result<Arc<Mesh>> {
        self.loaded.config.mesh(&self.domain, &self.loaded.base)
    }
}

#[derive(Serialize)]
struct MeshSummary {
    vertices: usize,
    triangles: usize,
    nodes: usize,
    h_max: f64,
    area: f64,
}

fn mesh_summary(m: &Mesh) -> MeshSummary {
    MeshSummary { vertices: m.n_vertices(), triangles: m.n_triangles(), nodes: m.n_nodes(), h_max: m.h_max(), area: m.area() }
}

pub fn cmd_mesh(ctx: &Ctx, s: &Setup) -> Result<()> {
    let m = s.mesh()?;
    let paths = write_mesh_files(&m, &ctx.path("mesh"), Some(&ctx.provenance.line()))?;
    let sum = mesh_summary(&m);
    println!("mesh: {} vertices, {} triangles, h_max {:.4e}", sum.vertices, sum.triangles, sum.h_max);
    for p in paths {
        println!("wrote {}", p.display());
    }
    Ok(())
}

pub fn cmd_audit(ctx: &Ctx, s: &Setup) -> Result<AuditReport> {
    let start = Instant::now();
    let cfg = &s.loaded.config.audit;
    let mesh = if cfg.constants { Some(s.mesh()?) } else { None };
    let report = audit(&s.domain, &s.data, mesh.as_ref(), &cfg.options());
    #[derive(Serialize)]
    struct Out<'a> {
        #[serde(flatten)]
        report: &'a AuditReport,
        #[serde(skip_serializing_if = "Option::is_none")]
        seconds: Option<f64>,
    }
    let p = ctx.write_json("audit.json", &Out { report: &report, seconds: ctx.seconds(start) })?;
    let v = |b: bool| if b { "holds" } else { "fails" };
    println!("compatibility: total flux {:.3e} ({})", report.fluxes.total, v(report.fluxes.compatible));
    println!("friction-curvature margin {:.6}: {}", report.theorem1.margin, v(report.theorem1.verdict));
    println!("single convex hole with outflow: {}", v(report.theorem2.verdict));
    println!("mirror symmetry: {}", v(report.theorem3.verdict));
    match report.theorem4.verdict {
        Some(b) => println!(
            "small harmonic flux: lhs {:.4e} rhs {:.4e}: {}",
            report.theorem4.lhs.unwrap_or(f64::NAN),
            report.theorem4.rhs.unwrap_or(f64::NAN),
            v(b)
        ),
        None => println!("small harmonic flux: not evaluated"),
    }
    println!("wrote {}", p.display());
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Problem {
    Stokes,
    Ns,
}

#[derive(Serialize)]
struct SolveSummary<'a> {
    problem: &'a str,
    status: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<String>,
    residual: Option<f64>,
    iterations: Option<usize>,
    rotation_constraint: bool,
    compatibility_residual: Option<f64>,
    circulation_pins: Vec<(usize, f64)>,
    circulations: Vec<f64>,
    fluxes: Vec<f64>,
    velocity_l2_norm: Option<f64>,
    enstrophy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    symmetry_defect: Option<f64>,
    mesh: MeshSummary,
    notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seconds: Option<f64>,
}

fn run_solver(problem: Problem, mesh: &Arc<Mesh>, data: &ProblemData, cfg: &SolverConfig) -> Result<FlowState> {
    match problem {
        Problem::Stokes => {
            if cfg.symmetric {
                return Err(Error::Config("the symmetric subspace is only available for the ns problem".into()));
            }
            let o = StokesOptions { circulation_pins: cfg.circulation_pins.clone(), rotation: cfg.rotation, extra_constraints: Vec::new() };
            solve_stokes(mesh, data, &o)
        }
        Problem::Ns if cfg.symmetric => solve_symmetric(mesh, data, cfg),
        Problem::Ns => solve_navier_stokes(mesh, data, cfg),
    }
}

fn problem_name(p: Problem) -> &'static str {
    match p {
        Problem::Stokes => "stokes",
        Problem::Ns => "navier-stokes",
    }
}

/// Solve and write the field artifacts; on failure the trace and status are
/// still written before the error is returned.
fn solve_and_write(ctx: &Ctx, s: &Setup, problem: Problem) -> Result<(FlowState, Arc<Mesh>)> {
    let start = Instant::now();
    let mesh = s.mesh()?;
    let cfg = &s.loaded.config.solver;
    let flow = match run_solver(problem, &mesh, &s.data, cfg) {
        Ok(f) => f,
        Err(e) => {
            let trace: Option<&IterationTrace> = match &e {
                Error::NonConvergence { trace, .. } => Some(trace),
                _ => None,
            };
            if let Some(t) = trace {
                write_trace_csv(&ctx.path("trace.csv"), t, &ctx.provenance)?;
            }
            if !e.is_data_error() {
                let summary = SolveSummary {
                    problem: problem_name(problem),
                    status: "failed",
                    message: Some(e.to_string()),
                    residual: trace.and_then(|t| t.residuals.last().copied()),
                    iterations: trace.map(|t| t.residuals.len()),
                    rotation_constraint: false,
                    compatibility_residual: None,
                    circulation_pins: cfg.circulation_pins.clone(),
                    circulations: Vec::new(),
                    fluxes: Vec::new(),
                    velocity_l2_norm: None,
                    enstrophy: None,
                    symmetry_defect: None,
                    mesh: mesh_summary(&mesh),
                    notes: Vec::new(),
                    seconds: ctx.seconds(start),
                };
                ctx.write_json("solution.json", &summary)?;
            }
            return Err(e);
        }
    };
    let md = &flow.metadata;
    let n = s.domain.components();
    let summary = SolveSummary {
        problem: problem_name(problem),
        status: "converged",
        message: None,
        residual: md.residual,
        iterations: md.trace.as_ref().map(|t| t.residuals.len()),
        rotation_constraint: md.rotation_constraint,
        compatibility_residual: md.compatibility_residual,
        circulation_pins: md.circulation_pins.clone(),
        circulations: (0..n).map(|j| flow.circulation(j)).collect(),
        fluxes: (0..n).map(|j| flow.flux(j)).collect(),
        velocity_l2_norm: Some(flow.velocity_l2_norm()),
        enstrophy: Some(enstrophy(&flow)),
        symmetry_defect: if cfg.symmetric && problem == Problem::Ns { symmetry_defect(&flow).ok() } else { None },
        mesh: mesh_summary(&mesh),
        notes: md.notes.clone(),
        seconds: ctx.seconds(start),
    };
    ctx.write_json("solution.json", &summary)?;
    if let Some(t) = &md.trace {
        write_trace_csv(&ctx.path("trace.csv"), t, &ctx.provenance)?;
    }
    Ok((flow, mesh))
}

pub fn cmd_solve(ctx: &Ctx, s: &Setup, problem: Problem) -> Result<()> {
    let (flow, _) = solve_and_write(ctx, s, problem)?;
    let out = &s.loaded.config.output;
    if out.vtk {
        let diag = diagnostics(&flow)?;
        write_vtk(&ctx.path("solution.vtk"), &flow, &diag, &ctx.provenance)?;
    }
    if out.boundary_csv {
        write_boundary_csv(&ctx.path("boundary.csv"), &flow, &s.data, &ctx.provenance)?;
    }
    println!(
        "{} solve converged: residual {:.3e}, |u|_L2 {:.6e}",
        problem_name(problem),
        flow.metadata.residual.unwrap_or(0.0),
        flow.velocity_l2_norm()
    );
    println!("wrote {}", ctx.out.display());
    Ok(())
}

#[derive(Serialize)]
struct StreamSummary {
    available: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max: Option<f64>,
}

#[derive(Serialize)]
struct DiagnoseSummary {
    bernoulli: BernoulliReport,
    head_pressure: std::result::Result<HeadPressureResidual, String>,
    weingarten: WeingartenResidual,
    stream_function: StreamSummary,
    enstrophy: f64,
}

pub fn cmd_diagnose(ctx: &Ctx, s: &Setup, problem: Problem) -> Result<()> {
    let (flow, _) = solve_and_write(ctx, s, problem)?;
    let diag = diagnostics(&flow)?;
    write_vtk(&ctx.path("diagnostics.vtk"), &flow, &diag, &ctx.provenance)?;
    write_boundary_csv(&ctx.path("boundary.csv"), &flow, &s.data, &ctx.provenance)?;
    let stream_function = match &diag.stream {
        Ok(psi) => StreamSummary {
            available: true,
            reason: None,
            min: psi.values.iter().copied().reduce(f64::min),
            max: psi.values.iter().copied().reduce(f64::max),
        },
        Err(e) => StreamSummary { available: false, reason: Some(e.clone()), min: None, max: None },
    };
    let summary = DiagnoseSummary {
        bernoulli: bernoulli_audit(&flow),
        head_pressure: head_pressure_residual(&flow, &s.data).map_err(|e| e.to_string()),
        weingarten: weingarten_identity_check(&flow),
        stream_function,
        enstrophy: enstrophy(&flow),
    };
    ctx.write_json("bernoulli.json", &summary)?;
    for c in &summary.bernoulli.components {
        println!("component {}: mean head {:.6e}, deviation {:.3e}", c.component, c.mean_head, c.deviation);
    }
    println!("weingarten residual (L2) {:.3e}", summary.weingarten.l2);
    println!("wrote {}", ctx.out.display());
    Ok(())
}

#[derive(Serialize)]
struct Constants {
    weight: &'static str,
    korn: KornEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    korn_rotation_constrained: Option<KornEstimate>,
    q: f64,
    sobolev: SobolevEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    seconds: Option<f64>,
}

pub fn cmd_korn(ctx: &Ctx, s: &Setup) -> Result<()> {
    let start = Instant::now();
    let mesh = s.mesh()?;
    let dofmap = DofMap::new(&mesh);
    let nu = s.data.nu;
    let beta = s.data.beta.clone();
    let weight = BoundaryField::function(s.domain.components(), move |b| 2.0 * beta.eval(b) / nu);
    let audit_cfg = &s.loaded.config.audit;
    let korn = korn_constant(&mesh, &dofmap, &weight, &audit_cfg.korn)?;
    let constrained = if classify_symmetry(&s.domain).circularly_symmetric.is_some() && !audit_cfg.korn.rotation_constraint {
        let o = KornOptions { rotation_constraint: true, ..audit_cfg.korn.clone() };
        Some(korn_constant(&mesh, &dofmap, &weight, &o)?)
    } else {
        None
    };
    let q = audit_cfg.q;
    if !(q > 2.0 && q.is_finite()) {
        return Err(Error::Config(format!("audit.q = {q} must lie in (2, inf)")));
    }
    let sobolev = sobolev_constant(&mesh, sobolev_exponent(q), &audit_cfg.sobolev)?;
    println!("korn: lambda_min {:.6e}, K {:.6e}", korn.lambda_min, korn.k);
    if let Some(c) = &constrained {
        println!("korn (rotation removed): lambda_min {:.6e}, K {:.6e}", c.lambda_min, c.k);
    }
    println!("sobolev: r {:.3}, C_r {:.6e}", sobolev.r, sobolev.c_r);
    let out = Constants {
        weight: "2 beta / nu",
        korn,
        korn_rotation_constrained: constrained,
        q,
        sobolev,
        seconds: ctx.seconds(start),
    };
    let p = ctx.write_json("constants.json", &out)?;
    println!("wrote {}", p.display());
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Benchmark {
    Hamel,
    Couette,
    Mms,
}

/// Parse `8x16,16x32` into `(n_radial, n_angular)` pairs.
pub fn parse_levels(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',')
        .map(|l| {
            let (a, b) = l.trim().split_once('x').ok_or_else(|| Error::Config(format!("level '{l}' is not of the form NRxNA")))?;
            let p = |v: &str| v.trim().parse::<usize>().map_err(|_| Error::Config(format!("level '{l}': bad integer '{v}'")));
            Ok((p(a)?, p(b)?))
        })
        .collect()
}

/// Smooth solenoidal field (curl of `x1^2 x2 / 4 + sin(x1) cos(x2) / 2`) on `1 < |x| < 2`.
pub fn mms_solution(convective: bool) -> Result<ExactSolution> {
    let domain = slipflow::DomainSpec::annulus(1.0, 2.0)?;
    let mut sol = manufactured(
        |x| [0.25 * x[0] * x[0] - 0.5 * x[0].sin() * x[1].sin(), -0.5 * x[0] * x[1] - 0.5 * x[0].cos() * x[1].cos()],
        |x| x[0] * x[1],
        &domain,
        1.0,
        BoundaryField::constants(&[1.0, 1.0]),
        convective,
    )?;
    sol.annulus = Some(([0.0, 0.0], 1.0, 2.0));
    Ok(sol)
}

#[derive(Serialize)]
struct ValidationRow {
    level: usize,
    n_radial: usize,
    n_angular: usize,
    h: f64,
    e_l2_u: f64,
    e_h1_u: f64,
    e_l2_p: f64,
    rel_l2_u: f64,
    rel_l2_p: f64,
    order_l2_u: Option<f64>,
    order_h1_u: Option<f64>,
    order_l2_p: Option<f64>,
    residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seconds: Option<f64>,
}

#[derive(Serialize)]
struct Validation {
    problem: String,
    params: BTreeMap<String, f64>,
    solver: &'static str,
    oracle: OracleReport,
    velocity_l2_norm: f64,
    /// mean-free
    pressure_l2_norm: f64,
    rows: Vec<ValidationRow>,
}

pub struct ValidateArgs {
    pub benchmark: Benchmark,
    pub levels: Vec<(usize, usize)>,
    pub k: f64,
    pub convective: bool,
    pub seed: u64,
    pub solver: SolverConfig,
}

pub fn cmd_validate(ctx: &Ctx, a: &ValidateArgs) -> Result<()> {
    let (exact, solver, tag) = match a.benchmark {
        Benchmark::Hamel => {
            // the branch is selected by k, whatever the config pins
            let mut cfg = a.solver.clone();
            cfg.circulation_pins = vec![(1, 2.0 * std::f64::consts::PI * a.k)];
            (hamel(a.k), StudySolver::NavierStokes(cfg), "navier-stokes")
        }
        Benchmark::Couette => {
            let e = couette(&CouetteParams::default(), a.convective)?;
            if a.convective {
                (e, StudySolver::NavierStokes(a.solver.clone()), "navier-stokes")
            } else {
                (e, StudySolver::Stokes(StokesOptions::default()), "stokes")
            }
        }
        Benchmark::Mms => {
            let e = mms_solution(a.convective)?;
            if a.convective {
                (e, StudySolver::NavierStokes(a.solver.clone()), "navier-stokes")
            } else {
                (e, StudySolver::Stokes(StokesOptions::default()), "stokes")
            }
        }
    };
    let oracle = exact.check(200, 64, a.seed)?;
    let table = convergence_study(&exact, &a.levels, &solver)?;
    // reference norm on a fine interpolant
    let (c, ri, ro) = exact.annulus.expect("annulus benchmark");
    let fine = Arc::new(slipflow::mesh::mesh_annulus_at(c, ri, ro, 32, 128)?);
    let reference = FlowState::interpolate(fine, |x| exact.velocity(x), |x| exact.pressure(x), 1.0);
    let norm = reference.velocity_l2_norm();
    let pnorm = reference.pressure_l2_error(|_| 0.0);
    let rows = table
        .rows
        .iter()
        .map(|r| ValidationRow {
            level: r.level,
            n_radial: r.n_radial,
            n_angular: r.n_angular,
            h: r.h,
            e_l2_u: r.e_l2_u,
            e_h1_u: r.e_h1_u,
            e_l2_p: r.e_l2_p,
            rel_l2_u: r.e_l2_u / norm,
            rel_l2_p: r.e_l2_p / pnorm,
            order_l2_u: r.order_l2_u,
            order_h1_u: r.order_h1_u,
            order_l2_p: r.order_l2_p,
            residual: r.residual,
            seconds: (!ctx.deterministic).then_some(r.seconds),
        })
        .collect();
    let csv = format!("# {}\n{}", ctx.provenance.line(), table.to_csv());
    std::fs::write(ctx.path("convergence.csv"), &csv)?;
    let v = Validation { problem: table.problem.clone(), params: exact.params.clone(), solver: tag, oracle, velocity_l2_norm: norm, pressure_l2_norm: pnorm, rows };
    ctx.write_json("validate.json", &v)?;
    print!("{}", table.to_csv());
    println!("wrote {}", ctx.out.display());
    Ok(())
}
