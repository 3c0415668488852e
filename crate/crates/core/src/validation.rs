//! Exact solutions, finite-difference residual oracles, manufactured data
//! and convergence studies.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::assembly::{BodyForce, BoundaryField, ProblemData};
use crate::error::{Error, Result};
use crate::flow::FlowState;
use crate::geometry::{boundary_quadrature_params, classify_symmetry, dot, BoundarySample, DomainSpec, Point};
use crate::linear::{solve_stokes, StokesOptions};
use crate::mesh::mesh_annulus_at;
use crate::navier_stokes::{solve_navier_stokes, SolverConfig};

type VectorFn = Arc<dyn Fn(Point) -> Point + Send + Sync>;
type ScalarFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;

/// Analytic velocity/pressure pair with the data it solves.
#[derive(Clone)]
pub struct ExactSolution {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub velocity: VectorFn,
    pub pressure: ScalarFn,
    pub domain: DomainSpec,
    /// `(center, r_in, r_out)` when the domain is a concentric annulus.
    pub annulus: Option<(Point, f64, f64)>,
    pub data: ProblemData,
    /// Whether the pair solves Navier-Stokes (true) or Stokes (false).
    pub convective: bool,
}

impl std::fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExactSolution").field("name", &self.name).field("params", &self.params).finish()
    }
}

/// Fourth-order central difference of `f` along `e` with step `h`.
fn d1<T: Fn(Point) -> f64>(f: &T, x: Point, e: Point, h: f64) -> f64 {
    let at = |s: f64| f([x[0] + s * e[0], x[1] + s * e[1]]);
    (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h)
}

fn d2<T: Fn(Point) -> f64>(f: &T, x: Point, e: Point, h: f64) -> f64 {
    let at = |s: f64| f([x[0] + s * e[0], x[1] + s * e[1]]);
    (-at(2.0 * h) + 16.0 * at(h) - 30.0 * at(0.0) + 16.0 * at(-h) - at(-2.0 * h)) / (12.0 * h * h)
}

const E: [Point; 2] = [[1.0, 0.0], [0.0, 1.0]];

/// Maximum oracle residuals over sampled points.
#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub momentum: f64,
    pub continuity: f64,
    pub slip: f64,
    pub normal_trace: f64,
}

impl ExactSolution {
    pub fn velocity(&self, x: Point) -> Point {
        (self.velocity)(x)
    }

    pub fn pressure(&self, x: Point) -> f64 {
        (self.pressure)(x)
    }

    fn step(&self) -> f64 {
        1e-4 * self.domain.diameter()
    }

    /// `grad[d][c] = d u_d / d x_c` by finite differences.
    pub fn gradient(&self, x: Point) -> [[f64; 2]; 2] {
        let h = self.step();
        let mut g = [[0.0; 2]; 2];
        for d in 0..2 {
            let f = |y: Point| (self.velocity)(y)[d];
            for c in 0..2 {
                g[d][c] = d1(&f, x, E[c], h);
            }
        }
        g
    }

    pub fn laplacian(&self, x: Point) -> Point {
        let h = 1e-3 * self.domain.diameter();
        let mut l = [0.0; 2];
        for d in 0..2 {
            let f = |y: Point| (self.velocity)(y)[d];
            l[d] = d2(&f, x, E[0], h) + d2(&f, x, E[1], h);
        }
        l
    }

    pub fn pressure_gradient(&self, x: Point) -> Point {
        let h = self.step();
        let f = |y: Point| (self.pressure)(y);
        [d1(&f, x, E[0], h), d1(&f, x, E[1], h)]
    }

    /// `-nu Lap u + (u . grad) u + grad p - f` (convection only for NS pairs).
    pub fn momentum_residual(&self, x: Point) -> Point {
        let (u, g, l, gp, f) = (self.velocity(x), self.gradient(x), self.laplacian(x), self.pressure_gradient(x), self.data.force.eval(x));
        let nu = self.data.nu;
        let mut r = [0.0; 2];
        for d in 0..2 {
            let conv = if self.convective { u[0] * g[d][0] + u[1] * g[d][1] } else { 0.0 };
            r[d] = -nu * l[d] + conv + gp[d] - f[d];
        }
        r
    }

    pub fn continuity_residual(&self, x: Point) -> f64 {
        let g = self.gradient(x);
        g[0][0] + g[1][1]
    }

    /// `[T(u, p) n]_tau + beta u_tau - b_tau` at a boundary point.
    pub fn slip_residual(&self, s: &BoundarySample) -> f64 {
        let x = s.point();
        let g = self.gradient(x);
        let (n, t) = (s.frame.normal, s.frame.tangent);
        let mut sn = [0.0; 2];
        for d in 0..2 {
            for c in 0..2 {
                sn[d] += (g[d][c] + g[c][d]) * n[c];
            }
        }
        let u = self.velocity(x);
        self.data.nu * dot(sn, t) + self.data.beta.eval(s) * dot(u, t) - self.data.traction.eval(s)
    }

    pub fn normal_trace_residual(&self, s: &BoundarySample) -> f64 {
        dot(self.velocity(s.point()), s.frame.normal) - self.data.normal.eval(s)
    }

    /// Sample the oracles at random interior points and on every boundary component.
    pub fn check(&self, interior: usize, per_component: usize, seed: u64) -> Result<OracleReport> {
        let mut rng = StdRng::seed_from_u64(seed);
        let d = &self.domain;
        let (mut lo, mut hi) = ([f64::MAX; 2], [f64::MIN; 2]);
        for p in d.curve(0).polygon(256) {
            for c in 0..2 {
                lo[c] = lo[c].min(p[c]);
                hi[c] = hi[c].max(p[c]);
            }
        }
        let margin = 0.01 * d.diameter();
        let mut rep = OracleReport { momentum: 0.0, continuity: 0.0, slip: 0.0, normal_trace: 0.0 };
        let mut count = 0;
        while count < interior {
            let x = [rng.gen_range(lo[0]..hi[0]), rng.gen_range(lo[1]..hi[1])];
            if !d.contains(x) || d.project(x).2 < margin {
                continue;
            }
            count += 1;
            let m = self.momentum_residual(x);
            rep.momentum = rep.momentum.max(m[0].hypot(m[1]));
            rep.continuity = rep.continuity.max(self.continuity_residual(x).abs());
        }
        for j in 0..d.components() {
            for i in 0..per_component {
                let s = d.sample(j, (i as f64 + 0.5) / per_component as f64)?;
                rep.slip = rep.slip.max(self.slip_residual(&s).abs());
                rep.normal_trace = rep.normal_trace.max(self.normal_trace_residual(&s).abs());
            }
        }
        Ok(rep)
    }
}

fn polar(x: Point, c: Point) -> (f64, Point, Point) {
    let (dx, dy) = (x[0] - c[0], x[1] - c[1]);
    let r = dx.hypot(dy);
    (r, [dx / r, dy / r], [-dy / r, dx / r])
}

/// Zero-mean Hamel pressure from the radial momentum balance
/// `p' = u_theta^2 / r - u_r u_r'` with `u_r = -3/r`, `u_theta = k(3r - 2)/r^2`.
pub fn hamel_pressure(k: f64, r: f64) -> f64 {
    let ln2 = 2f64.ln();
    let p0 = -4.5 / (r * r) + k * k * (-4.5 / (r * r) + 4.0 / r.powi(3) - 1.0 / r.powi(4));
    let mean_shift = -(2.0 / 3.0) * (-4.5 * ln2 + k * k * (-4.5 * ln2 + 1.625));
    p0 + mean_shift
}

/// Hamel family on `1 < |x| < 2`: radial source flow plus swirl, one data set
/// for every `k`.
pub fn hamel(k: f64) -> ExactSolution {
    let domain = DomainSpec::annulus(1.0, 2.0).expect("valid annulus");
    let data = ProblemData::new(1.0, 2)
        .with_beta(BoundaryField::constants(&[0.75, 0.0]))
        .with_normal(BoundaryField::constants(&[-1.5, 3.0]));
    ExactSolution {
        name: "hamel".into(),
        params: BTreeMap::from([("k".to_string(), k)]),
        velocity: Arc::new(move |x| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            let r = r2.sqrt();
            let s = k * (3.0 * r - 2.0) / (r2 * r);
            [-3.0 * x[0] / r2 - s * x[1], -3.0 * x[1] / r2 + s * x[0]]
        }),
        pressure: Arc::new(move |x| hamel_pressure(k, x[0].hypot(x[1]))),
        domain,
        annulus: Some(([0.0, 0.0], 1.0, 2.0)),
        data,
        convective: true,
    }
}

/// `|u_1 - u_0|_{L2}` of two Hamel members: the swirl difference on the annulus.
pub fn hamel_swirl_distance(k0: f64, k1: f64) -> f64 {
    // int_1^2 ((3r-2)/r^2)^2 2 pi r dr = 2 pi (9 ln 2 - 6 + 3/2)
    let i = 2.0 * std::f64::consts::PI * (9.0 * 2f64.ln() - 6.0 + 1.5);
    (k1 - k0).abs() * i.sqrt()
}

/// Rigid rotation `b (x - c)^perp` with `p = |u|^2 / 2`: a zero-data
/// Navier-Stokes solution on a domain that is circularly symmetric about `c`.
pub fn rigid_rotation(b: f64, domain: &DomainSpec) -> Result<ExactSolution> {
    let c = classify_symmetry(domain)
        .circularly_symmetric
        .ok_or_else(|| Error::Data("rigid rotation needs a circularly symmetric domain".into()))?;
    let annulus = match domain.curves() {
        [o, i] => match (o.as_circle(), i.as_circle()) {
            (Some((_, ro)), Some((_, ri))) => Some((c, ri, ro)),
            _ => None,
        },
        _ => None,
    };
    let n = domain.components();
    Ok(ExactSolution {
        name: "rigid-rotation".into(),
        params: BTreeMap::from([("b".to_string(), b)]),
        velocity: Arc::new(move |x| [-b * (x[1] - c[1]), b * (x[0] - c[0])]),
        pressure: Arc::new(move |x| 0.5 * b * b * ((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2))),
        domain: domain.clone(),
        annulus,
        data: ProblemData::new(1.0, n),
        convective: true,
    })
}

/// Parameters of the slip Couette flow on a concentric annulus.
#[derive(Clone, Debug)]
pub struct CouetteParams {
    pub center: Point,
    pub r_in: f64,
    pub r_out: f64,
    pub nu: f64,
    /// Friction on the outer and inner circle.
    pub beta: [f64; 2],
    /// Tangential traction density `b_tau` on the outer and inner circle.
    pub traction: [f64; 2],
}

impl Default for CouetteParams {
    fn default() -> Self {
        Self { center: [0.0, 0.0], r_in: 1.0, r_out: 2.0, nu: 1.0, beta: [1.0, 0.5], traction: [1.0, -0.5] }
    }
}

/// Coefficients `(A, B)` of `u_theta = A r + B / r` from the two slip conditions.
pub fn couette_coefficients(p: &CouetteParams) -> Result<(f64, f64)> {
    let (r0, r1, nu) = (p.r_out, p.r_in, p.nu);
    // outer: tau = -e_theta, [nu S n]_tau = 2 nu B / r0^2, u_tau = -u_theta
    // inner: tau = e_theta,  [nu S n]_tau = 2 nu B / r1^2, u_tau = u_theta
    let m = [[-p.beta[0] * r0, 2.0 * nu / (r0 * r0) - p.beta[0] / r0], [p.beta[1] * r1, 2.0 * nu / (r1 * r1) + p.beta[1] / r1]];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.abs() < 1e-14 {
        return Err(Error::Data("slip Couette system is singular (vanishing friction admits a rigid rotation)".into()));
    }
    let (g0, g1) = (p.traction[0], p.traction[1]);
    Ok(((g0 * m[1][1] - m[0][1] * g1) / det, (m[0][0] * g1 - m[1][0] * g0) / det))
}

/// Slip Couette flow `u = (A r + B / r) e_theta`. The Stokes pressure is zero;
/// with convection the pressure balances the centripetal term.
pub fn couette(p: &CouetteParams, convective: bool) -> Result<ExactSolution> {
    let (a, b) = couette_coefficients(p)?;
    let c = p.center;
    let domain = DomainSpec::annulus_at(c, p.r_in, p.r_out)?;
    let data = ProblemData::new(p.nu, 2)
        .with_beta(BoundaryField::constants(&p.beta))
        .with_traction(BoundaryField::constants(&p.traction));
    let pressure: ScalarFn = if convective {
        // p' = u_theta^2 / r, zero mean over the annulus
        let prim = move |r: f64| a * a * r * r / 2.0 + 2.0 * a * b * r.ln() - b * b / (2.0 * r * r);
        let (ri, ro) = (p.r_in, p.r_out);
        let n = 64;
        let (nodes, weights) = crate::quadrature::gauss_legendre(n);
        let mut m = 0.0;
        for (s, w) in nodes.iter().zip(&weights) {
            let r = ri + s * (ro - ri);
            m += w * (ro - ri) * prim(r) * r;
        }
        let mean = 2.0 * m / (ro * ro - ri * ri);
        Arc::new(move |x| prim((x[0] - c[0]).hypot(x[1] - c[1])) - mean)
    } else {
        Arc::new(|_| 0.0)
    };
    Ok(ExactSolution {
        name: "couette".into(),
        params: BTreeMap::from([("A".to_string(), a), ("B".to_string(), b)]),
        velocity: Arc::new(move |x| {
            let (r, _, et) = polar(x, c);
            let ut = a * r + b / r;
            [ut * et[0], ut * et[1]]
        }),
        pressure,
        domain,
        annulus: Some((c, p.r_in, p.r_out)),
        data,
        convective,
    })
}

/// Manufacture data for an arbitrary solenoidal velocity and pressure:
/// body force from the momentum equation, `a = u . n` and `b_tau` from the
/// slip condition.
pub fn mms_generate(
    velocity: impl Fn(Point) -> Point + Send + Sync + 'static,
    pressure: impl Fn(Point) -> f64 + Send + Sync + 'static,
    domain: &DomainSpec,
    nu: f64,
    beta: BoundaryField,
    convective: bool,
) -> Result<ProblemData> {
    Ok(manufactured(velocity, pressure, domain, nu, beta, convective)?.data)
}

/// [`mms_generate`] returning the full exact solution.
pub fn manufactured(
    velocity: impl Fn(Point) -> Point + Send + Sync + 'static,
    pressure: impl Fn(Point) -> f64 + Send + Sync + 'static,
    domain: &DomainSpec,
    nu: f64,
    beta: BoundaryField,
    convective: bool,
) -> Result<ExactSolution> {
    let n = domain.components();
    let mut sol = ExactSolution {
        name: "manufactured".into(),
        params: BTreeMap::new(),
        velocity: Arc::new(velocity),
        pressure: Arc::new(pressure),
        domain: domain.clone(),
        annulus: None,
        data: ProblemData::new(nu, n).with_beta(beta),
        convective,
    };
    let probe = sol.clone();
    let scale = {
        let mut m: f64 = 0.0;
        for j in 0..n {
            for t in boundary_quadrature_params(4, 4) {
                let s = domain.sample(j, t)?;
                let u = probe.velocity(s.point());
                m = m.max(u[0].hypot(u[1]));
            }
        }
        m.max(1.0)
    };
    let rep = probe.check(64, 0, 7)?;
    if rep.continuity > 1e-8 * scale {
        return Err(Error::Data(format!("manufactured velocity is not divergence free (max |div u| = {:.3e})", rep.continuity)));
    }
    let f_src = probe.clone();
    // momentum_residual subtracts the current force, which is still zero here
    sol.data.force = BodyForce::field(move |x| f_src.momentum_residual(x));
    let a_src = probe.clone();
    sol.data.normal = BoundaryField::function(n, move |s| dot(a_src.velocity(s.point()), s.frame.normal));
    let b_src = probe;
    sol.data.traction = BoundaryField::function(n, move |s| b_src.slip_residual(s));
    Ok(sol)
}

/// How each level of a convergence study is computed.
#[derive(Clone, Debug)]
pub enum StudySolver {
    Interpolate,
    Stokes(StokesOptions),
    NavierStokes(SolverConfig),
}

/// One row of a convergence table.
#[derive(Clone, Debug, Serialize)]
pub struct StudyRow {
    pub level: usize,
    pub n_radial: usize,
    pub n_angular: usize,
    pub h: f64,
    pub e_l2_u: f64,
    pub e_h1_u: f64,
    pub e_l2_p: f64,
    pub order_l2_u: Option<f64>,
    pub order_h1_u: Option<f64>,
    pub order_l2_p: Option<f64>,
    pub residual: Option<f64>,
    /// Wall time of the level (mesh, solve and error evaluation).
    #[serde(skip)]
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceTable {
    pub problem: String,
    pub rows: Vec<StudyRow>,
}

impl ConvergenceTable {
    /// CSV with columns `level,h,eL2_u,order,eH1_u,order,eL2_p,order`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("level,h,eL2_u,order,eH1_u,order,eL2_p,order\n");
        let o = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v:.6}"));
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{:.6e},{:.6e},{},{:.6e},{},{:.6e},{}",
                r.level,
                r.h,
                r.e_l2_u,
                o(r.order_l2_u),
                r.e_h1_u,
                o(r.order_h1_u),
                r.e_l2_p,
                o(r.order_l2_p)
            );
        }
        s
    }

    pub fn last(&self) -> &StudyRow {
        self.rows.last().expect("non-empty table")
    }
}

/// Errors against an exact solution on a sequence of annulus meshes
/// `(n_radial, n_angular)`; orders use the ratio of maximum element sizes.
pub fn convergence_study(exact: &ExactSolution, levels: &[(usize, usize)], solver: &StudySolver) -> Result<ConvergenceTable> {
    let (c, ri, ro) = exact
        .annulus
        .ok_or_else(|| Error::Config("convergence studies need an annulus exact solution".into()))?;
    if levels.len() < 2 {
        return Err(Error::Config("a convergence study needs at least two levels".into()));
    }
    let mut rows: Vec<StudyRow> = Vec::new();
    for (level, &(nr, na)) in levels.iter().enumerate() {
        let tag = |e: Error| match e {
            Error::NonConvergence { message, trace } => Error::NonConvergence { message: format!("level {level}: {message}"), trace },
            Error::Solver(m) => Error::Solver(format!("level {level}: {m}")),
            other => other,
        };
        let start = std::time::Instant::now();
        let mesh = Arc::new(mesh_annulus_at(c, ri, ro, nr, na).map_err(tag)?);
        let flow = match solver {
            StudySolver::Interpolate => {
                FlowState::interpolate(mesh.clone(), |x| exact.velocity(x), |x| exact.pressure(x), exact.data.nu)
            }
            StudySolver::Stokes(o) => solve_stokes(&mesh, &exact.data, o).map_err(tag)?,
            StudySolver::NavierStokes(cfg) => solve_navier_stokes(&mesh, &exact.data, cfg).map_err(tag)?,
        };
        let h = mesh.h_max();
        let e_l2_u = flow.velocity_l2_error(|x| exact.velocity(x));
        let e_h1_u = flow.velocity_h1_error(|x| exact.gradient(x));
        let e_l2_p = flow.pressure_l2_error(|x| exact.pressure(x));
        let order = |prev: Option<&StudyRow>, f: fn(&StudyRow) -> f64, e: f64| {
            prev.map(|p| (f(p) / e).ln() / (p.h / h).ln())
        };
        let prev = rows.last();
        let row = StudyRow {
            level,
            n_radial: nr,
            n_angular: na,
            h,
            e_l2_u,
            e_h1_u,
            e_l2_p,
            order_l2_u: order(prev, |r| r.e_l2_u, e_l2_u),
            order_h1_u: order(prev, |r| r.e_h1_u, e_h1_u),
            order_l2_p: order(prev, |r| r.e_l2_p, e_l2_p),
            residual: flow.metadata.residual,
            seconds: start.elapsed().as_secs_f64(),
        };
        rows.push(row);
    }
    Ok(ConvergenceTable { problem: exact.name.clone(), rows })
}
