//! Stationary Navier-Stokes with slip conditions: Picard and Newton
//! iterations around the Stokes lift, continuation in the convection
//! strength, circulation pins and the mirror-symmetric subspace.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::assembly::{assemble_convection, assemble_convection_jacobian, ProblemData};
use crate::error::{Error, Result};
use crate::flow::FlowState;
use crate::geometry::{classify_symmetry, DomainSpec, Point};
use crate::linear::{Reduction, RotationHandling, StokesOptions, StokesSystem};
use crate::mesh::Mesh;
use crate::sparse::norm2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverMode {
    Picard,
    Newton,
    #[default]
    PicardThenNewton,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub mode: SolverMode,
    /// Convection strengths visited in order; the last one is the target.
    pub lambda_schedule: Vec<f64>,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// `(component, circulation)` pins.
    pub circulation_pins: Vec<(usize, f64)>,
    pub symmetric: bool,
    /// Initial Picard damping in `(0, 1]`.
    pub damping: f64,
    /// Residual below which the hybrid mode switches to Newton.
    pub newton_switch: f64,
    pub rotation: RotationHandling,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mode: SolverMode::PicardThenNewton,
            lambda_schedule: vec![1.0],
            tolerance: 1e-10,
            max_iterations: 100,
            circulation_pins: Vec::new(),
            symmetric: false,
            damping: 1.0,
            newton_switch: 1e-3,
            rotation: RotationHandling::Auto,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) || !(self.damping > 0.0 && self.damping <= 1.0) || self.max_iterations == 0 {
            return Err(Error::Config("tolerance, damping in (0, 1] and max_iterations must be positive".into()));
        }
        if self.lambda_schedule.is_empty() {
            return Err(Error::Config("lambda schedule is empty".into()));
        }
        let mut prev = 0.0;
        for &l in &self.lambda_schedule {
            if !(0.0..=1.0).contains(&l) || l < prev {
                return Err(Error::Config("lambda schedule must be non-decreasing in [0, 1]".into()));
            }
            prev = l;
        }
        Ok(())
    }
}

/// Per-iteration history of a nonlinear solve.
#[derive(Clone, Debug, Default, Serialize)]
pub struct IterationTrace {
    pub lambda: Vec<f64>,
    pub step: Vec<String>,
    pub residuals: Vec<f64>,
    /// `|w|_J^2 = (A + M)(w, w)` for `w = u - U`.
    pub energies: Vec<f64>,
    pub damping: Vec<f64>,
    pub converged: bool,
}

impl IterationTrace {
    fn push(&mut self, lambda: f64, step: &str, residual: f64, energy: f64, damping: f64) {
        self.lambda.push(lambda);
        self.step.push(step.into());
        self.residuals.push(residual);
        self.energies.push(energy);
        self.damping.push(damping);
    }
}

/// Current iterate with its multipliers.
#[derive(Clone, Debug)]
struct State {
    u: Vec<f64>,
    p: Vec<f64>,
    mu: f64,
    mult: Vec<f64>,
}

/// Nonlinear solver bound to one assembled Stokes system.
pub struct NavierStokesSolver {
    pub system: StokesSystem,
    pub config: SolverConfig,
    lift: State,
}

impl NavierStokesSolver {
    pub fn new(mesh: &Arc<Mesh>, data: &ProblemData, config: &SolverConfig) -> Result<Self> {
        config.validate()?;
        let options = StokesOptions {
            circulation_pins: config.circulation_pins.clone(),
            rotation: if config.symmetric { RotationHandling::Never } else { config.rotation },
            extra_constraints: Vec::new(),
        };
        if config.symmetric {
            if !config.circulation_pins.is_empty() {
                return Err(Error::Config(
                    "circulation pins cannot be combined with the symmetric subspace (circulation vanishes there)".into(),
                ));
            }
            check_symmetric_setup(mesh, data)?;
        }
        let mut system = StokesSystem::new(mesh, data, &options)?;
        if config.symmetric {
            system.reduction = Some(symmetric_reduction(&system)?);
        }
        let s = system.solve_dofs()?;
        let lift = State { u: s.u, p: s.p, mu: s.mean_multiplier, mult: s.multipliers };
        Ok(Self { system, config: config.clone(), lift })
    }

    /// Stokes lift `U` as a flow field.
    pub fn lift(&self) -> FlowState {
        self.system.to_flow(&self.lift.u, &self.lift.p, "stokes-lift")
    }

    fn energy(&self, u: &[f64]) -> f64 {
        let w: Vec<f64> = u.iter().zip(&self.lift.u).map(|(a, b)| a - b).collect();
        self.system.k.bilinear(&w, &w)
    }

    /// Relative residual of the full weak form at `(u, p)` with multipliers.
    fn residual(&self, s: &State, lambda: f64) -> f64 {
        let sys = &self.system;
        let ku = sys.k.mul_vec(&s.u);
        let (_, nu) = assemble_convection(&sys.mesh, &sys.dofmap, &s.u);
        let btp = sys.divergence.tr_mul_vec(&s.p);
        let mut r_u = vec![0.0; sys.dofmap.n_velocity()];
        for d in 0..r_u.len() {
            r_u[d] = ku[d] + lambda * nu[d] - btp[d] - sys.load[d];
        }
        for (c, &m) in sys.constraints.iter().zip(&s.mult) {
            for &(d, v) in &c.terms {
                r_u[d] += v * m;
            }
        }
        let mut num = 0.0;
        let mut scale = [0.0f64; 4];
        for &d in &sys.layout.free {
            num += r_u[d] * r_u[d];
            scale[0] += ku[d] * ku[d];
            scale[1] += (lambda * nu[d]).powi(2);
            scale[2] += btp[d] * btp[d];
            scale[3] += sys.load[d] * sys.load[d];
        }
        let bu = sys.divergence.mul_vec(&s.u);
        let r_p: Vec<f64> = bu.iter().zip(&sys.mean).map(|(b, m)| -b + m * s.mu).collect();
        num += r_p.iter().map(|v| v * v).sum::<f64>();
        for c in &sys.constraints {
            num += (c.apply(&s.u) - c.target).powi(2);
        }
        let den = scale.iter().map(|v| v.sqrt()).sum::<f64>() + norm2(&bu);
        num.sqrt() / den.max(f64::MIN_POSITIVE)
    }

    fn picard(&self, s: &State, lambda: f64) -> Result<State> {
        let (c, _) = assemble_convection(&self.system.mesh, &self.system.dofmap, &s.u);
        let k = self.system.k.add(1.0, &c, lambda);
        let sol = self.system.solve_raw(&k, &self.system.load, &self.system.fixed, &self.system.targets())?;
        Ok(State { u: sol.u, p: sol.p, mu: sol.mean_multiplier, mult: sol.multipliers })
    }

    /// Newton in full form: `(K + lambda J(u_k)) u = l + lambda N(u_k)`.
    fn newton(&self, s: &State, lambda: f64) -> Result<State> {
        let sys = &self.system;
        let j = assemble_convection_jacobian(&sys.mesh, &sys.dofmap, &s.u);
        let (_, n) = assemble_convection(&sys.mesh, &sys.dofmap, &s.u);
        let k = sys.k.add(1.0, &j, lambda);
        let load: Vec<f64> = sys.load.iter().zip(&n).map(|(l, n)| l + lambda * n).collect();
        let degenerate = |detail: String| {
            Error::BranchDegeneracy(format!(
                "Newton matrix is singular ({detail}); the solution branch is not isolated, add a circulation pin on each hole"
            ))
        };
        let sol = sys.solve_raw(&k, &load, &sys.fixed, &sys.targets()).map_err(|e| degenerate(e.to_string()))?;
        if sol.residual > 1e-8 {
            return Err(degenerate(format!("linear residual {:.3e}", sol.residual)));
        }
        Ok(State { u: sol.u, p: sol.p, mu: sol.mean_multiplier, mult: sol.multipliers })
    }

    fn mix(a: &State, b: &State, theta: f64) -> State {
        let lerp = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(x, y)| x + theta * (y - x)).collect::<Vec<_>>();
        State { u: lerp(&a.u, &b.u), p: lerp(&a.p, &b.p), mu: a.mu + theta * (b.mu - a.mu), mult: lerp(&a.mult, &b.mult) }
    }

    /// Solve at one convection strength starting from `start`.
    fn solve_lambda(&self, start: State, lambda: f64, trace: &mut IterationTrace) -> Result<State> {
        let mut s = start;
        let mut res = self.residual(&s, lambda);
        trace.push(lambda, "start", res, self.energy(&s.u), 0.0);
        if res <= self.config.tolerance || lambda == 0.0 {
            return Ok(s);
        }
        let mut theta = self.config.damping;
        let mut increases = 0;
        let mut use_newton = self.config.mode == SolverMode::Newton;
        for _ in 0..self.config.max_iterations {
            if self.config.mode == SolverMode::PicardThenNewton && res < self.config.newton_switch {
                use_newton = true;
            }
            let (next, name) = if use_newton { (self.newton(&s, lambda)?, "newton") } else { (self.picard(&s, lambda)?, "picard") };
            let cand = if theta < 1.0 { Self::mix(&s, &next, theta) } else { next };
            let new_res = self.residual(&cand, lambda);
            trace.push(lambda, name, new_res, self.energy(&cand.u), theta);
            if !new_res.is_finite() {
                return Err(Error::NonConvergence {
                    message: format!("residual became non-finite at lambda = {lambda}"),
                    trace: Box::new(trace.clone()),
                });
            }
            if new_res > res {
                increases += 1;
                theta = (theta * 0.5).max(1.0 / 64.0);
                if increases >= 5 {
                    return Err(Error::NonConvergence {
                        message: format!("residual grew over 5 consecutive iterations at lambda = {lambda} (last {new_res:.3e})"),
                        trace: Box::new(trace.clone()),
                    });
                }
            } else {
                increases = 0;
            }
            s = cand;
            res = new_res;
            if res <= self.config.tolerance {
                return Ok(s);
            }
        }
        Err(Error::NonConvergence {
            message: format!(
                "no convergence in {} iterations at lambda = {lambda} (residual {res:.3e})",
                self.config.max_iterations
            ),
            trace: Box::new(trace.clone()),
        })
    }

    fn finish(&self, s: &State, lambda: f64, trace: &IterationTrace) -> FlowState {
        let mut flow = self.system.to_flow(&s.u, &s.p, if lambda == 1.0 { "navier-stokes" } else { "navier-stokes-lambda" });
        flow.metadata.residual = Some(self.residual(s, lambda));
        flow.metadata.trace = Some(trace.clone());
        if self.config.symmetric {
            flow.metadata.notes.push("solved in the mirror-symmetric subspace".into());
        }
        if lambda != 1.0 {
            flow.metadata.notes.push(format!("convection scaled by lambda = {lambda}"));
        }
        flow
    }

    /// Run the configured schedule from the Stokes lift.
    pub fn solve(&self) -> Result<FlowState> {
        let mut trace = IterationTrace::default();
        let mut s = self.lift.clone();
        let mut last = 0.0;
        for &lambda in &self.config.lambda_schedule {
            s = self.solve_lambda(s, lambda, &mut trace)?;
            last = lambda;
        }
        trace.converged = true;
        Ok(self.finish(&s, last, &trace))
    }

    /// Warm-started solves over a grid of convection strengths.
    pub fn sweep(&self, lambdas: &[f64]) -> Result<Vec<SweepPoint>> {
        let mut out = Vec::with_capacity(lambdas.len());
        let mut s = self.lift.clone();
        let mut prev = 0.0;
        for &lambda in lambdas {
            if !(0.0..=1.0).contains(&lambda) || lambda < prev {
                return Err(Error::Config("continuation grid must be increasing in [0, 1]".into()));
            }
            prev = lambda;
            let mut trace = IterationTrace::default();
            s = self.solve_lambda(s, lambda, &mut trace).map_err(|e| label_lambda(e, lambda))?;
            trace.converged = true;
            let w_norm = self.energy(&s.u).max(0.0).sqrt();
            out.push(SweepPoint { lambda, w_norm, flow: self.finish(&s, lambda, &trace) });
        }
        Ok(out)
    }
}

fn label_lambda(e: Error, lambda: f64) -> Error {
    match e {
        Error::NonConvergence { message, trace } => {
            Error::NonConvergence { message: format!("lambda = {lambda}: {message}"), trace }
        }
        Error::Solver(m) => Error::Solver(format!("lambda = {lambda}: {m}")),
        Error::BranchDegeneracy(m) => Error::BranchDegeneracy(format!("lambda = {lambda}: {m}")),
        other => other,
    }
}

/// One entry of a continuation sweep.
#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub lambda: f64,
    /// `|w|_J` of the deviation from the Stokes lift.
    pub w_norm: f64,
    pub flow: FlowState,
}

/// Solve the stationary Navier-Stokes slip problem.
pub fn solve_navier_stokes(mesh: &Arc<Mesh>, data: &ProblemData, config: &SolverConfig) -> Result<FlowState> {
    NavierStokesSolver::new(mesh, data, config)?.solve()
}

/// Solve in the subspace of fields with `u1` even and `u2` odd in `x2`.
pub fn solve_symmetric(mesh: &Arc<Mesh>, data: &ProblemData, config: &SolverConfig) -> Result<FlowState> {
    let config = SolverConfig { symmetric: true, ..config.clone() };
    solve_navier_stokes(mesh, data, &config)
}

/// Warm-started solves for each convection strength in `lambdas`.
pub fn continuation_sweep(
    mesh: &Arc<Mesh>,
    data: &ProblemData,
    lambdas: &[f64],
    config: &SolverConfig,
) -> Result<Vec<SweepPoint>> {
    NavierStokesSolver::new(mesh, data, config)?.sweep(lambdas)
}

fn mirror(x: Point) -> Point {
    [x[0], -x[1]]
}

/// For every node, the index of the node at its mirror image in the `x1` axis.
pub fn mirror_nodes(mesh: &Mesh) -> Result<Vec<usize>> {
    let diam = mesh.domain().diameter();
    let tol = 1e-9 * diam;
    let cell = mesh.h_max().max(tol);
    let key = |x: Point| ((x[0] / cell).floor() as i64, (x[1] / cell).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, &x) in mesh.nodes().iter().enumerate() {
        grid.entry(key(x)).or_default().push(i);
    }
    let mut out = Vec::with_capacity(mesh.n_nodes());
    for (i, &x) in mesh.nodes().iter().enumerate() {
        let y = mirror(x);
        let (kx, ky) = key(y);
        let mut found = None;
        'search: for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(list) = grid.get(&(kx + dx, ky + dy)) {
                    for &j in list {
                        let z = mesh.nodes()[j];
                        if (z[0] - y[0]).hypot(z[1] - y[1]) <= tol {
                            found = Some(j);
                            break 'search;
                        }
                    }
                }
            }
        }
        match found {
            Some(j) => out.push(j),
            None => return Err(Error::Mesh(format!("mesh is not mirror symmetric: node {i} at {x:?} has no mirror image"))),
        }
    }
    Ok(out)
}

/// Check the domain is admissible and the data mirror symmetric.
pub fn check_symmetric_setup(mesh: &Mesh, data: &ProblemData) -> Result<()> {
    if !classify_symmetry(mesh.domain()).admissible_x1 {
        return Err(Error::Data("domain is not mirror symmetric about the x1 axis".into()));
    }
    check_symmetric_data(mesh.domain(), data, mesh.nodes())
}

/// Mirror parity of the data about the `x1` axis: `a`, `beta` even, `b_tau`
/// odd on the boundary quadrature, `f1` even and `f2` odd at `points`.
pub fn check_symmetric_data(domain: &DomainSpec, data: &ProblemData, points: &[Point]) -> Result<()> {
    let tol = 1e-10;
    let scale = |v: f64, w: f64| tol * (1.0 + v.abs().max(w.abs()));
    for (s, _) in data.normal.samples(domain) {
        let (cm, tm, _) = domain.project(mirror(s.point()));
        let m = domain.sample(cm, tm)?;
        for (name, f, sign) in [("normal datum", &data.normal, 1.0), ("friction", &data.beta, 1.0), ("traction", &data.traction, -1.0)] {
            let (a, b) = (f.eval(&s), f.eval(&m));
            if (a - sign * b).abs() > scale(a, b) {
                return Err(Error::Data(format!(
                    "{name} is not mirror symmetric on component {}: {a} at t = {:.6} vs {b} at the mirror point",
                    s.component, s.t
                )));
            }
        }
    }
    if !data.force.is_zero() {
        for &x in points {
            let (f, g) = (data.force.eval(x), data.force.eval(mirror(x)));
            if (f[0] - g[0]).abs() > scale(f[0], g[0]) || (f[1] + g[1]).abs() > scale(f[1], g[1]) {
                return Err(Error::Data(format!("body force is not mirror symmetric at {x:?}")));
            }
        }
    }
    Ok(())
}

/// Reduction of the Stokes saddle unknowns to mirror-symmetric velocity and
/// pressure (`u1`, `p` even, `u2` odd in `x2`).
pub fn symmetric_reduction(system: &StokesSystem) -> Result<Reduction> {
    let mesh = &system.mesh;
    let mirror_of = mirror_nodes(mesh)?;
    let layout = &system.layout;
    let mut map = vec![None; layout.size()];
    let mut next = 0usize;
    let mut assign = |map: &mut Vec<Option<(usize, f64)>>, a: Option<usize>, b: Option<usize>, sign_b: f64, zero_if_same: bool| {
        match (a, b) {
            (Some(a), Some(b)) if a == b => {
                if !zero_if_same {
                    map[a] = Some((next, 1.0));
                    next += 1;
                }
            }
            (Some(a), Some(b)) => {
                if map[a].is_none() && map[b].is_none() {
                    map[a] = Some((next, 1.0));
                    map[b] = Some((next, sign_b));
                    next += 1;
                }
            }
            _ => {}
        }
    };
    let tol = 1e-8;
    for i in 0..mesh.n_nodes() {
        let j = mirror_of[i];
        if j < i {
            continue;
        }
        let (fi, fj) = (system.dofmap.frame(i), system.dofmap.frame(j));
        match (fi, fj) {
            (None, None) => {
                assign(&mut map, layout.index[2 * i], layout.index[2 * j], 1.0, false);
                assign(&mut map, layout.index[2 * i + 1], layout.index[2 * j + 1], -1.0, true);
            }
            (Some(a), Some(b)) => {
                // mirrored tangent is -R tau
                let t = a[1];
                let expected = [-t[0], t[1]];
                if (b[1][0] - expected[0]).abs() > tol || (b[1][1] - expected[1]).abs() > tol {
                    return Err(Error::Mesh(format!("boundary frames at nodes {i} and {j} are not mirror images")));
                }
                assign(&mut map, layout.index[2 * i + 1], layout.index[2 * j + 1], -1.0, true);
            }
            _ => return Err(Error::Mesh(format!("node {i} and its mirror {j} differ in boundary status"))),
        }
    }
    let po = layout.pressure_offset();
    for v in 0..mesh.n_vertices() {
        let w = mirror_of[v];
        if w >= mesh.n_vertices() {
            return Err(Error::Mesh(format!("vertex {v} mirrors onto a non-vertex node")));
        }
        if w >= v {
            assign(&mut map, Some(po + v), Some(po + w), 1.0, false);
        }
    }
    let mi = layout.mean_index();
    map[mi] = Some((next, 1.0));
    next += 1;
    for c in 0..layout.n_constraints {
        map[layout.constraint_offset() + c] = Some((next, 1.0));
        next += 1;
    }
    Ok(Reduction { map, size: next })
}

/// Largest mismatch `|u(Rx) - R u(x)|` over mirrored node pairs.
pub fn symmetry_defect(flow: &FlowState) -> Result<f64> {
    let m = mirror_nodes(&flow.mesh)?;
    let mut d = 0.0f64;
    for (i, &j) in m.iter().enumerate() {
        let (a, b) = (flow.velocity[i], flow.velocity[j]);
        d = d.max((a[0] - b[0]).abs()).max((a[1] + b[1]).abs());
    }
    for v in 0..flow.mesh.n_vertices() {
        d = d.max((flow.pressure[v] - flow.pressure[m[v]]).abs());
    }
    Ok(d)
}

/// `(u . grad) u` tested against `u`, for skew-symmetry checks.
pub fn convective_energy(mesh: &Mesh, dofmap: &crate::assembly::DofMap, u: &[f64]) -> f64 {
    let (_, n) = assemble_convection(mesh, dofmap, u);
    crate::sparse::dot(&n, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::BoundaryField;
    use crate::mesh::mesh_annulus;
    use crate::validation::hamel;
    use std::f64::consts::PI;

    fn annulus() -> Arc<Mesh> {
        Arc::new(mesh_annulus(1.0, 2.0, 4, 16).unwrap())
    }

    #[test]
    fn pinned_hamel_branches() {
        let m = annulus();
        for (k, pin) in [(0.0, 0.0), (1.0, 2.0 * PI)] {
            let ex = hamel(k);
            let cfg = SolverConfig { circulation_pins: vec![(1, pin)], ..Default::default() };
            let flow = solve_navier_stokes(&m, &ex.data, &cfg).unwrap();
            assert!(flow.metadata.residual.unwrap() <= 1e-10);
            assert!((flow.circulation(1) - pin).abs() < 1e-9);
            let e = flow.velocity_l2_error(|x| ex.velocity(x));
            assert!(e < 0.02, "k={k}: {e}");
            let trace = flow.metadata.trace.unwrap();
            assert!(trace.converged && trace.step.iter().any(|s| s == "newton"));
        }
    }

    #[test]
    fn modes_agree() {
        let m = annulus();
        let data = hamel(0.0).data;
        let solve = |mode| {
            let cfg = SolverConfig { mode, circulation_pins: vec![(1, 0.0)], ..Default::default() };
            solve_navier_stokes(&m, &data, &cfg).unwrap()
        };
        let (a, b) = (solve(SolverMode::Picard), solve(SolverMode::Newton));
        let d: f64 = a.velocity.iter().zip(&b.velocity).map(|(x, y)| (x[0] - y[0]).abs().max((x[1] - y[1]).abs())).fold(0.0, f64::max);
        assert!(d < 1e-8, "{d}");
    }

    #[test]
    fn symmetric_subspace_picks_the_swirl_free_branch() {
        let m = annulus();
        let data = hamel(0.0).data;
        let sym = solve_symmetric(&m, &data, &SolverConfig::default()).unwrap();
        assert!(symmetry_defect(&sym).unwrap() < 1e-10);
        let pinned = solve_navier_stokes(&m, &data, &SolverConfig { circulation_pins: vec![(1, 0.0)], ..Default::default() }).unwrap();
        let d = sym.velocity_l2_error(|x| pinned.eval_at(x).map_or([0.0; 2], |e| e.u));
        assert!(d < 1e-6, "{d}");
    }

    #[test]
    fn symmetric_mode_rejects_bad_input() {
        let m = annulus();
        let mut data = hamel(0.0).data;
        let pinned = SolverConfig { circulation_pins: vec![(1, 0.0)], ..Default::default() };
        assert!(matches!(solve_symmetric(&m, &data, &pinned), Err(Error::Config(_))));
        data.traction = BoundaryField::constants(&[0.0, 0.3]);
        assert!(matches!(solve_symmetric(&m, &data, &SolverConfig::default()), Err(Error::Data(_))));
    }

    #[test]
    fn lambda_zero_is_the_stokes_lift() {
        let m = annulus();
        let cfg = SolverConfig { lambda_schedule: vec![0.0], circulation_pins: vec![(1, 0.0)], ..Default::default() };
        let s = NavierStokesSolver::new(&m, &hamel(0.0).data, &cfg).unwrap();
        let flow = s.solve().unwrap();
        assert_eq!(flow.velocity, s.lift().velocity);
        let sweep = s.sweep(&[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(sweep[0].w_norm, 0.0);
        assert!(sweep[2].w_norm > 0.0);
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig { lambda_schedule: vec![1.0, 0.5], ..Default::default() }.validate().is_err());
        assert!(SolverConfig { damping: 0.0, ..Default::default() }.validate().is_err());
        let c: SolverConfig = serde_json::from_str(r#"{"mode": "newton", "circulation_pins": [[1, 0.5]]}"#).unwrap();
        assert_eq!(c.mode, SolverMode::Newton);
        assert!(serde_json::from_str::<SolverConfig>(r#"{"bogus": 1}"#).is_err());
    }
}
