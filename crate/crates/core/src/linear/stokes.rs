use std::sync::Arc;

use super::{Constraint, Reduction, SaddleLayout, SparseSolver};
use crate::assembly::{
    apply_normal_trace, assemble_body_force, assemble_boundary_traction, assemble_divergence, assemble_friction,
    assemble_mass, assemble_viscous, circulation_functional, pressure_mean_vector, DofMap, NormalTrace, ProblemData,
};
use crate::error::{Error, Result};
use crate::flow::FlowState;
use crate::geometry::{classify_symmetry, Point};
use crate::mesh::Mesh;
use crate::sparse::{dot, norm2, CsrMatrix};

/// When to remove the rigid rotation by an orthogonality constraint.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RotationHandling {
    /// Only when the friction vanishes and the domain is circularly symmetric.
    #[default]
    Auto,
    Never,
    Always,
}

#[derive(Clone, Debug, Default)]
pub struct StokesOptions {
    /// `(component, value)`: prescribe the circulation of `u` on that component.
    pub circulation_pins: Vec<(usize, f64)>,
    pub rotation: RotationHandling,
    pub extra_constraints: Vec<Constraint>,
}

/// Interpolated rigid rotation about `center`, normalized in L2.
#[derive(Clone, Debug)]
pub struct RigidMode {
    pub center: Point,
    pub dofs: Vec<f64>,
}

pub fn rigid_mode(mesh: &Mesh, dofmap: &DofMap, center: Point) -> RigidMode {
    let mut dofs = dofmap.interpolate(mesh, |x| [-(x[1] - center[1]), x[0] - center[0]]);
    // tangential by construction; clear rounding in the normal dofs
    for d in dofmap.normal_dofs() {
        dofs[d] = 0.0;
    }
    let m = assemble_mass(mesh, dofmap);
    let s = m.bilinear(&dofs, &dofs).sqrt();
    dofs.iter_mut().for_each(|v| *v /= s);
    RigidMode { center, dofs }
}

/// Solution of a saddle solve in dof form.
#[derive(Clone, Debug)]
pub struct SaddleSolution {
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    pub mean_multiplier: f64,
    pub multipliers: Vec<f64>,
    pub residual: f64,
}

/// Assembled Stokes slip problem: velocity operator `A + M` (viscous plus
/// friction), divergence, load, normal trace and side constraints.
pub struct StokesSystem {
    pub mesh: Arc<Mesh>,
    pub data: ProblemData,
    pub dofmap: DofMap,
    pub trace: NormalTrace,
    pub k: CsrMatrix,
    pub divergence: CsrMatrix,
    pub mean: Vec<f64>,
    pub load: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub layout: SaddleLayout,
    pub fixed: Vec<f64>,
    pub rotation: Option<RigidMode>,
    pub compatibility_residual: Option<f64>,
    pub pins: Vec<(usize, f64)>,
    /// Restriction of the saddle unknowns to an invariant subspace.
    pub reduction: Option<Reduction>,
}

impl StokesSystem {
    pub fn new(mesh: &Arc<Mesh>, data: &ProblemData, options: &StokesOptions) -> Result<Self> {
        let domain = mesh.domain();
        data.validate(domain)?;
        let dofmap = DofMap::new(mesh);
        let trace = apply_normal_trace(mesh, &dofmap, data)?;
        let k = assemble_viscous(mesh, &dofmap, data.nu).add(1.0, &assemble_friction(mesh, &dofmap, data)?, 1.0);
        let divergence = assemble_divergence(mesh, &dofmap);
        let mean = pressure_mean_vector(mesh);
        let mut load = assemble_body_force(mesh, &dofmap, data);
        for (l, t) in load.iter_mut().zip(assemble_boundary_traction(mesh, &dofmap, data)) {
            *l += t;
        }

        let mut constraints = Vec::new();
        for &(j, value) in &options.circulation_pins {
            if j >= domain.components() {
                return Err(Error::Config(format!("circulation pin on component {j}, domain has {}", domain.components())));
            }
            constraints.push(Constraint::from_dense(format!("circulation[{j}]"), &circulation_functional(mesh, &dofmap, j), value));
        }

        let center = classify_symmetry(domain).circularly_symmetric;
        let want = match options.rotation {
            RotationHandling::Never => false,
            RotationHandling::Always => {
                if center.is_none() {
                    return Err(Error::Data("rotation constraint requested on a domain without circular symmetry".into()));
                }
                true
            }
            RotationHandling::Auto => center.is_some() && data.beta.vanishes(domain) && options.circulation_pins.is_empty(),
        };
        let (mut rotation, mut compatibility_residual) = (None, None);
        if want {
            let mode = rigid_mode(mesh, &dofmap, center.expect("checked"));
            let nl = norm2(&load);
            let res = if nl == 0.0 { 0.0 } else { dot(&load, &mode.dofs).abs() / (nl * norm2(&mode.dofs)) };
            if res > 1e-8 {
                return Err(Error::Data(format!(
                    "friction vanishes on a circularly symmetric domain but the load is not orthogonal to the rigid rotation (relative residual {res:.3e})"
                )));
            }
            let m = assemble_mass(mesh, &dofmap);
            constraints.push(Constraint::from_dense("rotation", &m.mul_vec(&mode.dofs), 0.0));
            rotation = Some(mode);
            compatibility_residual = Some(res);
        }
        constraints.extend(options.extra_constraints.iter().cloned());

        let (mask, fixed) = trace.mask(dofmap.n_velocity());
        let layout = SaddleLayout::new(&mask, dofmap.n_pressure(), constraints.len());
        Ok(Self {
            mesh: mesh.clone(),
            data: data.clone(),
            dofmap,
            trace,
            k,
            divergence,
            mean,
            load,
            constraints,
            layout,
            fixed,
            rotation,
            compatibility_residual,
            pins: options.circulation_pins.clone(),
            reduction: None,
        })
    }

    /// Solve with velocity operator `k`, load, fixed normal values and
    /// constraint targets (all supplied by the caller).
    pub fn solve_raw(&self, k: &CsrMatrix, load: &[f64], fixed: &[f64], targets: &[f64]) -> Result<SaddleSolution> {
        let constraints: Vec<Constraint> = self
            .constraints
            .iter()
            .zip(targets)
            .map(|(c, &t)| Constraint { label: c.label.clone(), terms: c.terms.clone(), target: t })
            .collect();
        let a = self.layout.matrix(k, &self.divergence, &self.mean, &constraints);
        let b = self.layout.rhs(k, &self.divergence, load, fixed, &constraints);
        let (x, residual) = match &self.reduction {
            None => {
                let solver = SparseSolver::lu(&a)?;
                let x = solver.solve(&b)?;
                let res = solver.relative_residual(&x, &b);
                (x, res)
            }
            Some(red) => {
                let rb = red.reduce_vec(&b);
                let solver = SparseSolver::lu(&red.reduce_matrix(&a))?;
                let y = solver.solve(&rb)?;
                let res = solver.relative_residual(&y, &rb);
                (red.expand(&y), res)
            }
        };
        let (u, p, mean_multiplier, multipliers) = self.layout.unpack(&x, fixed);
        Ok(SaddleSolution { u, p, mean_multiplier, multipliers, residual })
    }

    pub fn targets(&self) -> Vec<f64> {
        self.constraints.iter().map(|c| c.target).collect()
    }

    pub fn solve_dofs(&self) -> Result<SaddleSolution> {
        self.solve_raw(&self.k, &self.load, &self.fixed, &self.targets())
    }

    /// Wrap velocity/pressure dofs as a flow field with this system's metadata.
    pub fn to_flow(&self, u: &[f64], p: &[f64], problem: &str) -> FlowState {
        let mut flow = FlowState::new(self.mesh.clone(), self.dofmap.to_cartesian(u), p.to_vec(), self.data.nu);
        flow.metadata.problem = problem.into();
        flow.metadata.rotation_constraint = self.rotation.is_some();
        flow.metadata.compatibility_residual = self.compatibility_residual;
        flow.metadata.circulation_pins = self.pins.clone();
        if self.rotation.is_some() {
            flow.metadata.notes.push("rigid rotation removed by L2 orthogonality constraint".into());
        }
        flow
    }

    pub fn solve(&self) -> Result<FlowState> {
        let s = self.solve_dofs()?;
        let mut flow = self.to_flow(&s.u, &s.p, "stokes");
        flow.metadata.residual = Some(s.residual);
        Ok(flow)
    }
}

/// Solve the Stokes problem with Navier slip conditions.
pub fn solve_stokes(mesh: &Arc<Mesh>, data: &ProblemData, options: &StokesOptions) -> Result<FlowState> {
    StokesSystem::new(mesh, data, options)?.solve()
}
