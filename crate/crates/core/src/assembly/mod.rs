//! Taylor-Hood forms of the slip problem.
//!
//! Velocity dofs are numbered `2 * node + c`. At boundary nodes the pair is
//! expressed in the local `(n, tau)` basis (`c = 0` normal, `c = 1`
//! tangential); elsewhere it is Cartesian. Pressure dofs are the mesh
//! vertices.

mod data;
mod dofs;
mod forms;

pub use data::{BodyForce, BoundaryField, BoundaryValue, ProblemData};
pub use dofs::{DofMap, LocalRotation};
pub use forms::{
    apply_normal_trace, assemble_body_force, assemble_boundary_traction, assemble_convection,
    assemble_convection_jacobian, assemble_divergence, assemble_friction, assemble_gradient_stiffness,
    assemble_mass, assemble_viscous, circulation_functional, pressure_mean_vector, NormalTrace,
};
