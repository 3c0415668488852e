//! Linear problems: scalar Laplace solves, the Stokes saddle system with slip
//! conditions, and the Korn and Sobolev constant estimates.

mod korn;
mod laplace;
mod saddle;
mod sobolev;
mod solver;
mod stokes;

pub use korn::{korn_constant, KornEstimate, KornOptions};
pub use laplace::{scalar_stiffness, scalar_mass, solve_laplace_dirichlet, solve_laplace_neumann, ScalarSystem};
pub use saddle::{Constraint, Reduction, SaddleLayout};
pub use sobolev::{sobolev_constant, SobolevEstimate, SobolevOptions};
pub use solver::SparseSolver;
pub use stokes::{rigid_mode, solve_stokes, RigidMode, RotationHandling, StokesOptions, StokesSystem};
