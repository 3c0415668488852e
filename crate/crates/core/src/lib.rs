//! Steady Stokes and Navier-Stokes flow with Navier slip boundary conditions
//! on multiply-connected planar domains.
//!
//! The discretization is Taylor-Hood (P2 velocity, P1 pressure) on
//! triangulations whose boundary triangles are isoparametric P2 elements
//! snapped to the exact boundary curves. The normal boundary datum is imposed
//! by rotating boundary velocity dofs to the local (n, tau) frame and
//! eliminating the normal component.
//!
//! Besides the solvers the crate evaluates the classical existence conditions
//! for the slip problem (curvature-versus-friction margin, outflow, small
//! harmonic flux, symmetry) and a set of diagnostics of computed flows.

pub mod analysis;
pub mod assembly;
pub mod error;
pub mod export;
pub mod extensions;
pub mod fem;
pub mod flow;
pub mod geometry;
pub mod linear;
pub mod mesh;
pub mod navier_stokes;
pub mod parallel;
pub mod quadrature;
pub mod sparse;
pub mod validation;

pub use error::{Error, Result};
pub use geometry::{BoundaryFrame, BoundarySample, Curve, DomainSpec, Point};
pub use mesh::Mesh;
