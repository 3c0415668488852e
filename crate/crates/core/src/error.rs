//! Error type shared by every module.

use thiserror::Error;

use crate::navier_stokes::IterationTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("meshing error: {0}")]
    Mesh(String),
    #[error("mesh import error: {0}")]
    Import(String),
    #[error("data error: {0}")]
    Data(String),
    /// The normal boundary datum does not carry zero total flux.
    #[error("compatibility error: total boundary flux {total:.6e} exceeds tolerance {tolerance:.3e} (the normal datum must satisfy a zero net flux condition)")]
    Compatibility { total: f64, tolerance: f64 },
    #[error("solver error: {0}")]
    Solver(String),
    #[error("no convergence: {message}")]
    NonConvergence {
        message: String,
        trace: Box<IterationTrace>,
    },
    #[error("singular Newton matrix ({0}); the solution branch is degenerate, pin the circulation on the holes to select a branch")]
    BranchDegeneracy(String),
    #[error("numerical rank deficiency: {0}")]
    NumericalRank(String),
    #[error("stream function is multivalued: component {component} carries flux {flux:.6e}")]
    MultivaluedStream { component: usize, flux: f64 },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by the input data rather than by the numerics.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Data(_)
                | Error::Compatibility { .. }
                | Error::Config(_)
                | Error::Geometry(_)
                | Error::Mesh(_)
                | Error::Import(_)
        )
    }
}
