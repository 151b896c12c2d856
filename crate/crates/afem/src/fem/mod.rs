//! Finite element core: sparse operators for the variable-coefficient
//! heat equation, homogeneous Dirichlet conditions, and a conjugate
//! gradient solver.

mod assembly;
mod quadrature;
mod solve;
mod sparse;

pub use assembly::{
    apply_dirichlet, assemble_load, assemble_mass, assemble_stiffness, stiffness_kappa_vjp,
};
pub use quadrature::QuadratureRule;
pub use solve::{l2_error, l2_normsq, l2_normsq_with, solve_forward, solve_spd, solve_spd_with, SolveOptions};
pub use sparse::SparseMatrix;

use thiserror::Error;

use crate::mesh::MeshError;

#[derive(Debug, Error)]
pub enum FemError {
    #[error("coefficient produced a non-finite value in element {element}")]
    AssemblyNonFinite { element: usize },
    #[error("conjugate gradient did not converge: relative residual {residual:.3e} after {iterations} iterations")]
    SolveFailed { residual: f64, iterations: usize },
    #[error("matrix is not positive definite (p'Ap = {0:.3e})")]
    NotPositiveDefinite(f64),
    #[error("dimension mismatch: matrix is {rows}x{cols}, vector has {len} entries")]
    DimensionMismatch { rows: usize, cols: usize, len: usize },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}
