//! Reference basis, quadrature, field spaces, assembly and linear solvers.

pub mod assemble;
pub mod basis;
pub mod quadrature;
pub mod solve;
pub mod space;
pub mod sparse;
pub mod trace;

pub use assemble::{
    assemble_boundary_source, assemble_dilatation_source, assemble_elasticity,
    assemble_flux_source, assemble_interface_mass, assemble_interface_source, assemble_mass,
    assemble_source, assemble_stiffness, QpCtx,
};
pub use basis::{shape_eval, Lagrange1d, RefTable};
pub use quadrature::{gauss_legendre, gauss_lobatto_nodes, QuadratureRule};
pub use solve::{solve_spd, Cholesky, SolveError, SolverMethod, SolverOptions, SpdSolver};
pub use space::{Arity, Constraint, FieldSpace, QpGeom, Support};
pub use sparse::{SparseSym, SparsityPattern};
pub use trace::{BoundaryQuadrature, EdgeTrace, InterfaceEdge, InterfaceQuadrature, InterfaceSide};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FemError {
    #[error("field support {0} contains no elements")]
    EmptySupport(String),
    #[error("non-positive coefficient {value:e} at element {element}, quadrature point {qp}")]
    NonPositiveCoefficient { element: usize, qp: usize, value: f64 },
    #[error(transparent)]
    Solve(#[from] SolveError),
}
