//! Weak forms of the coupled cell equations.

pub mod kinetics;
pub mod model;
pub mod state;

pub use kinetics::{
    butler_volmer, current_density, exchange_current, linearized_conductance, ohmic_heat,
    reaction_heat, Guard, GuardAction, GuardPolicy, HeatSign, InterfaceSample, Medium, Traces,
};
pub use model::{electrode_of, CellModel, Field, ModelMode, ModelParams, StageReport};
pub use state::{relative_change, SimState};

use thiserror::Error;

use crate::fem::{FemError, SolveError};
use crate::materials::MaterialError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhysicsError {
    #[error("reaction kinetics overflow: sinh argument {argument:e} at overpotential {overpotential:e}")]
    KineticsOverflow { argument: f64, overpotential: f64 },
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("{quantity} {value:e} violates its guard at ({:.4}, {:.4})", position[0], position[1])]
    Guard {
        quantity: &'static str,
        value: f64,
        position: [f64; 2],
    },
    #[error("singular system: {0}")]
    Singular(String),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Material(#[from] MaterialError),
}
