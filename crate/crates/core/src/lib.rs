//! Two-dimensional hp finite-element simulator for the coupled
//! thermo-electro-chemo-mechanical behaviour of an interdigitated
//! lithium-ion cell microstructure.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] builds the cell layout and the layered quadrilateral mesh.
//! * [`fem`] provides the reference basis, quadrature, field spaces, sparse
//!   assembly and the SPD solver.
//! * [`materials`] holds the constitutive laws and default parameters.
//! * [`physics`] assembles the six coupled weak equations.
//! * [`integrator`] advances the staggered semi-implicit midpoint scheme.
//! * [`postprocess`] computes quantities of interest and writes outputs.
//! * [`config`] parses scenarios and converts to internal units.

pub mod config;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod integrator;
pub mod materials;
pub mod physics;
pub mod postprocess;
pub mod units;
pub mod verification;

pub use error::{Error, Result};
