//! Cell layout, layered quadrilateral meshing and mesh quality checks.

mod domain;
mod generate;
mod mesh;
mod quality;

pub use domain::{BoundaryPart, CellDimensions, DomainGeometry, Subdomain};
pub use generate::{generate_layered_mesh, MeshSpec};
pub use mesh::{Edge, EdgeTag, Element, Mesh, LOCAL_EDGE_VERTICES};
pub use quality::{validate_mesh, QualityReport, Violation};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid cell dimensions: {}", .0.join("; "))]
    InvalidDimensions(Vec<String>),
    #[error("invalid mesh spec: {}", .0.join("; "))]
    InvalidSpec(Vec<String>),
    #[error("degenerate polygon for {0}")]
    DegeneratePolygon(&'static str),
    #[error("bounding box mismatch: built {built:?}, expected {expected:?}")]
    BoundingBox { built: [f64; 2], expected: [f64; 2] },
    #[error("graded layers do not fit: finest layer {thickness:e} m in an interval of {interval:e} m")]
    LayerBudget { thickness: f64, interval: f64 },
    #[error("mesh topology error: {0}")]
    Topology(String),
}
