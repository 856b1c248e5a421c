use std::fmt;

use super::{EdgeTag, Mesh};

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoElements,
    NonPositiveJacobian { element: usize, value: f64 },
    AspectRatio { element: usize, ratio: f64 },
    HangingNode { node: usize, edge: usize },
    InterfacePairing { edge: usize },
    DegreeMismatch { edge: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoElements => write!(f, "no elements"),
            Violation::NonPositiveJacobian { element, value } => {
                write!(f, "element {element}: Jacobian {value:e} is not positive")
            }
            Violation::AspectRatio { element, ratio } => {
                write!(f, "element {element}: aspect ratio {ratio:.3} exceeds bound")
            }
            Violation::HangingNode { node, edge } => {
                write!(f, "node {node} hangs on edge {edge}")
            }
            Violation::InterfacePairing { edge } => {
                write!(f, "interface edge {edge} is not electrode/electrolyte")
            }
            Violation::DegreeMismatch { edge } => {
                write!(f, "edge {edge}: neighbouring elements disagree on degree")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    pub elements: usize,
    pub min_jacobian: f64,
    pub max_aspect: f64,
    pub interior_edges: usize,
    pub interface_edges: usize,
    pub boundary_edges: usize,
    pub violations: Vec<Violation>,
}

impl QualityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the mesh invariants; never fails, only reports.
pub fn validate_mesh(mesh: &Mesh, aspect_bound: f64) -> QualityReport {
    let mut report = QualityReport {
        elements: mesh.elements.len(),
        min_jacobian: f64::INFINITY,
        max_aspect: 0.0,
        interior_edges: 0,
        interface_edges: 0,
        boundary_edges: 0,
        violations: Vec::new(),
    };
    if mesh.elements.is_empty() {
        report.violations.push(Violation::NoElements);
        return report;
    }
    for e in 0..mesh.elements.len() {
        // The bilinear Jacobian determinant is linear in each reference
        // coordinate, so its extremes sit at the corners.
        let mut jmin = f64::INFINITY;
        for r in [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]] {
            let (_, j) = mesh.map(e, r);
            jmin = jmin.min(j[0][0] * j[1][1] - j[0][1] * j[1][0]);
        }
        report.min_jacobian = report.min_jacobian.min(jmin);
        if jmin <= 0.0 {
            report.violations.push(Violation::NonPositiveJacobian {
                element: e,
                value: jmin,
            });
        }
        let p = mesh.vertex_coords(e);
        let d = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        let lens = [d(p[0], p[1]), d(p[1], p[2]), d(p[2], p[3]), d(p[3], p[0])];
        let mx = lens.iter().cloned().fold(0.0, f64::max);
        let mn = lens.iter().cloned().fold(f64::INFINITY, f64::min);
        let ratio = if mn > 0.0 { mx / mn } else { f64::INFINITY };
        report.max_aspect = report.max_aspect.max(ratio);
        if ratio > aspect_bound {
            report.violations.push(Violation::AspectRatio { element: e, ratio });
        }
    }
    let scale = (mesh.extent[2] - mesh.extent[0]).max(mesh.extent[3] - mesh.extent[1]);
    for (id, edge) in mesh.edges.iter().enumerate() {
        match edge.tag {
            EdgeTag::Interior => report.interior_edges += 1,
            EdgeTag::Interface => {
                report.interface_edges += 1;
                let ok = edge.elements.len() == 2 && {
                    let a = mesh.elements[edge.elements[0].0].subdomain;
                    let b = mesh.elements[edge.elements[1].0].subdomain;
                    a.is_solid() && !b.is_solid()
                };
                if !ok {
                    report.violations.push(Violation::InterfacePairing { edge: id });
                }
            }
            EdgeTag::Boundary(_) => report.boundary_edges += 1,
        }
        if edge.elements.len() == 2 {
            let (e0, k0) = edge.elements[0];
            let (e1, k1) = edge.elements[1];
            if mesh.edge_degree(e0, k0) != mesh.edge_degree(e1, k1) {
                report.violations.push(Violation::DegreeMismatch { edge: id });
            }
        }
        let a = mesh.nodes[edge.nodes[0]];
        let b = mesh.nodes[edge.nodes[1]];
        let len2 = (b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2);
        let (lo, hi) = (
            [a[0].min(b[0]), a[1].min(b[1])],
            [a[0].max(b[0]), a[1].max(b[1])],
        );
        let tol = 1e-10 * scale;
        for (n, p) in mesh.nodes.iter().enumerate() {
            if n == edge.nodes[0] || n == edge.nodes[1] {
                continue;
            }
            if p[0] < lo[0] - tol || p[0] > hi[0] + tol || p[1] < lo[1] - tol || p[1] > hi[1] + tol {
                continue;
            }
            let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
            if cross.abs() <= tol * len2.sqrt() {
                let t = ((p[0] - a[0]) * (b[0] - a[0]) + (p[1] - a[1]) * (b[1] - a[1])) / len2;
                if t > 1e-12 && t < 1.0 - 1e-12 {
                    report.violations.push(Violation::HangingNode { node: n, edge: id });
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Subdomain;

    #[test]
    fn empty_mesh_reports_no_elements() {
        let m = Mesh::new(vec![], vec![], 1.0).unwrap();
        let r = validate_mesh(&m, 10.0);
        assert_eq!(r.violations, vec![Violation::NoElements]);
    }

    #[test]
    fn inverted_element_flagged() {
        let mut m = Mesh::rectangle(2, 1, 2.0, 1.0, 1, Subdomain::Anode).unwrap();
        // drag the shared top node past the right wall
        let v = m.elements[0].vertices[2];
        m.nodes[v] = [5.0, 1.0];
        let r = validate_mesh(&m, 1e9);
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::NonPositiveJacobian { .. })));
    }
}
