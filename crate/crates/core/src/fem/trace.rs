//! Quadrature on the electrode/electrolyte interface and on boundary parts.

use super::basis::{edge_point, shape_eval};
use super::quadrature::gauss_legendre;
use super::space::FieldSpace;
use crate::geometry::{BoundaryPart, EdgeTag, Mesh, LOCAL_EDGE_VERTICES};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterfaceSide {
    Solid,
    Electrolyte,
}

/// Points on one element edge together with the element's basis values
/// there.
#[derive(Debug, Clone)]
pub struct EdgeTrace {
    pub element: usize,
    pub local_edge: usize,
    pub reference: Vec<[f64; 2]>,
    /// `vals[q]` holds all local basis values at point `q`.
    pub vals: Vec<Vec<f64>>,
}

impl EdgeTrace {
    fn new(mesh: &Mesh, edge: usize, element: usize, local_edge: usize, s: &[f64]) -> Self {
        let el = &mesh.elements[element];
        let start = el.vertices[LOCAL_EDGE_VERTICES[local_edge][0]];
        let flip = start != mesh.edges[edge].nodes[0];
        let reference: Vec<[f64; 2]> = s
            .iter()
            .map(|&t| edge_point(local_edge, if flip { -t } else { t }))
            .collect();
        let vals = reference
            .iter()
            .map(|r| shape_eval(el.degree, *r).0)
            .collect();
        EdgeTrace {
            element,
            local_edge,
            reference,
            vals,
        }
    }

    /// Trace of a scalar field at point `q`.
    pub fn value(&self, space: &FieldSpace, coeffs: &[f64], q: usize) -> f64 {
        let l = space
            .local_index(self.element)
            .expect("edge element outside field support");
        space
            .element_nodes(l)
            .iter()
            .zip(&self.vals[q])
            .map(|(n, v)| coeffs[*n] * v)
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct InterfaceEdge {
    pub edge: usize,
    /// Unit normal pointing from the electrode into the electrolyte.
    pub normal: [f64; 2],
    pub solid: EdgeTrace,
    pub electrolyte: EdgeTrace,
    pub x: Vec<[f64; 2]>,
    /// Quadrature weight times edge length scale.
    pub weights: Vec<f64>,
    /// Index of the first point in flat per-point arrays.
    pub offset: usize,
}

impl InterfaceEdge {
    pub fn side(&self, side: InterfaceSide) -> &EdgeTrace {
        match side {
            InterfaceSide::Solid => &self.solid,
            InterfaceSide::Electrolyte => &self.electrolyte,
        }
    }
}

/// Matched quadrature on both sides of every interface edge.
#[derive(Debug, Clone)]
pub struct InterfaceQuadrature {
    pub edges: Vec<InterfaceEdge>,
    pub n_points: usize,
}

fn edge_rule(mesh: &Mesh, edge: usize) -> (Vec<f64>, Vec<f64>, Vec<[f64; 2]>) {
    let e = &mesh.edges[edge];
    let deg = e
        .elements
        .iter()
        .map(|&(el, k)| mesh.edge_degree(el, k))
        .max()
        .unwrap_or(1);
    let (s, w) = gauss_legendre(deg + 2);
    let pa = mesh.nodes[e.nodes[0]];
    let pb = mesh.nodes[e.nodes[1]];
    let half = 0.5 * mesh.edge_length(edge);
    let x = s
        .iter()
        .map(|&t| {
            let a = 0.5 * (1.0 + t);
            [pa[0] + a * (pb[0] - pa[0]), pa[1] + a * (pb[1] - pa[1])]
        })
        .collect();
    let w = w.iter().map(|w| w * half).collect();
    (s, w, x)
}

impl InterfaceQuadrature {
    pub fn new(mesh: &Mesh) -> Self {
        let mut edges = Vec::new();
        let mut offset = 0;
        for id in mesh.edges_with(EdgeTag::Interface) {
            let e = &mesh.edges[id];
            let (s, weights, x) = edge_rule(mesh, id);
            let (se, sk) = e.elements[0];
            let (ee, ek) = e.elements[1];
            let n = s.len();
            edges.push(InterfaceEdge {
                edge: id,
                normal: e.normal.unwrap_or([0.0, 0.0]),
                solid: EdgeTrace::new(mesh, id, se, sk, &s),
                electrolyte: EdgeTrace::new(mesh, id, ee, ek, &s),
                x,
                weights,
                offset,
            });
            offset += n;
        }
        InterfaceQuadrature {
            edges,
            n_points: offset,
        }
    }

    pub fn length(&self) -> f64 {
        self.edges.iter().flat_map(|e| &e.weights).sum()
    }

    /// Integral of per-point values stored in a flat array.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.edges
            .iter()
            .map(|e| {
                e.weights
                    .iter()
                    .enumerate()
                    .map(|(q, w)| w * values[e.offset + q])
                    .sum::<f64>()
            })
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct BoundaryEdge {
    pub edge: usize,
    pub trace: EdgeTrace,
    pub x: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

/// Quadrature on the edges of one boundary part.
#[derive(Debug, Clone)]
pub struct BoundaryQuadrature {
    pub part: BoundaryPart,
    pub edges: Vec<BoundaryEdge>,
}

impl BoundaryQuadrature {
    pub fn new(mesh: &Mesh, part: BoundaryPart) -> Self {
        let edges = mesh
            .edges_with(EdgeTag::Boundary(part))
            .map(|id| {
                let (s, weights, x) = edge_rule(mesh, id);
                let (el, k) = mesh.edges[id].elements[0];
                BoundaryEdge {
                    edge: id,
                    trace: EdgeTrace::new(mesh, id, el, k, &s),
                    x,
                    weights,
                }
            })
            .collect();
        BoundaryQuadrature { part, edges }
    }

    pub fn length(&self) -> f64 {
        self.edges.iter().flat_map(|e| &e.weights).sum()
    }
}
