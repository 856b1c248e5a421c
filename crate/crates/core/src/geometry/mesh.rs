use std::collections::HashMap;

use super::{BoundaryPart, GeometryError, Subdomain};

/// Local vertex pairs of the four element edges, counter-clockwise.
pub const LOCAL_EDGE_VERTICES: [[usize; 2]; 4] = [[0, 1], [1, 2], [2, 3], [3, 0]];

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    /// Counter-clockwise vertex ids; vertex 0 maps to reference (-1, -1).
    pub vertices: [usize; 4],
    pub subdomain: Subdomain,
    /// Polynomial degree along the reference xi and eta directions.
    pub degree: [usize; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeTag {
    Interior,
    /// Electrode/electrolyte interface; the electrode element is listed first.
    Interface,
    Boundary(BoundaryPart),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Global node ids, smaller first.
    pub nodes: [usize; 2],
    pub tag: EdgeTag,
    /// `(element, local edge)` pairs.
    pub elements: Vec<(usize, usize)>,
    /// For interface edges, the unit normal pointing into the electrolyte.
    pub normal: Option<[f64; 2]>,
}

/// Conforming quadrilateral mesh in internal length units.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub nodes: Vec<[f64; 2]>,
    pub elements: Vec<Element>,
    pub edges: Vec<Edge>,
    pub element_edges: Vec<[usize; 4]>,
    /// SI length of one internal unit (m).
    pub length_unit: f64,
    /// `[xmin, ymin, xmax, ymax]`
    pub extent: [f64; 4],
}

impl Mesh {
    /// Builds edge connectivity and tags. Boundary parts are assigned from the
    /// bounding box of the nodes.
    pub fn new(
        nodes: Vec<[f64; 2]>,
        elements: Vec<Element>,
        length_unit: f64,
    ) -> Result<Mesh, GeometryError> {
        let mut extent = [f64::MAX, f64::MAX, f64::MIN, f64::MIN];
        for p in &nodes {
            extent[0] = extent[0].min(p[0]);
            extent[1] = extent[1].min(p[1]);
            extent[2] = extent[2].max(p[0]);
            extent[3] = extent[3].max(p[1]);
        }
        if nodes.is_empty() {
            extent = [0.0; 4];
        }
        let mut map: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut element_edges = Vec::with_capacity(elements.len());
        for (e, el) in elements.iter().enumerate() {
            for v in el.vertices {
                if v >= nodes.len() {
                    return Err(GeometryError::Topology(format!(
                        "element {e} references missing node {v}"
                    )));
                }
            }
            let mut ids = [0; 4];
            for (k, pair) in LOCAL_EDGE_VERTICES.iter().enumerate() {
                let a = el.vertices[pair[0]];
                let b = el.vertices[pair[1]];
                let key = [a.min(b), a.max(b)];
                let id = *map.entry(key).or_insert_with(|| {
                    edges.push(Edge {
                        nodes: key,
                        tag: EdgeTag::Interior,
                        elements: Vec::new(),
                        normal: None,
                    });
                    edges.len() - 1
                });
                edges[id].elements.push((e, k));
                ids[k] = id;
            }
            element_edges.push(ids);
        }
        let scale = (extent[2] - extent[0]).max(extent[3] - extent[1]).max(1e-300);
        let tol = 1e-9 * scale;
        for (id, edge) in edges.iter_mut().enumerate() {
            let pa = nodes[edge.nodes[0]];
            let pb = nodes[edge.nodes[1]];
            match edge.elements.len() {
                1 => {
                    let on = |k: usize, v: f64| (pa[k] - v).abs() < tol && (pb[k] - v).abs() < tol;
                    let part = if on(0, extent[0]) {
                        BoundaryPart::CollectorMinus
                    } else if on(0, extent[2]) {
                        BoundaryPart::CollectorPlus
                    } else if on(1, extent[1]) {
                        BoundaryPart::Bottom
                    } else if on(1, extent[3]) {
                        BoundaryPart::Top
                    } else {
                        return Err(GeometryError::Topology(format!(
                            "boundary edge {id} does not lie on the bounding box"
                        )));
                    };
                    edge.tag = EdgeTag::Boundary(part);
                }
                2 => {
                    let sa = elements[edge.elements[0].0].subdomain;
                    let sb = elements[edge.elements[1].0].subdomain;
                    if sa == sb {
                        continue;
                    }
                    if sa.is_solid() && sb.is_solid() {
                        return Err(GeometryError::Topology(format!(
                            "edge {id} joins two different electrodes"
                        )));
                    }
                    if !sa.is_solid() {
                        edge.elements.swap(0, 1);
                    }
                    edge.tag = EdgeTag::Interface;
                    let t = [pb[0] - pa[0], pb[1] - pa[1]];
                    let len = (t[0] * t[0] + t[1] * t[1]).sqrt();
                    let mut n = [t[1] / len, -t[0] / len];
                    let c = centroid(&nodes, &elements[edge.elements[1].0]);
                    let mid = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
                    if n[0] * (c[0] - mid[0]) + n[1] * (c[1] - mid[1]) < 0.0 {
                        n = [-n[0], -n[1]];
                    }
                    edge.normal = Some(n);
                }
                k => {
                    return Err(GeometryError::Topology(format!(
                        "edge {id} shared by {k} elements"
                    )))
                }
            }
        }
        Ok(Mesh {
            nodes,
            elements,
            edges,
            element_edges,
            length_unit,
            extent,
        })
    }

    /// Structured mesh on the tensor grid `xs` x `ys` with per-column and
    /// per-row degrees. Each cell is classified at its centre.
    pub fn tensor(
        xs: &[f64],
        ys: &[f64],
        column_degree: &[usize],
        row_degree: &[usize],
        classify: impl Fn([f64; 2]) -> Subdomain,
        length_unit: f64,
    ) -> Result<Mesh, GeometryError> {
        let nx = xs.len().saturating_sub(1);
        let ny = ys.len().saturating_sub(1);
        if column_degree.len() != nx || row_degree.len() != ny {
            return Err(GeometryError::Topology(
                "degree arrays do not match the grid".into(),
            ));
        }
        let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
        for &y in ys {
            for &x in xs {
                nodes.push([x, y]);
            }
        }
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut elements = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let c = [0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])];
                elements.push(Element {
                    vertices: [id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)],
                    subdomain: classify(c),
                    degree: [column_degree[i], row_degree[j]],
                });
            }
        }
        Mesh::new(nodes, elements, length_unit)
    }

    /// Uniform `nx` x `ny` grid on `[0, w] x [0, h]` with a single region.
    pub fn rectangle(
        nx: usize,
        ny: usize,
        w: f64,
        h: f64,
        degree: usize,
        sub: Subdomain,
    ) -> Result<Mesh, GeometryError> {
        let xs: Vec<f64> = (0..=nx).map(|i| w * i as f64 / nx as f64).collect();
        let ys: Vec<f64> = (0..=ny).map(|j| h * j as f64 / ny as f64).collect();
        Mesh::tensor(&xs, &ys, &vec![degree; nx], &vec![degree; ny], |_| sub, 1.0)
    }

    pub fn vertex_coords(&self, e: usize) -> [[f64; 2]; 4] {
        let v = self.elements[e].vertices;
        [self.nodes[v[0]], self.nodes[v[1]], self.nodes[v[2]], self.nodes[v[3]]]
    }

    /// Bilinear map of element `e`: physical point and Jacobian
    /// `jac[i][j] = d x_i / d xi_j`.
    pub fn map(&self, e: usize, r: [f64; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
        let p = self.vertex_coords(e);
        let (xi, eta) = (r[0], r[1]);
        let n = [
            0.25 * (1.0 - xi) * (1.0 - eta),
            0.25 * (1.0 + xi) * (1.0 - eta),
            0.25 * (1.0 + xi) * (1.0 + eta),
            0.25 * (1.0 - xi) * (1.0 + eta),
        ];
        let dxi = [
            -0.25 * (1.0 - eta),
            0.25 * (1.0 - eta),
            0.25 * (1.0 + eta),
            -0.25 * (1.0 + eta),
        ];
        let deta = [
            -0.25 * (1.0 - xi),
            -0.25 * (1.0 + xi),
            0.25 * (1.0 + xi),
            0.25 * (1.0 - xi),
        ];
        let mut x = [0.0; 2];
        let mut j = [[0.0; 2]; 2];
        for k in 0..4 {
            for d in 0..2 {
                x[d] += n[k] * p[k][d];
                j[d][0] += dxi[k] * p[k][d];
                j[d][1] += deta[k] * p[k][d];
            }
        }
        (x, j)
    }

    pub fn element_area(&self, e: usize) -> f64 {
        super::domain::polygon_area(&self.vertex_coords(e))
    }

    /// Degree along local edge `k` of element `e`.
    pub fn edge_degree(&self, e: usize, k: usize) -> usize {
        self.elements[e].degree[k % 2]
    }

    pub fn edge_length(&self, edge: usize) -> f64 {
        let [a, b] = self.edges[edge].nodes;
        let (pa, pb) = (self.nodes[a], self.nodes[b]);
        ((pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2)).sqrt()
    }

    pub fn subdomain_area(&self, sub: Subdomain) -> f64 {
        (0..self.elements.len())
            .filter(|&e| self.elements[e].subdomain == sub)
            .map(|e| self.element_area(e))
            .sum()
    }

    pub fn edges_with(&self, tag: EdgeTag) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.tag == tag)
            .map(|(i, _)| i)
    }

    pub fn boundary_length(&self, part: BoundaryPart) -> f64 {
        self.edges_with(EdgeTag::Boundary(part))
            .map(|i| self.edge_length(i))
            .sum()
    }
}

fn centroid(nodes: &[[f64; 2]], el: &Element) -> [f64; 2] {
    let mut c = [0.0; 2];
    for v in el.vertices {
        c[0] += 0.25 * nodes[v][0];
        c[1] += 0.25 * nodes[v][1];
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangle_tags() {
        let m = Mesh::rectangle(3, 2, 3.0, 2.0, 1, Subdomain::Electrolyte).unwrap();
        assert_eq!(m.elements.len(), 6);
        assert_eq!(m.edges.len(), 17);
        assert_eq!(m.edges_with(EdgeTag::Interior).count(), 7);
        assert!((m.boundary_length(BoundaryPart::CollectorMinus) - 2.0).abs() < 1e-14);
        assert!((m.boundary_length(BoundaryPart::Top) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn interface_normal_points_into_electrolyte() {
        let m = Mesh::tensor(
            &[0.0, 1.0, 2.0],
            &[0.0, 1.0],
            &[1, 1],
            &[1],
            |p| if p[0] < 1.0 { Subdomain::Anode } else { Subdomain::Electrolyte },
            1.0,
        )
        .unwrap();
        let e: Vec<usize> = m.edges_with(EdgeTag::Interface).collect();
        assert_eq!(e.len(), 1);
        let edge = &m.edges[e[0]];
        assert_eq!(edge.normal, Some([1.0, 0.0]));
        assert_eq!(m.elements[edge.elements[0].0].subdomain, Subdomain::Anode);
    }

    #[test]
    fn map_of_rectangle() {
        let m = Mesh::rectangle(1, 1, 2.0, 4.0, 1, Subdomain::Anode).unwrap();
        let (x, j) = m.map(0, [0.0, 0.0]);
        assert_eq!(x, [1.0, 2.0]);
        assert_eq!(j, [[1.0, 0.0], [0.0, 2.0]]);
    }
}
