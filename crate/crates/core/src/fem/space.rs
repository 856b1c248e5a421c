//! H1-conforming field spaces restricted to a set of subdomains.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use super::basis::{edge_nodes, node_position, RefTable};
use super::sparse::{SparseSym, SparsityPattern};
use super::FemError;
use crate::geometry::{BoundaryPart, EdgeTag, Mesh, Subdomain, LOCAL_EDGE_VERTICES};

/// Which mesh elements carry a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Support {
    All,
    Solid,
    Electrolyte,
    Anode,
    Cathode,
}

impl Support {
    pub fn contains(self, s: Subdomain) -> bool {
        match self {
            Support::All => true,
            Support::Solid => s.is_solid(),
            Support::Electrolyte => s == Subdomain::Electrolyte,
            Support::Anode => s == Subdomain::Anode,
            Support::Cathode => s == Subdomain::Cathode,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arity {
    Scalar,
    Vector,
}

impl Arity {
    pub fn components(self) -> usize {
        match self {
            Arity::Scalar => 1,
            Arity::Vector => 2,
        }
    }
}

/// Essential constraint on a boundary part; `component` selects one vector
/// component (`None` constrains all).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Constraint {
    pub part: BoundaryPart,
    pub component: Option<usize>,
}

/// Geometry of one volume quadrature point.
#[derive(Debug, Clone, Copy)]
pub struct QpGeom {
    pub x: [f64; 2],
    /// Quadrature weight times Jacobian determinant.
    pub wdet: f64,
    /// Inverse-transpose Jacobian: `grad_x = jit * grad_ref`.
    pub jit: [[f64; 2]; 2],
}

impl QpGeom {
    #[inline]
    pub fn physical(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.jit[0][0] * g[0] + self.jit[0][1] * g[1],
            self.jit[1][0] * g[0] + self.jit[1][1] * g[1],
        ]
    }
}

#[derive(Hash, PartialEq, Eq)]
enum NodeKey {
    Vertex(usize),
    Edge(usize, usize),
    Interior(usize, usize),
}

#[derive(Debug)]
pub struct FieldSpace {
    mesh: Arc<Mesh>,
    pub support: Support,
    pub arity: Arity,
    elements: Vec<usize>,
    local_of: Vec<Option<usize>>,
    elem_nodes: Vec<Vec<usize>>,
    node_coords: Vec<[f64; 2]>,
    free_map: Vec<Option<usize>>,
    n_free: usize,
    prescribed: Vec<f64>,
    tables: HashMap<[usize; 2], Arc<RefTable>>,
    pattern: OnceLock<Arc<SparsityPattern>>,
}

impl FieldSpace {
    pub fn build(
        mesh: &Arc<Mesh>,
        support: Support,
        arity: Arity,
        constraints: &[Constraint],
    ) -> Result<FieldSpace, FemError> {
        let elements: Vec<usize> = (0..mesh.elements.len())
            .filter(|&e| support.contains(mesh.elements[e].subdomain))
            .collect();
        if elements.is_empty() {
            return Err(FemError::EmptySupport(format!("{support:?}")));
        }
        let mut local_of = vec![None; mesh.elements.len()];
        for (l, &e) in elements.iter().enumerate() {
            local_of[e] = Some(l);
        }
        let mut ids: HashMap<NodeKey, usize> = HashMap::new();
        let mut node_coords = Vec::new();
        let mut elem_nodes = Vec::with_capacity(elements.len());
        let mut tables = HashMap::new();
        for &e in &elements {
            let el = &mesh.elements[e];
            let deg = el.degree;
            tables
                .entry(deg)
                .or_insert_with(|| Arc::new(RefTable::new(deg)));
            let n_local = (deg[0] + 1) * (deg[1] + 1);
            let mut keys: Vec<Option<NodeKey>> = (0..n_local).map(|_| None).collect();
            let corner = [
                0,
                deg[0],
                (deg[0] + 1) * (deg[1] + 1) - 1,
                deg[1] * (deg[0] + 1),
            ];
            for (c, &k) in corner.iter().enumerate() {
                keys[k] = Some(NodeKey::Vertex(el.vertices[c]));
            }
            for k in 0..4 {
                let list = edge_nodes(deg, k);
                let p = list.len() - 1;
                let gs = el.vertices[LOCAL_EDGE_VERTICES[k][0]];
                let ge = el.vertices[LOCAL_EDGE_VERTICES[k][1]];
                let edge = mesh.element_edges[e][k];
                for j in 1..p {
                    let jg = if gs < ge { j } else { p - j };
                    keys[list[j]] = Some(NodeKey::Edge(edge, jg));
                }
            }
            let mut nodes = Vec::with_capacity(n_local);
            for (k, key) in keys.into_iter().enumerate() {
                let key = key.unwrap_or(NodeKey::Interior(e, k));
                let next = ids.len();
                let id = *ids.entry(key).or_insert(next);
                if id == node_coords.len() {
                    let (x, _) = mesh.map(e, node_position(deg, k));
                    node_coords.push(x);
                }
                nodes.push(id);
            }
            elem_nodes.push(nodes);
        }
        let nc = arity.components();
        let n_dofs = node_coords.len() * nc;
        let mut constrained = vec![false; n_dofs];
        for edge in &mesh.edges {
            let EdgeTag::Boundary(part) = edge.tag else {
                continue;
            };
            for c in constraints.iter().filter(|c| c.part == part) {
                let (e, k) = edge.elements[0];
                let Some(l) = local_of[e] else { continue };
                for ln in edge_nodes(mesh.elements[e].degree, k) {
                    let g = elem_nodes[l][ln];
                    match c.component {
                        Some(comp) => constrained[g * nc + comp] = true,
                        None => (0..nc).for_each(|comp| constrained[g * nc + comp] = true),
                    }
                }
            }
        }
        let mut free_map = vec![None; n_dofs];
        let mut n_free = 0;
        for (d, c) in constrained.iter().enumerate() {
            if !c {
                free_map[d] = Some(n_free);
                n_free += 1;
            }
        }
        Ok(FieldSpace {
            mesh: mesh.clone(),
            support,
            arity,
            elements,
            local_of,
            elem_nodes,
            node_coords,
            free_map,
            n_free,
            prescribed: vec![0.0; n_dofs],
            tables,
            pattern: OnceLock::new(),
        })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    /// Mesh element ids in the support, in local order.
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn local_index(&self, mesh_element: usize) -> Option<usize> {
        self.local_of[mesh_element]
    }

    pub fn n_nodes(&self) -> usize {
        self.node_coords.len()
    }

    pub fn n_dofs(&self) -> usize {
        self.node_coords.len() * self.arity.components()
    }

    pub fn n_free(&self) -> usize {
        self.n_free
    }

    pub fn free_map(&self) -> &[Option<usize>] {
        &self.free_map
    }

    pub fn is_constrained(&self, dof: usize) -> bool {
        self.free_map[dof].is_none()
    }

    pub fn node_coords(&self) -> &[[f64; 2]] {
        &self.node_coords
    }

    pub fn element_nodes(&self, local: usize) -> &[usize] {
        &self.elem_nodes[local]
    }

    /// Global DOFs of a support element; vector DOFs are interleaved per node.
    pub fn element_dofs(&self, local: usize) -> Vec<usize> {
        let nc = self.arity.components();
        self.elem_nodes[local]
            .iter()
            .flat_map(|&n| (0..nc).map(move |c| n * nc + c))
            .collect()
    }

    pub fn table(&self, local: usize) -> &Arc<RefTable> {
        &self.tables[&self.mesh.elements[self.elements[local]].degree]
    }

    pub fn table_for_degree(&self, degree: [usize; 2]) -> Option<&Arc<RefTable>> {
        self.tables.get(&degree)
    }

    /// Geometry at the volume quadrature points of a support element.
    pub fn qp_geometry(&self, local: usize) -> Vec<QpGeom> {
        let e = self.elements[local];
        let t = self.table(local);
        t.rule
            .points
            .iter()
            .zip(&t.rule.weights)
            .map(|(p, w)| {
                let (x, j) = self.mesh.map(e, *p);
                let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
                let jit = [[j[1][1] / det, -j[1][0] / det], [-j[0][1] / det, j[0][0] / det]];
                QpGeom {
                    x,
                    wdet: w * det,
                    jit,
                }
            })
            .collect()
    }

    /// Full-DOF sparsity pattern (every pair of DOFs sharing an element).
    pub fn pattern(&self) -> Arc<SparsityPattern> {
        self.pattern
            .get_or_init(|| {
                let mut rows: Vec<Vec<usize>> = vec![Vec::new(); self.n_dofs()];
                for l in 0..self.elements.len() {
                    let dofs = self.element_dofs(l);
                    for &i in &dofs {
                        rows[i].extend_from_slice(&dofs);
                    }
                }
                Arc::new(SparsityPattern::from_rows(rows))
            })
            .clone()
    }

    /// Prescribed values of constrained DOFs, from a function of the node
    /// position and component.
    pub fn prescribe(&mut self, f: impl Fn([f64; 2], usize) -> f64) {
        let nc = self.arity.components();
        for d in 0..self.n_dofs() {
            if self.free_map[d].is_none() {
                self.prescribed[d] = f(self.node_coords[d / nc], d % nc);
            }
        }
    }

    /// Nodal interpolant of a function of position and component.
    pub fn interpolate(&self, f: impl Fn([f64; 2], usize) -> f64) -> Vec<f64> {
        let nc = self.arity.components();
        (0..self.n_dofs())
            .map(|d| f(self.node_coords[d / nc], d % nc))
            .collect()
    }

    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_free];
        for (d, m) in self.free_map.iter().enumerate() {
            if let Some(k) = m {
                out[*k] = full[d];
            }
        }
        out
    }

    pub fn expand(&self, free: &[f64]) -> Vec<f64> {
        self.free_map
            .iter()
            .enumerate()
            .map(|(d, m)| match m {
                Some(k) => free[*k],
                None => self.prescribed[d],
            })
            .collect()
    }

    /// Eliminates constrained DOFs: returns `(A_ff, b_f - A_fc g)`.
    pub fn constrain(&self, a: &SparseSym, b: &[f64]) -> (SparseSym, Vec<f64>) {
        let mut rhs = self.restrict(b);
        for i in 0..a.n() {
            let Some(fi) = self.free_map[i] else { continue };
            for (j, v) in a.row(i) {
                if self.free_map[j].is_none() {
                    rhs[fi] -= v * self.prescribed[j];
                }
            }
        }
        (a.submatrix(&self.free_map, self.n_free), rhs)
    }

    /// Scalar value and physical gradient at a reference point of a mesh
    /// element in the support.
    pub fn eval(&self, coeffs: &[f64], mesh_element: usize, r: [f64; 2]) -> (f64, [f64; 2]) {
        let l = self.local_of[mesh_element].expect("element outside field support");
        let t = self.table(l);
        let (v, g) = t.eval(r);
        let (_, j) = self.mesh.map(mesh_element, r);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let geo = QpGeom {
            x: [0.0; 2],
            wdet: 0.0,
            jit: [[j[1][1] / det, -j[1][0] / det], [-j[0][1] / det, j[0][0] / det]],
        };
        let nodes = &self.elem_nodes[l];
        let mut val = 0.0;
        let mut grad = [0.0; 2];
        for k in 0..nodes.len() {
            let c = coeffs[nodes[k]];
            val += c * v[k];
            let gp = geo.physical(g[k]);
            grad[0] += c * gp[0];
            grad[1] += c * gp[1];
        }
        (val, grad)
    }

    /// Scalar value and gradient at volume quadrature point `q` of support
    /// element `local`.
    #[inline]
    pub fn eval_qp(&self, coeffs: &[f64], local: usize, q: usize, geo: &QpGeom) -> (f64, [f64; 2]) {
        let t = self.table(local);
        let v = t.vals_at(q);
        let g = t.grads_at(q);
        let nodes = &self.elem_nodes[local];
        let mut val = 0.0;
        let mut gr = [0.0; 2];
        for k in 0..nodes.len() {
            let c = coeffs[nodes[k]];
            val += c * v[k];
            gr[0] += c * g[k][0];
            gr[1] += c * g[k][1];
        }
        (val, geo.physical(gr))
    }

    /// Vector value and gradient `grad[i][j] = d u_i / d x_j` at a volume
    /// quadrature point.
    pub fn eval_vec_qp(
        &self,
        coeffs: &[f64],
        local: usize,
        q: usize,
        geo: &QpGeom,
    ) -> ([f64; 2], [[f64; 2]; 2]) {
        let t = self.table(local);
        let v = t.vals_at(q);
        let g = t.grads_at(q);
        let nodes = &self.elem_nodes[local];
        let mut val = [0.0; 2];
        let mut grad = [[0.0; 2]; 2];
        for k in 0..nodes.len() {
            let gp = geo.physical(g[k]);
            for c in 0..2 {
                let a = coeffs[nodes[k] * 2 + c];
                val[c] += a * v[k];
                grad[c][0] += a * gp[0];
                grad[c][1] += a * gp[1];
            }
        }
        (val, grad)
    }

    /// Vector value at an arbitrary reference point.
    pub fn eval_vec(&self, coeffs: &[f64], mesh_element: usize, r: [f64; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
        let l = self.local_of[mesh_element].expect("element outside field support");
        let t = self.table(l);
        let (v, g) = t.eval(r);
        let (_, j) = self.mesh.map(mesh_element, r);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let geo = QpGeom {
            x: [0.0; 2],
            wdet: 0.0,
            jit: [[j[1][1] / det, -j[1][0] / det], [-j[0][1] / det, j[0][0] / det]],
        };
        let nodes = &self.elem_nodes[l];
        let mut val = [0.0; 2];
        let mut grad = [[0.0; 2]; 2];
        for k in 0..nodes.len() {
            let gp = geo.physical(g[k]);
            for c in 0..2 {
                let a = coeffs[nodes[k] * 2 + c];
                val[c] += a * v[k];
                grad[c][0] += a * gp[0];
                grad[c][1] += a * gp[1];
            }
        }
        (val, grad)
    }

    /// Integral of a scalar field over the support elements matching
    /// `region`, and the region's measure.
    pub fn integrate(&self, coeffs: &[f64], region: Support) -> (f64, f64) {
        let mut total = 0.0;
        let mut measure = 0.0;
        for l in 0..self.elements.len() {
            if !region.contains(self.mesh.elements[self.elements[l]].subdomain) {
                continue;
            }
            for (q, g) in self.qp_geometry(l).iter().enumerate() {
                let (v, _) = self.eval_qp(coeffs, l, q, g);
                total += v * g.wdet;
                measure += g.wdet;
            }
        }
        (total, measure)
    }
}
