//! Tensor-product Lagrange basis on Gauss-Lobatto nodes.
//!
//! Local node `(a, b)` of an element with degrees `(px, py)` has index
//! `b * (px + 1) + a`; `a` runs along xi, `b` along eta.

use super::quadrature::{gauss_lobatto_nodes, QuadratureRule};

#[derive(Debug, Clone)]
pub struct Lagrange1d {
    nodes: Vec<f64>,
    denom: Vec<f64>,
}

impl Lagrange1d {
    pub fn gll(p: usize) -> Self {
        let nodes = gauss_lobatto_nodes(p);
        let denom = (0..=p)
            .map(|i| {
                (0..=p)
                    .filter(|&j| j != i)
                    .map(|j| nodes[i] - nodes[j])
                    .product()
            })
            .collect();
        Lagrange1d { nodes, denom }
    }

    pub fn degree(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Values and derivatives of all basis polynomials at `x`.
    pub fn eval(&self, x: f64, vals: &mut [f64], ders: &mut [f64]) {
        let n = self.nodes.len();
        let diff: Vec<f64> = self.nodes.iter().map(|xj| x - xj).collect();
        for i in 0..n {
            let mut v = 1.0;
            let mut d = 0.0;
            for j in 0..n {
                if j == i {
                    continue;
                }
                // product rule accumulated on the fly
                d = d * diff[j] + v;
                v *= diff[j];
            }
            vals[i] = v / self.denom[i];
            ders[i] = d / self.denom[i];
        }
    }
}

/// Values and reference gradients of the tensor basis at one point.
pub fn shape_eval(degree: [usize; 2], point: [f64; 2]) -> (Vec<f64>, Vec<[f64; 2]>) {
    let bx = Lagrange1d::gll(degree[0]);
    let by = Lagrange1d::gll(degree[1]);
    tensor_eval(&bx, &by, point)
}

pub(crate) fn tensor_eval(
    bx: &Lagrange1d,
    by: &Lagrange1d,
    point: [f64; 2],
) -> (Vec<f64>, Vec<[f64; 2]>) {
    let nx = bx.degree() + 1;
    let ny = by.degree() + 1;
    let (mut vx, mut dx) = (vec![0.0; nx], vec![0.0; nx]);
    let (mut vy, mut dy) = (vec![0.0; ny], vec![0.0; ny]);
    bx.eval(point[0], &mut vx, &mut dx);
    by.eval(point[1], &mut vy, &mut dy);
    let mut vals = Vec::with_capacity(nx * ny);
    let mut grads = Vec::with_capacity(nx * ny);
    for b in 0..ny {
        for a in 0..nx {
            vals.push(vx[a] * vy[b]);
            grads.push([dx[a] * vy[b], vx[a] * dy[b]]);
        }
    }
    (vals, grads)
}

/// Reference position of local node `k`.
pub fn node_position(degree: [usize; 2], k: usize) -> [f64; 2] {
    let x = gauss_lobatto_nodes(degree[0]);
    let y = gauss_lobatto_nodes(degree[1]);
    let a = k % (degree[0] + 1);
    let b = k / (degree[0] + 1);
    [x[a], y[b]]
}

/// Local node indices along local edge `edge`, from its start vertex to its
/// end vertex (vertices included).
pub fn edge_nodes(degree: [usize; 2], edge: usize) -> Vec<usize> {
    let (px, py) = (degree[0], degree[1]);
    let id = |a: usize, b: usize| b * (px + 1) + a;
    match edge {
        0 => (0..=px).map(|a| id(a, 0)).collect(),
        1 => (0..=py).map(|b| id(px, b)).collect(),
        2 => (0..=px).rev().map(|a| id(a, py)).collect(),
        3 => (0..=py).rev().map(|b| id(0, b)).collect(),
        _ => panic!("local edge index {edge} out of range"),
    }
}

/// Reference point on local edge `edge` at parameter `s` in [-1, 1], running
/// from the edge's start vertex to its end vertex.
pub fn edge_point(edge: usize, s: f64) -> [f64; 2] {
    match edge {
        0 => [s, -1.0],
        1 => [1.0, s],
        2 => [-s, 1.0],
        3 => [-1.0, -s],
        _ => panic!("local edge index {edge} out of range"),
    }
}

/// Basis values and reference gradients tabulated at the volume rule used
/// for elements of a given degree pair.
#[derive(Debug, Clone)]
pub struct RefTable {
    pub degree: [usize; 2],
    pub n_local: usize,
    pub rule: QuadratureRule,
    /// `vals[q * n_local + k]`
    pub vals: Vec<f64>,
    pub grads: Vec<[f64; 2]>,
    pub bx: Lagrange1d,
    pub by: Lagrange1d,
}

impl RefTable {
    pub fn new(degree: [usize; 2]) -> Self {
        let bx = Lagrange1d::gll(degree[0]);
        let by = Lagrange1d::gll(degree[1]);
        let rule = QuadratureRule::square(QuadratureRule::order_for(degree));
        let n_local = (degree[0] + 1) * (degree[1] + 1);
        let mut vals = Vec::with_capacity(rule.points.len() * n_local);
        let mut grads = Vec::with_capacity(rule.points.len() * n_local);
        for p in &rule.points {
            let (v, g) = tensor_eval(&bx, &by, *p);
            vals.extend(v);
            grads.extend(g);
        }
        RefTable {
            degree,
            n_local,
            rule,
            vals,
            grads,
            bx,
            by,
        }
    }

    pub fn n_qp(&self) -> usize {
        self.rule.points.len()
    }

    pub fn vals_at(&self, q: usize) -> &[f64] {
        &self.vals[q * self.n_local..(q + 1) * self.n_local]
    }

    pub fn grads_at(&self, q: usize) -> &[[f64; 2]] {
        &self.grads[q * self.n_local..(q + 1) * self.n_local]
    }

    pub fn eval(&self, point: [f64; 2]) -> (Vec<f64>, Vec<[f64; 2]>) {
        tensor_eval(&self.bx, &self.by, point)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bilinear_centre() {
        let (v, _) = shape_eval([1, 1], [0.0, 0.0]);
        assert_eq!(v, vec![0.25; 4]);
    }

    #[test]
    fn partition_of_unity() {
        for deg in [[1, 1], [2, 3], [4, 2], [5, 5]] {
            for pt in [[0.3, -0.7], [-1.0, 1.0], [0.91, 0.12]] {
                let (v, g) = shape_eval(deg, pt);
                assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-13);
                let gx: f64 = g.iter().map(|g| g[0]).sum();
                let gy: f64 = g.iter().map(|g| g[1]).sum();
                assert!(gx.abs() < 1e-12 && gy.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn edges_are_consistent_with_points() {
        let deg = [3, 2];
        for e in 0..4 {
            let nodes = edge_nodes(deg, e);
            let start = node_position(deg, nodes[0]);
            let end = node_position(deg, *nodes.last().unwrap());
            assert_eq!(start, edge_point(e, -1.0));
            assert_eq!(end, edge_point(e, 1.0));
        }
    }
}
