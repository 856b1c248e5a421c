//! Independent oracles shared by the integration tests: a brute-force dense
//! assembler with its own basis, quadrature and element map, golden material
//! values, and desk-scale scenario settings.
#![allow(dead_code)]

use voltacell::config::ScenarioConfig;
use voltacell::fem::FieldSpace;
use voltacell::geometry::{EdgeTag, Mesh, MeshSpec};

// Golden values evaluated with 40-digit arithmetic (mpmath) from the
// constitutive formulas and default parameters.
pub const KAPPA_D_298: f64 = -6.546469160156601e-3;
pub const OCP_ANODE_HALF: f64 = 0.13453181139592737;
pub const OCP_CATHODE_HALF: f64 = 4.122828504808762;
pub const EXCHANGE_ANODE_HALF: f64 = 0.7477321192073729;
pub const OPEN_CIRCUIT_VOLTAGE_HALF: f64 = 3.9882966934128346;

/// Coarse mesh, 6 s steps, ten simulated minutes.
pub fn desk(preset: &str) -> ScenarioConfig {
    let mut c = ScenarioConfig::preset(preset).unwrap();
    c.mesh = MeshSpec::coarse();
    c.dt = 6.0;
    c.t_end = 600.0;
    c.output.write_vtk = false;
    c
}

/// Gauss-Legendre nodes and weights by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let (pn, pm) = if n == 1 { (z, 1.0) } else { (p1, p0) };
            let dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                let (mut q0, mut q1) = (1.0, z);
                for k in 2..=n {
                    let q2 = ((2 * k - 1) as f64 * z * q1 - (k - 1) as f64 * q0) / k as f64;
                    q0 = q1;
                    q1 = q2;
                }
                let (qn, qm) = if n == 1 { (z, 1.0) } else { (q1, q0) };
                let dq = n as f64 * (z * qn - qm) / (z * z - 1.0);
                w[i] = 2.0 / ((1.0 - z * z) * dq * dq);
                break;
            }
        }
        x[i] = z;
    }
    (x, w)
}

/// Gauss-Lobatto-Legendre nodes in closed form, ascending.
pub fn gll(p: usize) -> Vec<f64> {
    match p {
        1 => vec![-1.0, 1.0],
        2 => vec![-1.0, 0.0, 1.0],
        3 => {
            let a = (1.0f64 / 5.0).sqrt();
            vec![-1.0, -a, a, 1.0]
        }
        4 => {
            let a = (3.0f64 / 7.0).sqrt();
            vec![-1.0, -a, 0.0, a, 1.0]
        }
        _ => panic!("oracle supports degrees 1 to 4"),
    }
}

/// Lagrange cardinal values and derivatives on `nodes` at `x`.
pub fn lagrange(nodes: &[f64], x: f64) -> (Vec<f64>, Vec<f64>) {
    let n = nodes.len();
    let mut v = vec![1.0; n];
    let mut d = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            if j != i {
                v[i] *= (x - nodes[j]) / (nodes[i] - nodes[j]);
            }
        }
        for k in 0..n {
            if k == i {
                continue;
            }
            let mut t = 1.0 / (nodes[i] - nodes[k]);
            for j in 0..n {
                if j != i && j != k {
                    t *= (x - nodes[j]) / (nodes[i] - nodes[j]);
                }
            }
            d[i] += t;
        }
    }
    (v, d)
}

/// Tensor basis of degree `[px, py]` at `(xi, eta)`: values and reference
/// gradients, local index `b (px + 1) + a`.
pub fn tensor_basis(deg: [usize; 2], xi: f64, eta: f64) -> (Vec<f64>, Vec<[f64; 2]>) {
    let (vx, dx) = lagrange(&gll(deg[0]), xi);
    let (vy, dy) = lagrange(&gll(deg[1]), eta);
    let mut v = Vec::new();
    let mut g = Vec::new();
    for b in 0..=deg[1] {
        for a in 0..=deg[0] {
            v.push(vx[a] * vy[b]);
            g.push([dx[a] * vy[b], vx[a] * dy[b]]);
        }
    }
    (v, g)
}

/// Bilinear map from the reference square: position, Jacobian determinant
/// and inverse-transpose Jacobian.
pub fn bilinear(v: [[f64; 2]; 4], xi: f64, eta: f64) -> ([f64; 2], f64, [[f64; 2]; 2]) {
    let n = [
        0.25 * (1.0 - xi) * (1.0 - eta),
        0.25 * (1.0 + xi) * (1.0 - eta),
        0.25 * (1.0 + xi) * (1.0 + eta),
        0.25 * (1.0 - xi) * (1.0 + eta),
    ];
    let dxi = [-0.25 * (1.0 - eta), 0.25 * (1.0 - eta), 0.25 * (1.0 + eta), -0.25 * (1.0 + eta)];
    let deta = [-0.25 * (1.0 - xi), -0.25 * (1.0 + xi), 0.25 * (1.0 + xi), 0.25 * (1.0 - xi)];
    let mut x = [0.0; 2];
    let mut j = [[0.0; 2]; 2];
    for k in 0..4 {
        for c in 0..2 {
            x[c] += n[k] * v[k][c];
            j[c][0] += dxi[k] * v[k][c];
            j[c][1] += deta[k] * v[k][c];
        }
    }
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let jit = [
        [j[1][1] / det, -j[1][0] / det],
        [-j[0][1] / det, j[0][0] / det],
    ];
    (x, det, jit)
}

fn physical(jit: &[[f64; 2]; 2], g: [f64; 2]) -> [f64; 2] {
    [
        jit[0][0] * g[0] + jit[0][1] * g[1],
        jit[1][0] * g[0] + jit[1][1] * g[1],
    ]
}

pub type Dense = Vec<Vec<f64>>;

/// Brute-force element loop with a tensor Gauss rule of `max degree + 2`
/// points per direction, the rule the assembler uses.
fn element_quadrature(
    space: &FieldSpace,
    mut body: impl FnMut(&[usize], [f64; 2], f64, &[f64], &[[f64; 2]]),
) {
    let mesh = space.mesh();
    for (l, &e) in space.elements().iter().enumerate() {
        let el = &mesh.elements[e];
        let n = el.degree[0].max(el.degree[1]) + 2;
        let (qx, qw) = gauss_legendre(n);
        let verts = el.vertices.map(|k| mesh.nodes[k]);
        let nodes = space.element_nodes(l);
        for (i, &xi) in qx.iter().enumerate() {
            for (j, &eta) in qx.iter().enumerate() {
                let (x, det, jit) = bilinear(verts, xi, eta);
                let (v, g) = tensor_basis(el.degree, xi, eta);
                let gp: Vec<[f64; 2]> = g.iter().map(|&g| physical(&jit, g)).collect();
                body(nodes, x, qw[i] * qw[j] * det, &v, &gp);
            }
        }
    }
}

pub fn dense_mass(space: &FieldSpace, rho: impl Fn([f64; 2]) -> f64) -> Dense {
    let n = space.n_dofs();
    let mut a = vec![vec![0.0; n]; n];
    element_quadrature(space, |nodes, x, w, v, _| {
        for i in 0..nodes.len() {
            for j in 0..nodes.len() {
                a[nodes[i]][nodes[j]] += rho(x) * w * v[i] * v[j];
            }
        }
    });
    a
}

pub fn dense_stiffness(space: &FieldSpace, k: impl Fn([f64; 2]) -> f64) -> Dense {
    let n = space.n_dofs();
    let mut a = vec![vec![0.0; n]; n];
    element_quadrature(space, |nodes, x, w, _, g| {
        for i in 0..nodes.len() {
            for j in 0..nodes.len() {
                a[nodes[i]][nodes[j]] += k(x) * w * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
            }
        }
    });
    a
}

/// Plane-strain `int lambda div u div v + 2 G eps(u) : eps(v)` with
/// interleaved components.
pub fn dense_elasticity(space: &FieldSpace, shear: f64, bulk: f64) -> Dense {
    let n = space.n_dofs();
    let lambda = bulk - 2.0 * shear / 3.0;
    let mut a = vec![vec![0.0; n]; n];
    element_quadrature(space, |nodes, _, w, _, g| {
        for i in 0..nodes.len() {
            for ci in 0..2 {
                // strain of the basis field phi_i e_ci
                let mut ei = [[0.0; 2]; 2];
                ei[ci][0] += 0.5 * g[i][0];
                ei[ci][1] += 0.5 * g[i][1];
                ei[0][ci] += 0.5 * g[i][0];
                ei[1][ci] += 0.5 * g[i][1];
                let div_i = g[i][ci];
                for j in 0..nodes.len() {
                    for cj in 0..2 {
                        let mut ej = [[0.0; 2]; 2];
                        ej[cj][0] += 0.5 * g[j][0];
                        ej[cj][1] += 0.5 * g[j][1];
                        ej[0][cj] += 0.5 * g[j][0];
                        ej[1][cj] += 0.5 * g[j][1];
                        let div_j = g[j][cj];
                        let mut dd = 0.0;
                        for r in 0..2 {
                            for s in 0..2 {
                                dd += ei[r][s] * ej[r][s];
                            }
                        }
                        a[2 * nodes[i] + ci][2 * nodes[j] + cj] +=
                            w * (lambda * div_i * div_j + 2.0 * shear * dd);
                    }
                }
            }
        }
    });
    a
}

/// `int_Gamma u w` over the electrode/electrolyte interface using the basis
/// of the electrode element (`electrode = true`) or the electrolyte element.
pub fn dense_interface_mass(space: &FieldSpace, electrode: bool) -> Dense {
    let mesh: &Mesh = space.mesh();
    let n = space.n_dofs();
    let mut a = vec![vec![0.0; n]; n];
    for edge in mesh.edges.iter().filter(|e| e.tag == EdgeTag::Interface) {
        let (e, k) = edge
            .elements
            .iter()
            .copied()
            .find(|&(e, _)| mesh.elements[e].subdomain.is_solid() == electrode)
            .expect("interface edge has both sides");
        let Some(l) = space.local_index(e) else { continue };
        let el = &mesh.elements[e];
        let p0 = mesh.nodes[edge.nodes[0]];
        let p1 = mesh.nodes[edge.nodes[1]];
        let half = 0.5 * ((p1[0] - p0[0]).powi(2) + (p1[1] - p0[1]).powi(2)).sqrt();
        let (qx, qw) = gauss_legendre(el.degree[0].max(el.degree[1]) + 3);
        let nodes = space.element_nodes(l);
        for (s, w) in qx.iter().zip(&qw) {
            let (xi, eta) = match k {
                0 => (*s, -1.0),
                1 => (1.0, *s),
                2 => (*s, 1.0),
                _ => (-1.0, *s),
            };
            let (v, _) = tensor_basis(el.degree, xi, eta);
            for i in 0..nodes.len() {
                for j in 0..nodes.len() {
                    a[nodes[i]][nodes[j]] += w * half * v[i] * v[j];
                }
            }
        }
    }
    a
}

/// `max |a - b| / max |b|`
pub fn relative_gap(a: &Dense, b: &Dense) -> f64 {
    let mut diff: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            diff = diff.max((x - y).abs());
            scale = scale.max(y.abs());
        }
    }
    diff / scale
}
