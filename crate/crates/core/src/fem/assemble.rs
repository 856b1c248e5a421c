//! Element loops producing full-DOF matrices and load vectors.
//!
//! Element contributions are computed in parallel and accumulated in element
//! order, so results do not depend on the thread count.

use rayon::prelude::*;

use super::space::{FieldSpace, QpGeom};
use super::sparse::SparseSym;
use super::trace::{BoundaryQuadrature, InterfaceQuadrature, InterfaceSide};
use super::FemError;

/// Location handed to coefficient closures at a volume quadrature point.
#[derive(Debug, Clone, Copy)]
pub struct QpCtx<'a> {
    /// Mesh element id.
    pub element: usize,
    /// Index of the element within the assembling space.
    pub local: usize,
    pub q: usize,
    pub geo: &'a QpGeom,
}

impl QpCtx<'_> {
    pub fn x(&self) -> [f64; 2] {
        self.geo.x
    }

    /// Index of the same element in another space on the same mesh.
    pub fn local_in(&self, space: &FieldSpace) -> usize {
        space
            .local_index(self.element)
            .expect("coefficient evaluated outside field support")
    }

    /// Scalar field value and gradient from another space at this point.
    pub fn field(&self, space: &FieldSpace, coeffs: &[f64]) -> (f64, [f64; 2]) {
        space.eval_qp(coeffs, self.local_in(space), self.q, self.geo)
    }

    pub fn vector_field(&self, space: &FieldSpace, coeffs: &[f64]) -> ([f64; 2], [[f64; 2]; 2]) {
        space.eval_vec_qp(coeffs, self.local_in(space), self.q, self.geo)
    }
}

fn element_loop<T, F>(space: &FieldSpace, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &[QpGeom]) -> T + Sync,
{
    (0..space.elements().len())
        .into_par_iter()
        .map(|l| f(l, &space.qp_geometry(l)))
        .collect()
}

fn scatter_matrix(space: &FieldSpace, blocks: Vec<Vec<f64>>) -> SparseSym {
    let mut a = SparseSym::zeros(space.pattern());
    for (l, ke) in blocks.into_iter().enumerate() {
        let dofs = space.element_dofs(l);
        let n = dofs.len();
        for i in 0..n {
            for j in 0..n {
                let v = ke[i * n + j];
                if v != 0.0 {
                    a.add(dofs[i], dofs[j], v);
                }
            }
        }
    }
    a
}

fn scatter_vector(space: &FieldSpace, blocks: Vec<Vec<f64>>) -> Vec<f64> {
    let mut b = vec![0.0; space.n_dofs()];
    for (l, fe) in blocks.into_iter().enumerate() {
        for (d, v) in space.element_dofs(l).into_iter().zip(fe) {
            b[d] += v;
        }
    }
    b
}

/// `int a u w` for a scalar space.
pub fn assemble_mass<C>(space: &FieldSpace, coef: C) -> SparseSym
where
    C: Fn(&QpCtx) -> f64 + Sync,
{
    let blocks = element_loop(space, |l, geo| {
        let t = space.table(l);
        let n = t.n_local;
        let mut ke = vec![0.0; n * n];
        for (q, g) in geo.iter().enumerate() {
            let ctx = QpCtx {
                element: space.elements()[l],
                local: l,
                q,
                geo: g,
            };
            let a = coef(&ctx) * g.wdet;
            let v = t.vals_at(q);
            for i in 0..n {
                let ai = a * v[i];
                for j in 0..n {
                    ke[i * n + j] += ai * v[j];
                }
            }
        }
        ke
    });
    scatter_matrix(space, blocks)
}

/// `int k grad u . grad w` for a scalar space; `k` must be positive.
pub fn assemble_stiffness<C>(space: &FieldSpace, coef: C) -> Result<SparseSym, FemError>
where
    C: Fn(&QpCtx) -> f64 + Sync,
{
    let blocks = element_loop(space, |l, geo| -> Result<Vec<f64>, FemError> {
        let t = space.table(l);
        let n = t.n_local;
        let mut ke = vec![0.0; n * n];
        let mut gp = vec![[0.0; 2]; n];
        for (q, g) in geo.iter().enumerate() {
            let ctx = QpCtx {
                element: space.elements()[l],
                local: l,
                q,
                geo: g,
            };
            let k = coef(&ctx);
            if !(k > 0.0 && k.is_finite()) {
                return Err(FemError::NonPositiveCoefficient {
                    element: space.elements()[l],
                    qp: q,
                    value: k,
                });
            }
            for (p, r) in gp.iter_mut().zip(t.grads_at(q)) {
                *p = g.physical(*r);
            }
            let a = k * g.wdet;
            for i in 0..n {
                for j in 0..n {
                    ke[i * n + j] += a * (gp[i][0] * gp[j][0] + gp[i][1] * gp[j][1]);
                }
            }
        }
        Ok(ke)
    });
    let blocks = blocks.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(scatter_matrix(space, blocks))
}

/// Plane-strain elasticity `int 2G eps(u):eps(v) + lambda div u div v` with
/// `lambda = K - 2G/3`; coefficients return `(G, K)`.
pub fn assemble_elasticity<C>(space: &FieldSpace, moduli: C) -> SparseSym
where
    C: Fn(&QpCtx) -> (f64, f64) + Sync,
{
    let blocks = element_loop(space, |l, geo| {
        let t = space.table(l);
        let n = t.n_local;
        let m = 2 * n;
        let mut ke = vec![0.0; m * m];
        let mut gp = vec![[0.0; 2]; n];
        for (q, g) in geo.iter().enumerate() {
            let ctx = QpCtx {
                element: space.elements()[l],
                local: l,
                q,
                geo: g,
            };
            let (sh, bulk) = moduli(&ctx);
            let lam = bulk - 2.0 * sh / 3.0;
            for (p, r) in gp.iter_mut().zip(t.grads_at(q)) {
                *p = g.physical(*r);
            }
            let w = g.wdet;
            for a in 0..n {
                for b in 0..n {
                    let (ga, gb) = (gp[a], gp[b]);
                    let dot = ga[0] * gb[0] + ga[1] * gb[1];
                    for i in 0..2 {
                        for j in 0..2 {
                            // 2G eps(phi_a e_i):eps(phi_b e_j) + lambda d_i phi_a d_j phi_b
                            let mut v = lam * ga[i] * gb[j] + sh * ga[j] * gb[i];
                            if i == j {
                                v += sh * dot;
                            }
                            ke[(2 * a + i) * m + 2 * b + j] += w * v;
                        }
                    }
                }
            }
        }
        ke
    });
    scatter_matrix(space, blocks)
}

/// `int f w` for a scalar space.
pub fn assemble_source<C>(space: &FieldSpace, f: C) -> Vec<f64>
where
    C: Fn(&QpCtx) -> f64 + Sync,
{
    let blocks = element_loop(space, |l, geo| {
        let t = space.table(l);
        let mut fe = vec![0.0; t.n_local];
        for (q, g) in geo.iter().enumerate() {
            let ctx = QpCtx {
                element: space.elements()[l],
                local: l,
                q,
                geo: g,
            };
            let a = f(&ctx) * g.wdet;
            for (o, v) in fe.iter_mut().zip(t.vals_at(q)) {
                *o += a * v;
            }
        }
        fe
    });
    scatter_vector(space, blocks)
}

/// `int g . grad w` for a scalar space.
pub fn assemble_flux_source<C>(space: &FieldSpace, flux: C) -> Vec<f64>
where
    C: Fn(&QpCtx) -> [f64; 2] + Sync,
{
    let blocks = element_loop(space, |l, geo| {
        let t = space.table(l);
        let mut fe = vec![0.0; t.n_local];
        for (q, g) in geo.iter().enumerate() {
            let ctx = QpCtx {
                element: space.elements()[l],
                local: l,
                q,
                geo: g,
            };
            let v = flux(&ctx);
            for (o, r) in fe.iter_mut().zip(t.grads_at(q)) {
                let p = g.physical(*r);
                *o += g.wdet * (v[0] * p[0] + v[1] * p[1]);
            }
        }
        fe
    });
    scatter_vector(space, blocks)
}

/// `int s div v` for a vector space.
pub fn assemble_dilatation_source<C>(space: &FieldSpace, s: C) -> Vec<f64>
where
    C: Fn(&QpCtx) -> f64 + Sync,
{
    let blocks = element_loop(space, |l, geo| {
        let t = space.table(l);
        let mut fe = vec![0.0; 2 * t.n_local];
        for (q, g) in geo.iter().enumerate() {
            let ctx = QpCtx {
                element: space.elements()[l],
                local: l,
                q,
                geo: g,
            };
            let a = s(&ctx) * g.wdet;
            for (k, r) in t.grads_at(q).iter().enumerate() {
                let p = g.physical(*r);
                fe[2 * k] += a * p[0];
                fe[2 * k + 1] += a * p[1];
            }
        }
        fe
    });
    scatter_vector(space, blocks)
}

/// `int_Gamma a u w` using traces from one side of the interface;
/// `coef(edge_index, q)` is evaluated per interface point.
pub fn assemble_interface_mass<C>(
    space: &FieldSpace,
    iq: &InterfaceQuadrature,
    side: InterfaceSide,
    coef: C,
) -> SparseSym
where
    C: Fn(usize, usize) -> f64,
{
    let mut a = SparseSym::zeros(space.pattern());
    for (ei, e) in iq.edges.iter().enumerate() {
        let tr = e.side(side);
        let Some(l) = space.local_index(tr.element) else {
            continue;
        };
        let nodes = space.element_nodes(l);
        for q in 0..e.weights.len() {
            let w = coef(ei, q) * e.weights[q];
            if w == 0.0 {
                continue;
            }
            let v = &tr.vals[q];
            for i in 0..nodes.len() {
                if v[i] == 0.0 {
                    continue;
                }
                for j in 0..nodes.len() {
                    if v[j] != 0.0 {
                        a.add(nodes[i], nodes[j], w * v[i] * v[j]);
                    }
                }
            }
        }
    }
    a
}

/// `int_Gamma f w` using traces from one side of the interface.
pub fn assemble_interface_source<C>(
    space: &FieldSpace,
    iq: &InterfaceQuadrature,
    side: InterfaceSide,
    f: C,
) -> Vec<f64>
where
    C: Fn(usize, usize) -> f64,
{
    let mut b = vec![0.0; space.n_dofs()];
    for (ei, e) in iq.edges.iter().enumerate() {
        let tr = e.side(side);
        let Some(l) = space.local_index(tr.element) else {
            continue;
        };
        let nodes = space.element_nodes(l);
        for q in 0..e.weights.len() {
            let w = f(ei, q) * e.weights[q];
            for (n, v) in nodes.iter().zip(&tr.vals[q]) {
                b[*n] += w * v;
            }
        }
    }
    b
}

/// `int_part f w` on a boundary part; `f` receives the physical point.
pub fn assemble_boundary_source<C>(space: &FieldSpace, bq: &BoundaryQuadrature, f: C) -> Vec<f64>
where
    C: Fn([f64; 2]) -> f64,
{
    let mut b = vec![0.0; space.n_dofs()];
    for e in &bq.edges {
        let Some(l) = space.local_index(e.trace.element) else {
            continue;
        };
        let nodes = space.element_nodes(l);
        for q in 0..e.weights.len() {
            let w = f(e.x[q]) * e.weights[q];
            for (n, v) in nodes.iter().zip(&e.trace.vals[q]) {
                b[*n] += w * v;
            }
        }
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::space::{Arity, Support};
    use crate::geometry::{Mesh, Subdomain};
    use std::sync::Arc;

    fn space(deg: usize, arity: Arity) -> FieldSpace {
        let m = Arc::new(Mesh::rectangle(3, 2, 3.0, 2.0, deg, Subdomain::Cathode).unwrap());
        FieldSpace::build(&m, Support::All, arity, &[]).unwrap()
    }

    #[test]
    fn mass_sums_to_area() {
        let s = space(3, Arity::Scalar);
        let m = assemble_mass(&s, |_| 1.0);
        let total: f64 = m.vals.iter().sum();
        assert!((total - 6.0).abs() < 1e-12);
        assert!(m.asymmetry() < 1e-14);
    }

    #[test]
    fn stiffness_annihilates_constants() {
        let s = space(2, Arity::Scalar);
        let k = assemble_stiffness(&s, |_| 2.5).unwrap();
        assert!(k.row_sums().iter().all(|v| v.abs() < 1e-12));
        let u = s.interpolate(|x, _| x[0]);
        let e: f64 = u.iter().zip(k.matvec(&u)).map(|(a, b)| a * b).sum();
        assert!((e - 2.5 * 6.0).abs() < 1e-11);
    }

    #[test]
    fn stiffness_rejects_negative() {
        let s = space(1, Arity::Scalar);
        assert!(matches!(
            assemble_stiffness(&s, |_| -1.0),
            Err(FemError::NonPositiveCoefficient { .. })
        ));
    }

    #[test]
    fn elasticity_rigid_modes_and_energy() {
        let s = space(2, Arity::Vector);
        let k = assemble_elasticity(&s, |_| (1.0, 2.0));
        assert!(k.asymmetry() < 1e-13);
        let rot = s.interpolate(|x, c| if c == 0 { -x[1] } else { x[0] });
        assert!(k.matvec(&rot).iter().all(|v| v.abs() < 1e-11));
        // uniform expansion u = x: eps = I, energy = (2G*2 + lambda*4) * area
        let u = s.interpolate(|x, c| x[c]);
        let e: f64 = u.iter().zip(k.matvec(&u)).map(|(a, b)| a * b).sum();
        let lam = 2.0 - 2.0 / 3.0;
        assert!((e - (4.0 + 4.0 * lam) * 6.0).abs() < 1e-10);
    }

    #[test]
    fn flux_source_matches_stiffness() {
        let s = space(2, Arity::Scalar);
        let u = s.interpolate(|x, _| x[0] * x[1]);
        let k = assemble_stiffness(&s, |_| 1.0).unwrap();
        let b = assemble_flux_source(&s, |c| c.field(&s, &u).1);
        for (a, b) in k.matvec(&u).iter().zip(&b) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
