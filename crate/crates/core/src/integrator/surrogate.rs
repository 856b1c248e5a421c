//! Fixed-coefficient linear system `M d' + K d = b`, `s = C d`, with a
//! closed-form solution, for temporal convergence checks of the scheme.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use super::Staggered;
use crate::fem::SolveError;
use crate::physics::SimState;
use crate::Result;

#[derive(Debug, Clone)]
pub struct LinearSurrogate {
    pub mass: DMatrix<f64>,
    pub stiffness: DMatrix<f64>,
    pub load: DVector<f64>,
    /// Quasi-static map `s = C d`.
    pub coupling: DMatrix<f64>,
}

fn not_spd() -> crate::Error {
    crate::Error::Fem(SolveError::Breakdown { pivot: 0, value: 0.0 }.into())
}

impl LinearSurrogate {
    /// A four-unknown system with decay rates between roughly 0.01 and
    /// 0.1 per second.
    pub fn standard() -> Self {
        let mass = DMatrix::from_row_slice(
            4,
            4,
            &[
                4.0, 1.0, 0.0, 0.0, //
                1.0, 4.0, 1.0, 0.0, //
                0.0, 1.0, 4.0, 1.0, //
                0.0, 0.0, 1.0, 4.0,
            ],
        ) / 6.0;
        let stiffness = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.08, -0.03, 0.0, 0.0, //
                -0.03, 0.07, -0.02, 0.0, //
                0.0, -0.02, 0.05, -0.01, //
                0.0, 0.0, -0.01, 0.03,
            ],
        );
        let load = DVector::from_vec(vec![0.02, 0.0, -0.01, 0.005]);
        let coupling = DMatrix::from_row_slice(2, 4, &[1.0, -1.0, 0.5, 0.0, 0.0, 0.25, 1.0, 2.0]);
        LinearSurrogate {
            mass,
            stiffness,
            load,
            coupling,
        }
    }

    pub fn initial_state(&self) -> SimState {
        let d = vec![1.0, -0.5, 0.25, 2.0];
        let s = (&self.coupling * DVector::from_column_slice(&d)).as_slice().to_vec();
        SimState {
            t: 0.0,
            d: vec![d],
            s: vec![s],
        }
    }

    /// Exact solution at time `t` from `d0` at time zero.
    pub fn exact(&self, d0: &[f64], t: f64) -> Result<SimState> {
        let chol = Cholesky::new(self.mass.clone()).ok_or_else(not_spd)?;
        let l = chol.l();
        let l_inv = l.clone().try_inverse().ok_or_else(not_spd)?;
        let a = &l_inv * &self.stiffness * l_inv.transpose();
        let a = (&a + a.transpose()) * 0.5;
        let eig = SymmetricEigen::new(a);
        let d_inf = self
            .stiffness
            .clone()
            .lu()
            .solve(&self.load)
            .ok_or_else(not_spd)?;
        let y0 = l.transpose() * (DVector::from_column_slice(d0) - &d_inf);
        let z0 = eig.eigenvectors.transpose() * y0;
        let z = DVector::from_iterator(
            z0.len(),
            z0.iter()
                .zip(eig.eigenvalues.iter())
                .map(|(z, lam)| z * (-lam * t).exp()),
        );
        let d = l_inv.transpose() * (&eig.eigenvectors * z) + d_inf;
        let s = &self.coupling * &d;
        Ok(SimState {
            t,
            d: vec![d.as_slice().to_vec()],
            s: vec![s.as_slice().to_vec()],
        })
    }
}

impl Staggered for LinearSurrogate {
    fn rate(&mut self, state: &SimState) -> Result<Vec<Vec<f64>>> {
        let d = DVector::from_column_slice(&state.d[0]);
        let r = &self.load - &self.stiffness * d;
        let x = Cholesky::new(self.mass.clone())
            .ok_or_else(not_spd)?
            .solve(&r);
        Ok(vec![x.as_slice().to_vec()])
    }

    fn stage1(&mut self, prev: &SimState, _mid: &SimState, dt: f64) -> Result<Vec<Vec<f64>>> {
        let d = DVector::from_column_slice(&prev.d[0]);
        let lhs = &self.mass + &self.stiffness * (0.5 * dt);
        let rhs = (&self.load - &self.stiffness * &d) * dt;
        let delta = Cholesky::new(lhs).ok_or_else(not_spd)?.solve(&rhs);
        Ok(vec![(d + delta).as_slice().to_vec()])
    }

    fn stage2(&mut self, d: &[Vec<f64>], _partner: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let s = &self.coupling * DVector::from_column_slice(&d[0]);
        Ok(vec![s.as_slice().to_vec()])
    }

    fn update_floors(&self) -> (Vec<f64>, Vec<f64>) {
        (vec![1.0], vec![1.0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_solution_satisfies_ode() {
        let s = LinearSurrogate::standard();
        let d0 = s.initial_state().d[0].clone();
        let h = 1e-4;
        let a = s.exact(&d0, 10.0 - h).unwrap();
        let b = s.exact(&d0, 10.0 + h).unwrap();
        let c = s.exact(&d0, 10.0).unwrap();
        let dd = DVector::from_iterator(4, a.d[0].iter().zip(&b.d[0]).map(|(a, b)| (b - a) / (2.0 * h)));
        let res = &s.mass * dd + &s.stiffness * DVector::from_column_slice(&c.d[0]) - &s.load;
        assert!(res.amax() < 1e-8);
        let z = s.exact(&d0, 0.0).unwrap();
        for (x, y) in z.d[0].iter().zip(&d0) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
