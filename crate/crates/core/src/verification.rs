//! Convergence studies: temporal order of the staggered scheme on a linear
//! surrogate with a closed-form solution, and spatial order of the hp
//! discretisation on a manufactured Poisson problem.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::fem::{
    assemble_source, assemble_stiffness, Arity, Constraint, FieldSpace, SolverOptions, SpdSolver,
    Support,
};
use crate::geometry::{BoundaryPart, Mesh, Subdomain};
use crate::integrator::{step, History, LinearSurrogate, StepConfig, TimeGrid};
use crate::{Error, Result};

/// Error of one refinement level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyPoint {
    /// Time step or mesh size.
    pub h: f64,
    pub error: f64,
    /// Observed order against the previous (coarser) level.
    pub order: Option<f64>,
}

/// Errors of a refinement sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Study {
    pub label: String,
    pub points: Vec<StudyPoint>,
}

impl Study {
    fn from_errors(label: impl Into<String>, data: &[(f64, f64)]) -> Study {
        let points = data
            .iter()
            .enumerate()
            .map(|(k, &(h, error))| StudyPoint {
                h,
                error,
                order: (k > 0).then(|| {
                    let (h0, e0) = data[k - 1];
                    (e0 / error).ln() / (h0 / h).ln()
                }),
            })
            .collect();
        Study {
            label: label.into(),
            points,
        }
    }

    /// Order observed between the two finest levels.
    pub fn final_order(&self) -> Option<f64> {
        self.points.last().and_then(|p| p.order)
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("h,error,order\n");
        for p in &self.points {
            let order = p.order.map_or(String::new(), |o| o.to_string());
            let _ = writeln!(s, "{},{},{order}", p.h, p.error);
        }
        s
    }

    pub fn table(&self) -> String {
        let mut s = format!("{}\n{:>12} {:>14} {:>8}\n", self.label, "h", "error", "order");
        for p in &self.points {
            let order = p.order.map_or("-".to_string(), |o| format!("{o:.3}"));
            let _ = writeln!(s, "{:>12.4e} {:>14.6e} {:>8}", p.h, p.error, order);
        }
        s
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Final-time error of the scheme on the linear surrogate for each time step,
/// measured in the maximum norm over dynamic and quasi-static unknowns.
pub fn temporal_study(steps: &[f64], t_end: f64, cfg: &StepConfig) -> Result<Study> {
    let mut data = Vec::new();
    for &dt in steps {
        let mut sys = LinearSurrogate::standard();
        let s0 = sys.initial_state();
        let exact = sys.exact(&s0.d[0], t_end)?;
        let grid = TimeGrid::new(dt, t_end).map_err(Error::Postprocess)?;
        let mut history = History::start(s0);
        for _ in 0..grid.steps {
            let out = step(&mut sys, &history, dt, cfg)?;
            history.push(out.state);
        }
        let s = &history.latest;
        let err = max_abs_diff(&s.d[0], &exact.d[0]).max(max_abs_diff(&s.s[0], &exact.s[0]));
        data.push((dt, err));
    }
    Ok(Study::from_errors("temporal, linear surrogate", &data))
}

/// H1-seminorm error of the Galerkin solution of `-lap u = f` on the unit
/// square with `u = sin(pi x) sin(pi y)` and homogeneous Dirichlet data.
pub fn poisson_h1_error(cells: usize, degree: usize) -> Result<f64> {
    let mesh = Arc::new(Mesh::rectangle(
        cells,
        cells,
        1.0,
        1.0,
        degree,
        Subdomain::Electrolyte,
    )?);
    let walls: Vec<Constraint> = BoundaryPart::ALL
        .iter()
        .map(|&part| Constraint {
            part,
            component: None,
        })
        .collect();
    let space = FieldSpace::build(&mesh, Support::All, Arity::Scalar, &walls)?;
    let k = assemble_stiffness(&space, |_| 1.0)?;
    let f = assemble_source(&space, |c| {
        let x = c.x();
        2.0 * PI * PI * (PI * x[0]).sin() * (PI * x[1]).sin()
    });
    let (a, b) = space.constrain(&k, &f);
    let solver = SpdSolver::new(a, SolverOptions::default()).map_err(crate::fem::FemError::from)?;
    let u = space.expand(&solver.solve(&b).map_err(crate::fem::FemError::from)?);
    let mut err2 = 0.0;
    for l in 0..space.elements().len() {
        for (q, g) in space.qp_geometry(l).iter().enumerate() {
            let (_, grad) = space.eval_qp(&u, l, q, g);
            let x = g.x;
            let ex = [
                PI * (PI * x[0]).cos() * (PI * x[1]).sin(),
                PI * (PI * x[0]).sin() * (PI * x[1]).cos(),
            ];
            err2 += g.wdet * ((grad[0] - ex[0]).powi(2) + (grad[1] - ex[1]).powi(2));
        }
    }
    Ok(err2.sqrt())
}

/// Manufactured-solution study for each degree on a sequence of uniform
/// meshes with `cells` elements per side.
pub fn spatial_study(degrees: &[usize], cells: &[usize]) -> Result<Vec<Study>> {
    degrees
        .iter()
        .map(|&p| {
            let data = cells
                .iter()
                .map(|&n| Ok((1.0 / n as f64, poisson_h1_error(n, p)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Study::from_errors(format!("spatial, H1 seminorm, p = {p}"), &data))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_from_halving() {
        let s = Study::from_errors("x", &[(1.0, 4.0), (0.5, 1.0), (0.25, 0.25)]);
        assert_eq!(s.points[0].order, None);
        assert!((s.final_order().unwrap() - 2.0).abs() < 1e-12);
    }
}
