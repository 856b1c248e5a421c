//! Coefficient vectors of all six fields at one time level.

/// Slots of the dynamic fields in [`SimState::d`].
pub const THETA: usize = 0;
pub const SOLID_CONCENTRATION: usize = 1;
pub const ELECTROLYTE_CONCENTRATION: usize = 2;
/// Slots of the quasi-static fields in [`SimState::s`].
pub const SOLID_POTENTIAL: usize = 0;
pub const ELECTROLYTE_POTENTIAL: usize = 1;
pub const DISPLACEMENT: usize = 2;

/// `d` holds the dynamic fields (temperature, solid and electrolyte
/// concentration); `s` the quasi-static ones (solid and electrolyte
/// potential, displacement). Vectors are full-DOF coefficient vectors in
/// internal units.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub d: Vec<Vec<f64>>,
    pub s: Vec<Vec<f64>>,
}

impl SimState {
    /// `a * x + b * y` field by field; time is combined the same way.
    pub fn combine(a: f64, x: &SimState, b: f64, y: &SimState) -> SimState {
        let mix = |u: &[Vec<f64>], v: &[Vec<f64>]| -> Vec<Vec<f64>> {
            u.iter()
                .zip(v)
                .map(|(p, q)| p.iter().zip(q).map(|(p, q)| a * p + b * q).collect())
                .collect()
        };
        SimState {
            t: a * x.t + b * y.t,
            d: mix(&x.d, &y.d),
            s: mix(&x.s, &y.s),
        }
    }

    pub fn midpoint(x: &SimState, y: &SimState) -> SimState {
        SimState::combine(0.5, x, 0.5, y)
    }

    pub fn shape(&self) -> (Vec<usize>, Vec<usize>) {
        (
            self.d.iter().map(Vec::len).collect(),
            self.s.iter().map(Vec::len).collect(),
        )
    }
}

/// Largest relative change per field between two states; `floors` bound the
/// denominators from below.
pub fn relative_change(new: &SimState, old: &SimState, d_floor: &[f64], s_floor: &[f64]) -> f64 {
    fn field(a: &[f64], b: &[f64], floor: f64) -> f64 {
        let scale = b.iter().fold(floor, |m, v| m.max(v.abs()));
        let diff = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        diff / scale
    }
    let d = new
        .d
        .iter()
        .zip(&old.d)
        .zip(d_floor)
        .map(|((a, b), f)| field(a, b, *f));
    let s = new
        .s
        .iter()
        .zip(&old.s)
        .zip(s_floor)
        .map(|((a, b), f)| field(a, b, *f));
    d.chain(s).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(t: f64, v: f64) -> SimState {
        SimState {
            t,
            d: vec![vec![v, 2.0 * v]],
            s: vec![vec![-v]],
        }
    }

    #[test]
    fn extrapolation_of_linear_history() {
        let a = st(1.0, 3.0);
        let b = st(0.0, 1.0);
        let p = SimState::combine(2.0, &a, -1.0, &b);
        assert_eq!(p, st(2.0, 5.0));
    }

    #[test]
    fn relative_change_uses_floor() {
        let a = st(0.0, 1e-3);
        let b = st(0.0, 0.0);
        let r = relative_change(&a, &b, &[1.0], &[1.0]);
        assert!((r - 2e-3).abs() < 1e-15);
    }
}
