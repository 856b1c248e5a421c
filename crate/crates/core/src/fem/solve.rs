//! SPD linear solves: envelope Cholesky on a reverse Cuthill-McKee ordering,
//! with iterative refinement and a Jacobi-preconditioned CG fallback.

use std::collections::VecDeque;

use thiserror::Error;

use super::sparse::SparseSym;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("factorization breakdown at pivot {pivot} (value {value:e})")]
    Breakdown { pivot: usize, value: f64 },
    #[error("no convergence: relative residual {residual:e} after {iterations} iterations")]
    NotConverged { residual: f64, iterations: usize },
    #[error("dimension mismatch: matrix {matrix}, right-hand side {rhs}")]
    Dimension { matrix: usize, rhs: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverMethod {
    Direct,
    ConjugateGradient,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub method: SolverMethod,
    pub rtol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            method: SolverMethod::Direct,
            rtol: 1e-10,
            max_iter: 20_000,
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn residual(a: &SparseSym, x: &[f64], b: &[f64]) -> Vec<f64> {
    let ax = a.matvec(x);
    b.iter().zip(ax).map(|(b, ax)| b - ax).collect()
}

/// Reverse Cuthill-McKee permutation: `perm[new] = old`.
pub fn rcm_ordering(a: &SparseSym) -> Vec<usize> {
    let n = a.n();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).count()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let bfs = |start: usize, visited: &mut Vec<bool>, out: &mut Vec<usize>| -> usize {
        // returns the last node reached (a far node)
        let mut q = VecDeque::new();
        q.push_back(start);
        visited[start] = true;
        let mut last = start;
        while let Some(u) = q.pop_front() {
            out.push(u);
            last = u;
            let mut nb: Vec<usize> = a.row(u).map(|(j, _)| j).filter(|&j| !visited[j]).collect();
            nb.sort_by_key(|&j| (degree[j], j));
            for j in nb {
                visited[j] = true;
                q.push_back(j);
            }
        }
        last
    };
    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        // pseudo-peripheral start: restart the search from its far end
        let mut scratch = visited.clone();
        let mut tmp = Vec::new();
        let far = bfs(seed, &mut scratch, &mut tmp);
        bfs(far, &mut visited, &mut order);
    }
    order.reverse();
    order
}

/// Cholesky factor stored as a variable-band (envelope) lower triangle.
#[derive(Debug, Clone)]
pub struct Cholesky {
    perm: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    vals: Vec<f64>,
}

impl Cholesky {
    pub fn factor(a: &SparseSym) -> Result<Self, SolveError> {
        let n = a.n();
        let perm = rcm_ordering(a);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for old in 0..n {
            let i = inv[old];
            for (jo, _) in a.row(old) {
                let j = inv[jo];
                if j < first[i] {
                    first[i] = j;
                }
            }
        }
        let mut start = Vec::with_capacity(n + 1);
        start.push(0);
        for i in 0..n {
            start.push(start[i] + (i - first[i] + 1));
        }
        let mut vals = vec![0.0; start[n]];
        for old in 0..n {
            let i = inv[old];
            for (jo, v) in a.row(old) {
                let j = inv[jo];
                if j <= i {
                    vals[start[i] + j - first[i]] += v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let (ri, rj) = (start[i] + k0 - fi, start[j] + k0 - fj);
                let len = j - k0;
                let mut s = 0.0;
                for t in 0..len {
                    s += vals[ri + t] * vals[rj + t];
                }
                let ljj = vals[start[j] + j - fj];
                let idx = start[i] + j - fi;
                vals[idx] = (vals[idx] - s) / ljj;
            }
            let row = &vals[start[i]..start[i] + i - fi];
            let s: f64 = row.iter().map(|v| v * v).sum();
            let idx = start[i] + i - fi;
            let d = vals[idx] - s;
            if !(d > 0.0) || !d.is_finite() {
                return Err(SolveError::Breakdown { pivot: perm[i], value: d });
            }
            vals[idx] = d.sqrt();
        }
        Ok(Cholesky {
            perm,
            first,
            start,
            vals,
        })
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut y: Vec<f64> = self.perm.iter().map(|&o| b[o]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.vals[self.start[i]..self.start[i] + i - fi];
            let s: f64 = row.iter().zip(&y[fi..i]).map(|(l, y)| l * y).sum();
            y[i] = (y[i] - s) / self.vals[self.start[i] + i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let xi = y[i] / self.vals[self.start[i] + i - fi];
            y[i] = xi;
            let row = &self.vals[self.start[i]..self.start[i] + i - fi];
            for (k, l) in row.iter().enumerate() {
                y[fi + k] -= l * xi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

/// Jacobi-preconditioned conjugate gradients starting from `x`.
pub fn conjugate_gradient(
    a: &SparseSym,
    b: &[f64],
    x: &mut [f64],
    rtol: f64,
    max_iter: usize,
) -> Result<usize, SolveError> {
    let bn = norm(b);
    if bn == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(0);
    }
    let dinv: Vec<f64> = a
        .diag()
        .iter()
        .map(|d| if *d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut r = residual(a, x, b);
    let mut z: Vec<f64> = r.iter().zip(&dinv).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; b.len()];
    for it in 0..max_iter {
        let rn = norm(&r);
        if rn <= rtol * bn {
            return Ok(it);
        }
        a.matvec_into(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if !(pap > 0.0) {
            return Err(SolveError::Breakdown { pivot: it, value: pap });
        }
        let alpha = rz / pap;
        for i in 0..x.len() {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..x.len() {
            z[i] = r[i] * dinv[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..x.len() {
            p[i] = z[i] + beta * p[i];
        }
    }
    let rn = norm(&residual(a, x, b));
    if rn <= rtol * bn {
        Ok(max_iter)
    } else {
        Err(SolveError::NotConverged {
            residual: rn / bn,
            iterations: max_iter,
        })
    }
}

/// A matrix prepared for repeated solves.
#[derive(Debug, Clone)]
pub struct SpdSolver {
    matrix: SparseSym,
    factor: Option<Cholesky>,
    opts: SolverOptions,
}

impl SpdSolver {
    pub fn new(matrix: SparseSym, opts: SolverOptions) -> Result<Self, SolveError> {
        let factor = match opts.method {
            SolverMethod::Direct => match Cholesky::factor(&matrix) {
                Ok(f) => Some(f),
                Err(e) => {
                    log::warn!("direct factorization failed ({e}); using CG");
                    None
                }
            },
            SolverMethod::ConjugateGradient => None,
        };
        Ok(SpdSolver {
            matrix,
            factor,
            opts,
        })
    }

    pub fn matrix(&self) -> &SparseSym {
        &self.matrix
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, SolveError> {
        let n = self.matrix.n();
        if b.len() != n {
            return Err(SolveError::Dimension { matrix: n, rhs: b.len() });
        }
        let bn = norm(b);
        if bn == 0.0 {
            return Ok(vec![0.0; n]);
        }
        let mut x = vec![0.0; n];
        if let Some(f) = &self.factor {
            x = f.solve(b);
            for _ in 0..3 {
                let r = residual(&self.matrix, &x, b);
                if norm(&r) <= self.opts.rtol * bn {
                    return Ok(x);
                }
                let dx = f.solve(&r);
                x.iter_mut().zip(dx).for_each(|(x, d)| *x += d);
            }
            if norm(&residual(&self.matrix, &x, b)) <= self.opts.rtol * bn {
                return Ok(x);
            }
        }
        conjugate_gradient(&self.matrix, b, &mut x, self.opts.rtol, self.opts.max_iter)?;
        Ok(x)
    }
}

/// One-shot SPD solve.
pub fn solve_spd(a: &SparseSym, b: &[f64], opts: &SolverOptions) -> Result<Vec<f64>, SolveError> {
    SpdSolver::new(a.clone(), *opts)?.solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace_1d(n: usize) -> SparseSym {
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = 2.0;
            if i + 1 < n {
                a[i][i + 1] = -1.0;
                a[i + 1][i] = -1.0;
            }
        }
        SparseSym::from_dense(&a)
    }

    #[test]
    fn identity_solve() {
        let a = SparseSym::identity(4);
        let b = vec![1.0, -2.0, 3.0, 0.5];
        assert_eq!(solve_spd(&a, &b, &SolverOptions::default()).unwrap(), b);
    }

    #[test]
    fn two_by_two() {
        let a = SparseSym::from_dense(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let x = solve_spd(&a, &[3.0, 3.0], &SolverOptions::default()).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cg_matches_direct() {
        let a = laplace_1d(50);
        let b: Vec<f64> = (0..50).map(|i| (i as f64).sin()).collect();
        let xd = solve_spd(&a, &b, &SolverOptions::default()).unwrap();
        let opts = SolverOptions {
            method: SolverMethod::ConjugateGradient,
            ..Default::default()
        };
        let xc = solve_spd(&a, &b, &opts).unwrap();
        for (p, q) in xd.iter().zip(&xc) {
            assert!((p - q).abs() < 1e-7 * xd.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        }
    }

    #[test]
    fn indefinite_reports_breakdown() {
        let a = SparseSym::from_dense(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(matches!(Cholesky::factor(&a), Err(SolveError::Breakdown { .. })));
        let r = solve_spd(&a, &[1.0, 0.0], &SolverOptions::default());
        assert!(r.is_err());
    }

    #[test]
    fn disconnected_blocks() {
        let a = SparseSym::from_dense(&[
            vec![2.0, 0.0, 0.0],
            vec![0.0, 3.0, 1.0],
            vec![0.0, 1.0, 3.0],
        ]);
        let x = solve_spd(&a, &[2.0, 4.0, 4.0], &SolverOptions::default()).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }
}
