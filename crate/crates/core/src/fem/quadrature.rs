//! Gauss-Legendre rules and Gauss-Lobatto nodes on [-1, 1].

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = if (1.0 - x * x).abs() < 1e-300 {
        let s = if x > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        s * (n * (n + 1)) as f64 / 2.0
    } else {
        n as f64 * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, dp)
}

/// `n`-point Gauss-Legendre rule, exact for degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        x[n - 1 - i] = z;
        w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// The `p + 1` Gauss-Lobatto points: endpoints plus roots of `P_p'`.
pub fn gauss_lobatto_nodes(p: usize) -> Vec<f64> {
    assert!(p >= 1);
    let mut x = vec![0.0; p + 1];
    x[0] = -1.0;
    x[p] = 1.0;
    for i in 1..p {
        let mut z = -(std::f64::consts::PI * i as f64 / p as f64).cos();
        for _ in 0..100 {
            let (pp, dp) = legendre(p, z);
            // (1 - z^2) P'' = 2 z P' - p (p + 1) P
            let d2 = (2.0 * z * dp - (p * (p + 1)) as f64 * pp) / (1.0 - z * z);
            let dz = dp / d2;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
    }
    // enforce exact symmetry
    for i in 0..=p / 2 {
        let s = 0.5 * (x[p - i] - x[i]);
        x[i] = -s;
        x[p - i] = s;
    }
    x
}

/// Tensor rule on the reference square `[-1, 1]^2`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// `n` x `n` Gauss-Legendre points, xi varying fastest.
    pub fn square(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                points.push([x[i], x[j]]);
                weights.push(w[i] * w[j]);
            }
        }
        QuadratureRule { points, weights }
    }

    /// Number of points per direction for an element of the given degrees.
    pub fn order_for(degree: [usize; 2]) -> usize {
        degree[0].max(degree[1]) + 2
    }
}
