use crate::error::{Error, Result};

/// Nodes and positive weights of an interpolatory rule on `(a, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub interval: (f64, f64),
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// `m`-point Gauss–Legendre rule mapped to `(a, b)`.
///
/// Nodes are Newton-refined roots of `P_m` started from Tricomi's
/// asymptotic guesses; weights are `2 / ((1 - t^2) P_m'(t)^2)`.
pub fn gauss_legendre(m: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if m == 0 {
        return Err(Error::InvalidInput("Gauss-Legendre needs at least one node".into()));
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInput(format!(
            "Gauss-Legendre interval must satisfy a < b, got ({a}, {b})"
        )));
    }
    let mut t = vec![0.0; m];
    let mut w = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        // i-th largest root.
        let theta = std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5);
        let mut x = (1.0 - (mf - 1.0) / (8.0 * mf * mf * mf)) * theta.cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1e-3) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        if d != 0.0 {
            dp = d;
        }
        let weight = 2.0 / ((1.0 - x * x) * dp * dp);
        t[m - 1 - i] = x;
        w[m - 1 - i] = weight;
        t[i] = -x;
        w[i] = weight;
    }
    if m % 2 == 1 {
        t[m / 2] = 0.0;
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    Ok(QuadratureRule {
        nodes: t.iter().map(|&x| mid + half * x).collect(),
        weights: w.iter().map(|&x| half * x).collect(),
        interval: (a, b),
    })
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
