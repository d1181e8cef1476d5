//! Exact small-size laws used to check the determinant.

use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, real_determinant};

use super::config::{KernelConfig, MIN_RELATIVE_GAP};

pub const DENSITY_MAX_N: usize = 3;
pub const DENSITY_MAX_P: usize = 6;

fn check_distinct(pi: &[f64]) -> Result<()> {
    let mut sorted = pi.to_vec();
    sorted.sort_by(f64::total_cmp);
    for w in sorted.windows(2) {
        if (w[1] - w[0]) / w[1] < MIN_RELATIVE_GAP {
            return Err(Error::Degeneracy(format!("rates {} and {} coincide", w[0], w[1])));
        }
    }
    Ok(())
}

/// `Pr(lambda_1 <= s)` for `n = 1`: the hypoexponential law
/// `1 - sum_j e^{-pi_j s} prod_{k != j} pi_k / (pi_k - pi_j)`.
pub fn cdf_n1_closed(s: f64, pi: &[f64]) -> Result<f64> {
    if pi.is_empty() || pi.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
        return Err(Error::InvalidInput("rates must be positive and finite".into()));
    }
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("s must be non-negative, got {s}")));
    }
    check_distinct(pi)?;
    let tail: f64 = (0..pi.len())
        .map(|j| {
            let coeff: f64 = (0..pi.len())
                .filter(|&k| k != j)
                .map(|k| pi[k] / (pi[k] - pi[j]))
                .product();
            coeff * (-pi[j] * s).exp()
        })
        .sum();
    Ok((1.0 - tail).clamp(0.0, 1.0))
}

/// `prod_{i < j} (x_j - x_i)`.
fn vandermonde(x: &[f64]) -> f64 {
    let mut v = 1.0;
    for j in 0..x.len() {
        for i in 0..j {
            v *= x[j] - x[i];
        }
    }
    v
}

/// Increasing `k`-subsets of `0..p`.
fn subsets(p: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, p: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..p {
            cur.push(i);
            rec(i + 1, p, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, p, k, &mut Vec::new(), &mut out);
    out
}

fn check_small(cfg: &KernelConfig) -> Result<()> {
    let (n, p) = (cfg.n(), cfg.p());
    if n > DENSITY_MAX_N || p > DENSITY_MAX_P || n > p {
        return Err(Error::UnsupportedSize(format!(
            "exact density needs n <= {DENSITY_MAX_N}, p <= {DENSITY_MAX_P} and n <= p; got n = {n}, p = {p}"
        )));
    }
    check_distinct(cfg.pi())
}

/// Signed joint density of the `n` nonzero eigenvalues, up to a constant:
/// `V(lambda) sum_alpha (-1)^{|alpha|} V(pi_{alpha^c}) det(e^{-n pi_{alpha(j)} lambda_k})`,
/// `alpha` over increasing `n`-subsets with 1-based index sum `|alpha|`.
fn signed_density(lambdas: &[f64], pi: &[f64], n: usize) -> Result<f64> {
    let p = pi.len();
    let nf = n as f64;
    let mut total = 0.0;
    for alpha in subsets(p, n) {
        let index_sum: usize = alpha.iter().map(|a| a + 1).sum();
        let sign = if index_sum.is_multiple_of(2) { 1.0 } else { -1.0 };
        let complement: Vec<f64> = (0..p).filter(|k| !alpha.contains(k)).map(|k| pi[k]).collect();
        let mut m = Vec::with_capacity(n * n);
        for &a in &alpha {
            for &l in lambdas {
                m.push((-nf * pi[a] * l).exp());
            }
        }
        total += sign * vandermonde(&complement) * real_determinant(m, n)?;
    }
    Ok(vandermonde(lambdas) * total)
}

/// Unnormalized joint density of the nonzero eigenvalues for small `n <= p`.
pub fn density_small_n(lambdas: &[f64], cfg: &KernelConfig) -> Result<f64> {
    check_small(cfg)?;
    if lambdas.len() != cfg.n() {
        return Err(Error::InvalidInput(format!(
            "expected {} eigenvalues, got {}",
            cfg.n(),
            lambdas.len()
        )));
    }
    if lambdas.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(Error::Domain("eigenvalues must be positive".into()));
    }
    Ok(signed_density(lambdas, cfg.pi(), cfg.n())?.abs())
}

const PANEL_LENGTH: f64 = 4.0;
const PANEL_ORDER: usize = 24;

/// Composite Gauss–Legendre nodes and weights on `(0, s)`.
fn composite_rule(s: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let panels = (s / PANEL_LENGTH).ceil().max(1.0) as usize;
    let h = s / panels as f64;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for k in 0..panels {
        let rule = gauss_legendre(PANEL_ORDER, k as f64 * h, (k + 1) as f64 * h)?;
        nodes.extend(rule.nodes);
        weights.extend(rule.weights);
    }
    Ok((nodes, weights))
}

/// Integral of the signed density over the cube `(0, s)^n`.
fn cube_mass(s: f64, pi: &[f64], n: usize) -> Result<f64> {
    let (nodes, weights) = composite_rule(s)?;
    let m = nodes.len();
    let mut idx = vec![0usize; n];
    let mut total = 0.0;
    let mut lam = vec![0.0; n];
    loop {
        let mut w = 1.0;
        for (d, &i) in idx.iter().enumerate() {
            lam[d] = nodes[i];
            w *= weights[i];
        }
        total += w * signed_density(&lam, pi, n)?;
        let mut d = 0;
        loop {
            if d == n {
                return Ok(total);
            }
            idx[d] += 1;
            if idx[d] < m {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// `Pr(lambda_1 <= s)` by integrating the exact density over `(0, s)^n`
/// and normalizing over `(0, upper)^n`; the density is symmetric, so the
/// cube equals `n!` copies of the ordered region.
pub fn density_cdf_small_n(s: f64, cfg: &KernelConfig, upper: f64) -> Result<f64> {
    check_small(cfg)?;
    if !(s > 0.0 && s <= upper) {
        return Err(Error::Domain(format!(
            "need 0 < s <= upper, got s = {s}, upper = {upper}"
        )));
    }
    let total = cube_mass(upper, cfg.pi(), cfg.n())?;
    let part = cube_mass(s, cfg.pi(), cfg.n())?;
    Ok(part / total)
}
