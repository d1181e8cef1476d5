//! The Airy function, the Airy kernel and the Tracy–Widom (beta = 2)
//! distribution function.
//!
//! `Ai` is evaluated in three regimes:
//!
//! * `x >= 10`: the exponentially decaying asymptotic expansion, summed
//!   until terms stop decreasing or fall below `1e-17` relative.
//! * `-40 <= x < 10`: Taylor expansion of `y'' = x y` around the nearest
//!   point of a grid with spacing `1/4`. The grid values themselves are
//!   produced once by the same Taylor stepping, leftwards from the
//!   asymptotic values at `x = 10` down to `0` (the direction in which `Ai`
//!   is dominant, so stepping errors are damped) and from the exact values
//!   `Ai(0)`, `Ai'(0)` down to `-40` (where both solutions are bounded).
//! * `x < -40`: the oscillatory asymptotic expansion.
//!
//! A Maclaurin series is avoided because it loses about `|x|^{3/2}` digits
//! to cancellation for positive `x`.

use std::sync::LazyLock;

use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, real_determinant};

use super::config::NystromConfig;
use super::REFINEMENT_TOL;

const AI0: f64 = 0.355_028_053_887_817_2;
const AIP0: f64 = -0.258_819_403_792_806_8;

const GRID_LO: f64 = -40.0;
const GRID_HI: f64 = 10.0;
const GRID_STEP: f64 = 0.25;
const TAYLOR_TERMS: usize = 60;

struct AiryGrid {
    ai: Vec<f64>,
    aip: Vec<f64>,
}

static GRID: LazyLock<AiryGrid> = LazyLock::new(build_grid);

fn grid_len() -> usize {
    ((GRID_HI - GRID_LO) / GRID_STEP).round() as usize + 1
}

fn grid_x(i: usize) -> f64 {
    GRID_LO + i as f64 * GRID_STEP
}

fn build_grid() -> AiryGrid {
    let len = grid_len();
    let zero = (-GRID_LO / GRID_STEP).round() as usize;
    let mut ai = vec![0.0; len];
    let mut aip = vec![0.0; len];
    let (a, ap) = airy_asymptotic_pos(GRID_HI);
    ai[len - 1] = a;
    aip[len - 1] = ap;
    for i in (zero..len - 1).rev() {
        let (y, yp) = taylor(grid_x(i + 1), ai[i + 1], aip[i + 1], -GRID_STEP);
        ai[i] = y;
        aip[i] = yp;
    }
    ai[zero] = AI0;
    aip[zero] = AIP0;
    for i in (0..zero).rev() {
        let (y, yp) = taylor(grid_x(i + 1), ai[i + 1], aip[i + 1], -GRID_STEP);
        ai[i] = y;
        aip[i] = yp;
    }
    AiryGrid { ai, aip }
}

/// Value and derivative at `x0 + h` of the solution of `y'' = x y` with
/// `y(x0) = y0`, `y'(x0) = yp0`.
fn taylor(x0: f64, y0: f64, yp0: f64, h: f64) -> (f64, f64) {
    // a_{k+2} = (x0 a_k + a_{k-1}) / ((k + 2)(k + 1)), a_{-1} = 0.
    let mut a = [0.0f64; TAYLOR_TERMS];
    a[0] = y0;
    a[1] = yp0;
    for k in 0..TAYLOR_TERMS - 2 {
        let prev = if k == 0 { 0.0 } else { a[k - 1] };
        a[k + 2] = (x0 * a[k] + prev) / ((k + 2) as f64 * (k + 1) as f64);
    }
    let mut y = 0.0;
    let mut yp = 0.0;
    for k in (0..TAYLOR_TERMS).rev() {
        y = y * h + a[k];
        if k > 0 {
            yp = yp * h + k as f64 * a[k];
        }
    }
    (y, yp)
}

/// Coefficients `u_k` of the Airy asymptotic expansions.
fn u_coeffs(count: usize) -> Vec<f64> {
    let mut u = vec![1.0; count];
    for k in 1..count {
        let kf = k as f64;
        u[k] = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
    }
    u
}

const ASYMPTOTIC_TERMS: usize = 40;

static U: LazyLock<Vec<f64>> = LazyLock::new(|| u_coeffs(ASYMPTOTIC_TERMS));

fn v_coeff(k: usize) -> f64 {
    let kf = k as f64;
    -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * U[k]
}

/// Sums `sum_k sign^k c_k / zeta^k` over the given index progression,
/// stopping when terms start to grow or become negligible.
fn asymptotic_sum(zeta: f64, coeff: impl Fn(usize) -> f64, start: usize, stride: usize, alternate: bool) -> f64 {
    let mut total = 0.0;
    let mut last = f64::INFINITY;
    let mut j = 0usize;
    let mut k = start;
    while k < ASYMPTOTIC_TERMS {
        let sign = if alternate && j % 2 == 1 { -1.0 } else { 1.0 };
        let term = sign * coeff(k) / zeta.powi(k as i32);
        if term.abs() > last {
            break;
        }
        total += term;
        if term.abs() <= 1e-17 * total.abs() {
            break;
        }
        last = term.abs();
        j += 1;
        k += stride;
    }
    total
}

fn airy_asymptotic_pos(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let pre = (-zeta).exp() / (2.0 * std::f64::consts::PI.sqrt());
    let s_u = asymptotic_sum(zeta, |k| if k % 2 == 0 { U[k] } else { -U[k] }, 0, 1, false);
    let s_v = asymptotic_sum(zeta, |k| if k % 2 == 0 { v_coeff(k) } else { -v_coeff(k) }, 0, 1, false);
    let q = x.sqrt().sqrt();
    (pre / q * s_u, -pre * q * s_v)
}

fn airy_asymptotic_neg(x: f64) -> (f64, f64) {
    let z = -x;
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    let q = z.sqrt().sqrt();
    let rpi = std::f64::consts::PI.sqrt();
    let phase = zeta - std::f64::consts::FRAC_PI_4;
    let (s, c) = phase.sin_cos();
    let u_even = asymptotic_sum(zeta, |k| U[k], 0, 2, true);
    let u_odd = asymptotic_sum(zeta, |k| U[k], 1, 2, true);
    let v_even = asymptotic_sum(zeta, v_coeff, 0, 2, true);
    let v_odd = asymptotic_sum(zeta, v_coeff, 1, 2, true);
    let ai = (c * u_even + s * u_odd) / (rpi * q);
    let aip = q / rpi * (s * v_even - c * v_odd);
    (ai, aip)
}

/// `(Ai(x), Ai'(x))`.
pub fn airy_ai(x: f64) -> (f64, f64) {
    if x.is_nan() {
        return (f64::NAN, f64::NAN);
    }
    if x >= GRID_HI {
        if x > 104.0 {
            return (0.0, 0.0);
        }
        return airy_asymptotic_pos(x);
    }
    if x < GRID_LO {
        return airy_asymptotic_neg(x);
    }
    let grid = &*GRID;
    let i = (((x - GRID_LO) / GRID_STEP).round() as usize).min(grid_len() - 1);
    let x0 = grid_x(i);
    taylor(x0, grid.ai[i], grid.aip[i], x - x0)
}

/// Airy kernel `(Ai(x)Ai'(y) - Ai'(x)Ai(y)) / (x - y)`, with the diagonal
/// limit `Ai'(x)^2 - x Ai(x)^2`.
pub fn airy_kernel(x: f64, y: f64) -> f64 {
    let (ax, apx) = airy_ai(x);
    if x == y {
        return apx * apx - x * ax * ax;
    }
    let (ay, apy) = airy_ai(y);
    airy_kernel_from(x, ax, apx, y, ay, apy)
}

fn airy_kernel_from(x: f64, ax: f64, apx: f64, y: f64, ay: f64, apy: f64) -> f64 {
    if x == y {
        apx * apx - x * ax * ax
    } else {
        (ax * apy - apx * ay) / (x - y)
    }
}

/// `det(1 - A)` for the Airy operator on `(x, x + L)` with one Gauss–Legendre
/// rule of the given order; no refinement check.
pub fn airy_fredholm_det(x: f64, nys: &NystromConfig) -> Result<f64> {
    let rule = gauss_legendre(nys.order(), x, x + nys.truncation())?;
    let m = rule.nodes.len();
    let vals: Vec<(f64, f64)> = rule.nodes.iter().map(|&t| airy_ai(t)).collect();
    let sw: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
    let mut a = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            let k = airy_kernel_from(rule.nodes[i], vals[i].0, vals[i].1, rule.nodes[j], vals[j].0, vals[j].1);
            a[i * m + j] = f64::from(u8::from(i == j)) - sw[i] * k * sw[j];
        }
    }
    real_determinant(a, m)
}

/// Tracy–Widom (beta = 2) distribution function `F_2(x)`, evaluated at the
/// given and the doubled Nyström configuration; the refined value is
/// returned when the two agree to within the refinement tolerance.
pub fn tw2_cdf(x: f64, nys: &NystromConfig) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidInput(format!("x must be finite, got {x}")));
    }
    let coarse = airy_fredholm_det(x, nys)?;
    let fine = airy_fredholm_det(x, &nys.doubled())?;
    let deviation = (coarse - fine).abs();
    if deviation > REFINEMENT_TOL {
        return Err(Error::Accuracy {
            what: format!("Airy determinant at x = {x}"),
            deviation,
            tolerance: REFINEMENT_TOL,
        });
    }
    super::clip_probability(fine, &format!("Airy determinant at x = {x}"))
}

/// [`tw2_cdf`] with the default truncation and order for `x`.
pub fn tw2_cdf_default(x: f64) -> Result<f64> {
    tw2_cdf(x, &NystromConfig::rescaled_default(x))
}
