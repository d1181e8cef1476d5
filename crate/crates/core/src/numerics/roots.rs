use crate::error::{Error, Result};

pub const DEFAULT_ROOT_TOL: f64 = 1e-12;

const MAX_ITERATIONS: usize = 500;

/// Root of a continuous function with a sign change on `[lo, hi]`.
///
/// Bisection safeguarded secant steps: a secant (Illinois-weighted) point is
/// used when it lies inside the bracket and the previous step at least
/// halved the bracket, otherwise the midpoint. Stops when `|f(x)| <= tol` or
/// the bracket width drops to `tol * (hi - lo)`.
pub fn solve_root_bracketed(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(lo < hi) {
        return Err(Error::InvalidInput(format!("empty bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::Domain("function is NaN at a bracket end".into()));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracketing { f_lo: fa, f_hi: fb });
    }
    let width_tol = tol * (hi - lo);
    let mut last_width = b - a;
    let mut side = 0i8;
    for iteration in 0..MAX_ITERATIONS {
        let width = b - a;
        let mid = 0.5 * (a + b);
        if width <= width_tol || mid <= a || mid >= b {
            return Ok(mid);
        }
        let secant = b - fb * (b - a) / (fb - fa);
        let use_secant = secant > a && secant < b && width <= 0.5 * last_width + f64::EPSILON * width;
        let x = if use_secant || iteration == 0 && secant > a && secant < b {
            secant
        } else {
            mid
        };
        last_width = width;
        let fx = f(x);
        if fx.is_nan() {
            return Err(Error::Domain(format!("function is NaN at {x}")));
        }
        if fx.abs() <= tol {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::Numerical {
        message: "bracketed root search did not converge".into(),
        iterations: MAX_ITERATIONS,
    })
}
