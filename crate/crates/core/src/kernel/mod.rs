//! Fredholm-determinant evaluation of the largest-eigenvalue law of a
//! complex Wishart matrix `W_C(Sigma / n, n)`, singular (`n < p`) or not.
//!
//! With `pi_k = 1 / ell_k` the inverse population eigenvalues,
//! `Pr(lambda_1 <= s) = det(1 - K)` on `L^2(s, inf)` for the double-contour
//! kernel evaluated in [`kernel_value`]. The determinant is approximated by
//! a Gauss–Legendre Nyström matrix and always cross-checked against the
//! doubled truncation and order.
//!
//! The Airy kernel and `F_2` live in the `airy` submodule; exact
//! small-size laws used as oracles live in `oracle`.

mod airy;
mod config;
mod contour;
mod oracle;

pub use airy::{airy_ai, airy_fredholm_det, airy_kernel, tw2_cdf, tw2_cdf_default};
pub use config::{
    ContourSpec, KernelConfig, NystromConfig, DEFAULT_CONTOUR_NODES, DEFAULT_NYSTROM_ORDER, MAX_CONTOUR_NODES,
    MIN_RELATIVE_GAP,
};
pub use contour::{
    fredholm_det, kernel_value, kernel_value_residue, largest_eig_cdf, q_invariance_check, refine_contour_nodes,
    rescaled_cdf, rescaled_kernel, DET_IMAG_TOL, IMAG_REL_TOL,
};
pub use oracle::{cdf_n1_closed, density_cdf_small_n, density_small_n, DENSITY_MAX_N, DENSITY_MAX_P};

use crate::centering::{centering_params, CenteringParams, SpectrumModel};
use crate::error::{Error, Result};

/// Largest change tolerated between a determinant and its refinement.
pub const REFINEMENT_TOL: f64 = 1e-6;
const CLIP_TOL: f64 = 1e-8;

/// Clips a determinant into `[0, 1]` when it is within `1e-8` of the range.
pub(crate) fn clip_probability(v: f64, what: &str) -> Result<f64> {
    if (-CLIP_TOL..=1.0 + CLIP_TOL).contains(&v) {
        Ok(v.clamp(0.0, 1.0))
    } else {
        Err(Error::Accuracy {
            what: format!("{what} outside [0, 1]"),
            deviation: if v < 0.0 { -v } else { v - 1.0 },
            tolerance: CLIP_TOL,
        })
    }
}

/// Kernel configuration with `q = c`, saddle-adapted contours with enough
/// nodes for thresholds in `mu + sigma [x_lo, x_hi]`, and the centering
/// constants. Suited to any `n`, and required for large `n`.
pub fn edge_setup(
    spectrum: &SpectrumModel,
    n: usize,
    x_lo: f64,
    x_hi: f64,
) -> Result<(KernelConfig, ContourSpec, CenteringParams)> {
    let params = centering_params(spectrum, n)?;
    let cfg = KernelConfig::from_spectrum(spectrum, n)?.with_q(params.c)?;
    let contour = ContourSpec::saddle_adapted(&cfg, &params)?.with_nodes(64);
    let lo = (params.mu + params.sigma * x_lo).max(1e-3 * params.mu);
    let hi = params.mu + params.sigma * (x_hi + 2.0 * NystromConfig::rescaled_default(x_lo).truncation());
    let contour = refine_contour_nodes(&cfg, &contour, &[lo, 0.5 * (lo + hi), hi])?;
    Ok((cfg, contour, params))
}
