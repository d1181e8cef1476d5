//! Edge centering and scaling constants for the largest eigenvalues of
//! `W_C(Sigma/n, n)`.
//!
//! With `H` the empirical spectral distribution of `Sigma`, `c` is the unique
//! root in `[0, 1/l_1)` of
//!
//! ```text
//! (1/p) sum_j (l_j c / (1 - l_j c))^2 = n / p
//! ```
//!
//! and
//!
//! ```text
//! mu    = (1/c) (1 + (p/n) (1/p) sum_j  l_j c / (1 - l_j c))
//! sigma = (1/(n^{2/3} c)) (1 + (p/n) (1/p) sum_j (l_j c / (1 - l_j c))^3)^{1/3}
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::solve_root_bracketed;

/// Relative jitter used by [`SpectrumModel::separated`].
pub const SEPARATION_JITTER: f64 = 1e-7;

/// Eigenvalues `l_1 >= ... >= l_p > 0` of the population covariance and their
/// inverses `pi_j = 1 / l_j` (ascending).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumModel {
    ell: Vec<f64>,
    pi: Vec<f64>,
}

impl SpectrumModel {
    /// Builds a model from covariance eigenvalues given in any order.
    pub fn new(mut ell: Vec<f64>) -> Result<Self> {
        if ell.is_empty() {
            return Err(Error::InvalidInput("spectrum must have at least one eigenvalue".into()));
        }
        if let Some(bad) = ell.iter().find(|&&l| !(l.is_finite() && l > 0.0)) {
            return Err(Error::InvalidInput(format!(
                "spectrum entries must be finite and positive, got {bad}"
            )));
        }
        ell.sort_by(|a, b| b.total_cmp(a));
        let pi = ell.iter().map(|l| 1.0 / l).collect();
        Ok(Self { ell, pi })
    }

    /// `Sigma = I_p`.
    pub fn identity(p: usize) -> Result<Self> {
        Self::new(vec![1.0; p])
    }

    pub fn p(&self) -> usize {
        self.ell.len()
    }

    /// Covariance eigenvalues, descending.
    pub fn ell(&self) -> &[f64] {
        &self.ell
    }

    /// Inverse eigenvalues, ascending.
    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn pi_first(&self) -> f64 {
        self.pi[0]
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.ell.iter().map(|l| l * factor).collect())
    }

    /// Spreads coincident eigenvalues apart: `l_j -> l_j (1 + jitter * j)`.
    pub fn separated(&self) -> Self {
        let ell: Vec<f64> = self
            .ell
            .iter()
            .enumerate()
            .map(|(j, l)| l * (1.0 + SEPARATION_JITTER * j as f64))
            .collect();
        Self::new(ell).expect("jitter keeps entries positive")
    }

    /// `int g dH = (1/p) sum_j g(l_j)`.
    pub fn average(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.ell.iter().map(|&l| g(l)).sum::<f64>() / self.p() as f64
    }
}

/// `(c, mu, sigma)` with the margin `c / pi_1` and the ratio `n / p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenteringParams {
    pub c: f64,
    pub mu: f64,
    pub sigma: f64,
    pub margin: f64,
    pub ratio: f64,
}

/// Per-instance surrogates for the asymptotic hypotheses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub ratio: f64,
    pub largest_ell: f64,
    pub smallest_ell: f64,
    pub margin: f64,
    pub warnings: Vec<String>,
}

impl AssumptionReport {
    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }
}

pub const MARGIN_WARNING: f64 = 0.98;
pub const RATIO_RANGE: (f64, f64) = (0.05, 20.0);

/// `(1/p) sum_j (l_j c / (1 - l_j c))^2 - n/p`.
pub fn centering_objective(c: f64, spectrum: &SpectrumModel, n: usize) -> Result<f64> {
    let pi1 = spectrum.pi_first();
    if !(0.0..pi1).contains(&c) {
        return Err(Error::Domain(format!("c = {c} outside [0, pi_1 = {pi1})")));
    }
    let ratio = n as f64 / spectrum.p() as f64;
    Ok(spectrum.average(|l| {
        let t = l * c / (1.0 - l * c);
        t * t
    }) - ratio)
}

/// Unique root of [`centering_objective`] in `[0, pi_1)`.
pub fn solve_c(spectrum: &SpectrumModel, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("sample count n must be positive".into()));
    }
    let pi1 = spectrum.pi_first();
    let mut guard = 1e-6;
    let upper = loop {
        let hi = pi1 * (1.0 - guard);
        if centering_objective(hi, spectrum, n)? > 0.0 {
            break hi;
        }
        guard *= 0.1;
        if guard < 1e-300 || pi1 * (1.0 - guard) == pi1 {
            return Err(Error::Numerical {
                message: "could not bracket c below pi_1".into(),
                iterations: 0,
            });
        }
    };
    solve_root_bracketed(
        |c| centering_objective(c, spectrum, n).unwrap_or(f64::NAN),
        0.0,
        upper,
        1e-15,
    )
}

pub fn centering_params(spectrum: &SpectrumModel, n: usize) -> Result<CenteringParams> {
    let c = solve_c(spectrum, n)?;
    let p = spectrum.p() as f64;
    let nf = n as f64;
    let first = spectrum.average(|l| l * c / (1.0 - l * c));
    let third = spectrum.average(|l| (l * c / (1.0 - l * c)).powi(3));
    let mu = (1.0 + p / nf * first) / c;
    let sigma = (1.0 + p / nf * third).cbrt() / (nf.powf(2.0 / 3.0) * c);
    Ok(CenteringParams {
        c,
        mu,
        sigma,
        margin: c / spectrum.pi_first(),
        ratio: nf / p,
    })
}

pub fn check_assumptions(spectrum: &SpectrumModel, n: usize, params: &CenteringParams) -> AssumptionReport {
    let ratio = n as f64 / spectrum.p() as f64;
    let mut warnings = Vec::new();
    if params.margin > MARGIN_WARNING {
        warnings.push(format!(
            "c/pi_1 = {:.4} exceeds {MARGIN_WARNING}: the top of the spectrum is close to the phase-transition regime",
            params.margin
        ));
    }
    if ratio < RATIO_RANGE.0 || ratio > RATIO_RANGE.1 {
        warnings.push(format!(
            "n/p = {ratio:.4} outside [{}, {}]",
            RATIO_RANGE.0, RATIO_RANGE.1
        ));
    }
    AssumptionReport {
        ratio,
        largest_ell: spectrum.ell()[0],
        smallest_ell: *spectrum.ell().last().unwrap(),
        margin: params.margin,
        warnings,
    }
}
