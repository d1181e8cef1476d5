use serde::{Deserialize, Serialize};

use crate::centering::{centering_params, CenteringParams, SpectrumModel};
use crate::error::{Error, Result};

/// Smallest admissible relative gap between distinct `pi` values.
pub const MIN_RELATIVE_GAP: f64 = 1e-8;
pub const DEFAULT_CONTOUR_NODES: usize = 256;
pub const MAX_CONTOUR_NODES: usize = 8192;
pub const DEFAULT_NYSTROM_ORDER: usize = 48;

/// Inverse population eigenvalues `pi_1 <= ... <= pi_p`, sample count `n`
/// and the conjugation parameter `0 < q < pi_1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    pi: Vec<f64>,
    n: usize,
    q: f64,
}

impl KernelConfig {
    pub fn new(mut pi: Vec<f64>, n: usize, q: f64) -> Result<Self> {
        if pi.is_empty() {
            return Err(Error::InvalidInput("pi must be non-empty".into()));
        }
        if n == 0 {
            return Err(Error::InvalidInput("n must be positive".into()));
        }
        if pi.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidInput("pi values must be positive and finite".into()));
        }
        pi.sort_by(f64::total_cmp);
        for w in pi.windows(2) {
            let gap = (w[1] - w[0]) / w[1];
            if gap > 0.0 && gap < MIN_RELATIVE_GAP {
                return Err(Error::Degeneracy(format!(
                    "pi values {} and {} are distinct but closer than {MIN_RELATIVE_GAP:e} relative",
                    w[0], w[1]
                )));
            }
        }
        if !(q > 0.0 && q < pi[0]) {
            return Err(Error::Configuration(format!("q = {q} must lie in (0, {})", pi[0])));
        }
        Ok(Self { pi, n, q })
    }

    /// `pi_k = 1 / ell_k` with the default `q = pi_1 / 2`.
    pub fn from_spectrum(spectrum: &SpectrumModel, n: usize) -> Result<Self> {
        let pi = spectrum.pi().to_vec();
        let q = 0.5 * pi[0];
        Self::new(pi, n, q)
    }

    pub fn with_q(&self, q: f64) -> Result<Self> {
        Self::new(self.pi.clone(), self.n, q)
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn p(&self) -> usize {
        self.pi.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn pi_first(&self) -> f64 {
        self.pi[0]
    }

    pub fn pi_last(&self) -> f64 {
        self.pi[self.pi.len() - 1]
    }

    /// Smallest relative gap between consecutive `pi` values, zero gaps
    /// included; `+inf` for `p = 1`.
    pub fn min_relative_gap(&self) -> f64 {
        self.pi
            .windows(2)
            .map(|w| (w[1] - w[0]) / w[1])
            .fold(f64::INFINITY, f64::min)
    }

    /// The spectrum `ell_k = 1 / pi_k`.
    pub fn spectrum(&self) -> Result<SpectrumModel> {
        SpectrumModel::new(self.pi.iter().map(|p| 1.0 / p).collect())
    }

    /// Third derivative at `z` of `-eta z + ln z - (1/n) sum ln(pi_k - z)`.
    pub(crate) fn third_derivative(&self, z: f64) -> f64 {
        let n = self.n as f64;
        2.0 / (z * z * z) + 2.0 / n * self.pi.iter().map(|&p| (p - z).powi(-3)).sum::<f64>()
    }
}

/// Circle `Gamma` (center, radius) enclosing every `pi_k` inside `Re z > q`,
/// and circle `Sigma` `|w| = sigma_radius` inside `Re w < q`, each
/// discretized with `nodes` equispaced points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub gamma_center: f64,
    pub gamma_radius: f64,
    pub sigma_radius: f64,
    pub nodes: usize,
}

impl ContourSpec {
    /// Center `(pi_1 + pi_p) / 2`, radius `(pi_p - pi_1) / 2 + min(pi_1 - q, pi_1) / 2`,
    /// `Sigma` radius `q / 2`.
    pub fn default_for(cfg: &KernelConfig) -> Self {
        let (lo, hi, q) = (cfg.pi_first(), cfg.pi_last(), cfg.q());
        Self {
            gamma_center: 0.5 * (lo + hi),
            gamma_radius: 0.5 * (hi - lo) + 0.5 * (lo - q).min(lo),
            sigma_radius: 0.5 * q,
            nodes: DEFAULT_CONTOUR_NODES,
        }
    }

    /// Circles passing at distance `delta = (2 / (n f'''(c)))^{1/3}` on either
    /// side of the double critical point `c`, so that the integrands stay of
    /// moderate size for large `n`. Requires `c - delta < q < c + delta`.
    pub fn saddle_adapted(cfg: &KernelConfig, params: &CenteringParams) -> Result<Self> {
        let c = params.c;
        let (lo, hi) = (cfg.pi_first(), cfg.pi_last());
        if !(c > 0.0 && c < lo) {
            return Err(Error::Configuration(format!("critical point {c} outside (0, {lo})")));
        }
        let f3 = cfg.third_derivative(c);
        let delta = (2.0 / (cfg.n() as f64 * f3)).cbrt().min(0.5 * c).min(0.5 * (lo - c));
        let left = c + delta;
        let right = hi + 0.5 * (hi - c);
        let spec = Self {
            gamma_center: 0.5 * (left + right),
            gamma_radius: 0.5 * (right - left),
            sigma_radius: c - delta,
            nodes: DEFAULT_CONTOUR_NODES,
        };
        spec.validate(cfg)?;
        Ok(spec)
    }

    pub fn with_nodes(self, nodes: usize) -> Self {
        Self { nodes, ..self }
    }

    pub fn with_sigma_radius(self, sigma_radius: f64) -> Self {
        Self { sigma_radius, ..self }
    }

    pub fn validate(&self, cfg: &KernelConfig) -> Result<()> {
        let fields = [self.gamma_center, self.gamma_radius, self.sigma_radius];
        if fields.iter().any(|v| !v.is_finite()) || self.gamma_radius <= 0.0 {
            return Err(Error::Configuration(
                "contour parameters must be finite with positive radii".into(),
            ));
        }
        let left = self.gamma_center - self.gamma_radius;
        let right = self.gamma_center + self.gamma_radius;
        if left <= cfg.q() {
            return Err(Error::Configuration(format!(
                "Gamma circle reaches {left}, not strictly right of q = {}",
                cfg.q()
            )));
        }
        if left >= cfg.pi_first() || right <= cfg.pi_last() {
            return Err(Error::Configuration(format!(
                "Gamma circle [{left}, {right}] does not enclose [{}, {}]",
                cfg.pi_first(),
                cfg.pi_last()
            )));
        }
        if !(self.sigma_radius > 0.0 && self.sigma_radius < cfg.q()) {
            return Err(Error::Configuration(format!(
                "Sigma radius {} must lie in (0, q = {})",
                self.sigma_radius,
                cfg.q()
            )));
        }
        if self.nodes < 16 || !self.nodes.is_multiple_of(2) {
            return Err(Error::Configuration(format!(
                "contour node count {} must be even and at least 16",
                self.nodes
            )));
        }
        Ok(())
    }
}

/// Truncation `L` of `(s, inf)` to `(s, s + L)` and Gauss–Legendre order `M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NystromConfig {
    truncation: f64,
    order: usize,
}

impl NystromConfig {
    pub fn new(truncation: f64, order: usize) -> Result<Self> {
        if !(truncation > 0.0 && truncation.is_finite()) {
            return Err(Error::Configuration(format!(
                "truncation must be positive, got {truncation}"
            )));
        }
        if order < 8 {
            return Err(Error::Configuration(format!(
                "Nystrom order must be at least 8, got {order}"
            )));
        }
        Ok(Self { truncation, order })
    }

    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Twice the truncation and twice the order.
    pub fn doubled(&self) -> Self {
        Self {
            truncation: 2.0 * self.truncation,
            order: 2 * self.order,
        }
    }

    /// Default for Tracy–Widom coordinates: `(x, max(x, 0) + 12)`, at least
    /// 8 long.
    pub fn rescaled_default(x: f64) -> Self {
        Self {
            truncation: (12.0 - x.min(0.0)).max(8.0),
            order: DEFAULT_NYSTROM_ORDER,
        }
    }

    /// Default for raw coordinates at threshold `s`: the interval reaches
    /// `12` scale units past the edge, covers `12` scale units, and extends
    /// at least `40 / (n pi_1)`, forty decay lengths of the largest
    /// eigenvalue's exponential tail.
    pub fn raw_default(cfg: &KernelConfig, s: f64) -> Self {
        let tail = 40.0 / (cfg.n() as f64 * cfg.pi_first());
        let edge = cfg
            .spectrum()
            .and_then(|sp| centering_params(&sp, cfg.n()))
            .map(|cp| (cp.mu + 12.0 * cp.sigma - s).max(12.0 * cp.sigma))
            .unwrap_or(0.0);
        Self {
            truncation: tail.max(edge),
            order: DEFAULT_NYSTROM_ORDER,
        }
    }
}
