use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::SeedSpec;
use crate::centering::SpectrumModel;
use crate::error::{Error, Result};
use crate::factor::Panel;

/// Parameters of a synthetic factor panel `xi_it = Lambda_i' F_t + eta_it`
/// with `T = 2 * n_half` observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorPanelSpec {
    pub p: usize,
    pub n_half: usize,
    pub k: usize,
    pub loading_scale: f64,
    pub factor_variance: f64,
    pub idio_spectrum: SpectrumModel,
}

impl FactorPanelSpec {
    /// White idiosyncratic noise, `Sigma = I_p`.
    pub fn white(p: usize, n_half: usize, k: usize, loading_scale: f64, factor_variance: f64) -> Result<Self> {
        Ok(Self {
            p,
            n_half,
            k,
            loading_scale,
            factor_variance,
            idio_spectrum: SpectrumModel::identity(p)?,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.n_half == 0 {
            return Err(Error::InvalidInput("panel needs p >= 1 and n_half >= 1".into()));
        }
        if self.k >= self.p {
            return Err(Error::InvalidInput(format!(
                "factor count k = {} must be below p = {}",
                self.k, self.p
            )));
        }
        if !(self.loading_scale > 0.0 && self.loading_scale.is_finite())
            || !(self.factor_variance > 0.0 && self.factor_variance.is_finite())
        {
            return Err(Error::InvalidInput(
                "loading_scale and factor_variance must be positive and finite".into(),
            ));
        }
        if self.idio_spectrum.p() != self.p {
            return Err(Error::InvalidInput(format!(
                "idiosyncratic spectrum has {} entries for p = {}",
                self.idio_spectrum.p(),
                self.p
            )));
        }
        Ok(())
    }

    pub fn t(&self) -> usize {
        2 * self.n_half
    }
}

/// Real `p x T` panel: loadings `N(0, loading_scale^2)` drawn once, factors
/// `N(0, factor_variance)` per period, idiosyncratic vectors `N(0, Sigma/2)`
/// i.i.d. over time with `Sigma` diagonal.
pub fn synth_factor_panel(spec: &FactorPanelSpec, seed: SeedSpec) -> Result<Panel> {
    spec.validate()?;
    let (p, t, k) = (spec.p, spec.t(), spec.k);
    let mut rng = seed.rng();
    let loadings: Vec<f64> = (0..p * k)
        .map(|_| spec.loading_scale * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let factor_sd = spec.factor_variance.sqrt();
    let factors: Vec<f64> = (0..t * k)
        .map(|_| factor_sd * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let mut values = Vec::with_capacity(p * t);
    for (i, &l) in spec.idio_spectrum.ell().iter().enumerate() {
        let sd = (0.5 * l).sqrt();
        for s in 0..t {
            let common: f64 = (0..k).map(|j| loadings[i * k + j] * factors[s * k + j]).sum();
            values.push(common + sd * rng.sample::<f64, _>(StandardNormal));
        }
    }
    let ids = (1..=p).map(|i| format!("s{i}")).collect();
    Panel::new(ids, p, t, values)
}
