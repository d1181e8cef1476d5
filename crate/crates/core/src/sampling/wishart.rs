use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::SeedSpec;
use crate::centering::SpectrumModel;
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigenvalues, ComplexMatrix};

/// Eigenvalues of one `W_C(Sigma/n, n)` draw, descending, length `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WishartDraw {
    pub eigenvalues: Vec<f64>,
    pub n: usize,
    pub p: usize,
}

impl WishartDraw {
    pub fn largest(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// Draws `X` (`p x n`) with i.i.d. `N_C(0, Sigma)` columns, where the real
/// and imaginary parts are independent `N(0, Sigma/2)`, and returns the
/// eigenvalues of `X X^* / n`. `Sigma` is taken diagonal in the coordinate
/// basis; the eigenvalue law does not depend on the basis.
pub fn sample_wishart_eigs(spectrum: &SpectrumModel, n: usize, seed: SeedSpec) -> Result<WishartDraw> {
    if n == 0 {
        return Err(Error::InvalidInput("sample count n must be positive".into()));
    }
    let p = spectrum.p();
    let mut rng = seed.rng();
    let mut entries = Vec::with_capacity(p * n);
    for &l in spectrum.ell() {
        let sd = (0.5 * l).sqrt();
        for _ in 0..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            entries.push(Complex64::new(sd * re, sd * im));
        }
    }
    let x = ComplexMatrix::new(p, n, entries)?;
    Ok(WishartDraw {
        eigenvalues: sample_covariance_eigenvalues(&x)?,
        n,
        p,
    })
}

/// Descending eigenvalues of `X X^* / cols`, computed through the smaller
/// Gram matrix and padded with zeros to length `rows`.
pub(crate) fn sample_covariance_eigenvalues(x: &ComplexMatrix) -> Result<Vec<f64>> {
    let (p, n) = (x.rows(), x.cols());
    let divisor = n as f64;
    let gram = if n < p {
        x.inner_gram(divisor)
    } else {
        x.outer_gram(divisor)
    };
    let mut ev = hermitian_eigenvalues(&gram)?;
    for v in &mut ev {
        *v = v.max(0.0);
    }
    ev.resize(p, 0.0);
    Ok(ev)
}
