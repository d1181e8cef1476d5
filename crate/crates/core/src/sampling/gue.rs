use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use super::SeedSpec;
use crate::error::{Error, Result};
use crate::numerics::{tridiagonalize, ComplexMatrix, SymTridiagonal};

/// How GUE eigenvalues are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GueMethod {
    /// Dense Hermitian sample, Householder-reduced.
    Dense,
    /// Tridiagonal model with the same eigenvalue law: diagonal
    /// `N(0, 1/N)`, off-diagonal `sqrt(Gamma(N - k, 1) / N)`, i.e. the
    /// Householder reduction of a dense draw done in distribution.
    #[default]
    Tridiagonal,
}

/// Dense GUE draw: strictly-lower entries complex Gaussian with
/// `E|z|^2 = 1/N`, real Gaussian diagonal with variance `1/N`.
pub fn sample_gue(n: usize, seed: SeedSpec) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidInput("GUE dimension must be positive".into()));
    }
    let mut rng = seed.rng();
    let diag_sd = (1.0 / n as f64).sqrt();
    let off_sd = (0.5 / n as f64).sqrt();
    let mut h = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = Complex64::new(re * off_sd, im * off_sd);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
        let d: f64 = rng.sample(StandardNormal);
        h[(i, i)] = Complex64::new(d * diag_sd, 0.0);
    }
    Ok(h)
}

/// Tridiagonal draw whose eigenvalues are GUE-distributed.
pub fn sample_gue_tridiagonal(n: usize, seed: SeedSpec) -> Result<SymTridiagonal> {
    if n == 0 {
        return Err(Error::InvalidInput("GUE dimension must be positive".into()));
    }
    let mut rng = seed.rng();
    let nf = n as f64;
    let diag_sd = (1.0 / nf).sqrt();
    let diag = (0..n).map(|_| diag_sd * rng.sample::<f64, _>(StandardNormal)).collect();
    let off = (1..n)
        .map(|k| {
            let shape = (n - k) as f64;
            let g = Gamma::new(shape, 1.0).expect("positive shape").sample(&mut rng);
            (g / nf).sqrt()
        })
        .collect();
    SymTridiagonal::new(diag, off)
}

/// The `m` largest eigenvalues `d_1 > ... > d_m` of a GUE draw.
pub fn gue_top_raw(n: usize, m: usize, seed: SeedSpec, method: GueMethod) -> Result<Vec<f64>> {
    if m == 0 || m > n {
        return Err(Error::InvalidInput(format!("need 1 <= m <= N, got m = {m}, N = {n}")));
    }
    let tri = match method {
        GueMethod::Dense => tridiagonalize(&sample_gue(n, seed)?)?,
        GueMethod::Tridiagonal => sample_gue_tridiagonal(n, seed)?,
    };
    tri.top_eigenvalues(m)
}

/// Edge-scaled top eigenvalues `N^{2/3} (d_i - 2)` using the tridiagonal model.
pub fn gue_top_scaled(n: usize, m: usize, seed: SeedSpec) -> Result<Vec<f64>> {
    gue_top_scaled_with(n, m, seed, GueMethod::Tridiagonal)
}

pub fn gue_top_scaled_with(n: usize, m: usize, seed: SeedSpec, method: GueMethod) -> Result<Vec<f64>> {
    let scale = (n as f64).powf(2.0 / 3.0);
    Ok(gue_top_raw(n, m, seed, method)?
        .into_iter()
        .map(|d| scale * (d - 2.0))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::hermitian_eigenvalues;

    fn mean_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        (m, v)
    }

    #[test]
    fn one_by_one_is_standard_normal_scale() {
        let h = sample_gue(1, SeedSpec::new(1, 0)).unwrap();
        assert_eq!(h.rows(), 1);
        assert_eq!(h[(0, 0)].im, 0.0);
        let xs: Vec<f64> = (0..20_000)
            .map(|r| sample_gue(1, SeedSpec::new(5, r)).unwrap()[(0, 0)].re)
            .collect();
        let (m, v) = mean_var(&xs);
        assert!(m.abs() < 0.03 && (v - 1.0).abs() < 0.03, "mean {m} var {v}");
    }

    #[test]
    fn deterministic_and_hermitian() {
        let a = sample_gue(12, SeedSpec::new(42, 9)).unwrap();
        let b = sample_gue(12, SeedSpec::new(42, 9)).unwrap();
        assert_eq!(a, b);
        assert!(a.is_hermitian());
        let c = sample_gue(12, SeedSpec::new(42, 10)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn trace_variance_is_one() {
        let traces: Vec<f64> = (0..10_000)
            .map(|r| sample_gue(50, SeedSpec::new(11, r)).unwrap().trace().re)
            .collect();
        let (_, v) = mean_var(&traces);
        assert!((v - 1.0).abs() < 0.05, "Var(trace) = {v}");
    }

    #[test]
    fn entry_second_moments() {
        let n = 20;
        let reps = 4_000;
        let (mut off, mut re2, mut diag) = (0.0, 0.0, 0.0);
        for r in 0..reps {
            let h = sample_gue(n, SeedSpec::new(3, r)).unwrap();
            off += h[(5, 2)].norm_sqr();
            re2 += h[(5, 2)].re * h[(5, 2)].re;
            diag += h[(4, 4)].re * h[(4, 4)].re;
        }
        let nf = n as f64;
        let reps = reps as f64;
        assert!((off / reps * nf - 1.0).abs() < 0.08);
        assert!((re2 / reps * nf - 0.5).abs() < 0.05);
        assert!((diag / reps * nf - 1.0).abs() < 0.08);
    }

    #[test]
    fn scaled_output_is_descending_and_centered_at_two() {
        let top = gue_top_scaled(200, 6, SeedSpec::new(1, 1)).unwrap();
        assert!(top.windows(2).all(|w| w[0] > w[1]));
        let raw = gue_top_raw(200, 6, SeedSpec::new(1, 1), GueMethod::Tridiagonal).unwrap();
        let scale = 200f64.powf(2.0 / 3.0);
        for (s, d) in top.iter().zip(&raw) {
            assert_eq!(*s, scale * (d - 2.0));
        }
        assert!(gue_top_raw(5, 6, SeedSpec::new(1, 1), GueMethod::Dense).is_err());
    }

    #[test]
    fn dense_top_matches_full_spectrum() {
        let seed = SeedSpec::new(9, 2);
        let h = sample_gue(30, seed).unwrap();
        let all = hermitian_eigenvalues(&h).unwrap();
        let top = gue_top_raw(30, 4, seed, GueMethod::Dense).unwrap();
        for (a, b) in all.iter().zip(&top) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_under_negation() {
        // d_1 + d_N has mean zero because H -> -H preserves the ensemble.
        let reps = 10_000;
        let sums: Vec<f64> = (0..reps)
            .map(|r| {
                let t = sample_gue_tridiagonal(40, SeedSpec::new(77, r)).unwrap();
                let ev = t.eigenvalues().unwrap();
                ev[0] + ev[ev.len() - 1]
            })
            .collect();
        let (m, v) = mean_var(&sums);
        let se = (v / reps as f64).sqrt();
        assert!(m.abs() < 4.0 * se, "mean {m}, se {se}");
    }

    #[test]
    fn dense_and_tridiagonal_agree_in_law() {
        // Two-sample Kolmogorov-Smirnov on the scaled top eigenvalue.
        let reps = 2_000;
        let mut dense: Vec<f64> = (0..reps)
            .map(|r| gue_top_scaled_with(40, 1, SeedSpec::new(1, r), GueMethod::Dense).unwrap()[0])
            .collect();
        let mut tri: Vec<f64> = (0..reps)
            .map(|r| gue_top_scaled_with(40, 1, SeedSpec::new(2, r), GueMethod::Tridiagonal).unwrap()[0])
            .collect();
        dense.sort_by(f64::total_cmp);
        tri.sort_by(f64::total_cmp);
        let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
        while i < dense.len() && j < tri.len() {
            if dense[i] <= tri[j] {
                i += 1;
            } else {
                j += 1;
            }
            d = d.max((i as f64 / reps as f64 - j as f64 / reps as f64).abs());
        }
        // 1% critical value 1.63 * sqrt(2 / reps).
        assert!(d < 1.63 * (2.0 / reps as f64).sqrt(), "KS distance {d}");
    }
}
