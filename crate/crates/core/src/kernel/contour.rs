//! The correlation kernel
//!
//! ```text
//! K(eta, zeta) = n / (2 pi i)^2  oint_Gamma dz oint_Sigma dw
//!     exp(-eta n (z - q) + zeta n (w - q)) / (w - z) (z / w)^n
//!     prod_k (pi_k - w) / (pi_k - z)
//! ```
//!
//! evaluated with the trapezoid rule on both circles (nodes at half-integer
//! angles, so the node sets are closed under conjugation and the sums are
//! real up to rounding). All factors are accumulated as complex logarithms
//! and rescaled by their largest real part before exponentiation.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::centering::CenteringParams;
use crate::error::{Error, Result};
use crate::numerics::{complex_determinant, gauss_legendre, ComplexMatrix};

use super::config::{ContourSpec, KernelConfig, NystromConfig, MAX_CONTOUR_NODES, MIN_RELATIVE_GAP};
use super::{clip_probability, REFINEMENT_TOL};

/// Largest tolerated imaginary part, relative to the real part.
pub const IMAG_REL_TOL: f64 = 1e-8;
const IMAG_ROUNDING_FACTOR: f64 = 64.0;
/// Largest tolerated imaginary part of a Fredholm determinant.
pub const DET_IMAG_TOL: f64 = 1e-8;

fn circle(center: f64, radius: f64, m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|a| {
            let theta = 2.0 * std::f64::consts::PI * (a as f64 + 0.5) / m as f64;
            Complex64::new(center, 0.0) + Complex64::from_polar(radius, theta)
        })
        .collect()
}

/// Contour nodes with the eta/zeta-independent parts of the log integrand.
struct Discretization {
    n: f64,
    q: f64,
    z: Vec<Complex64>,
    z_base: Vec<Complex64>,
    w: Vec<Complex64>,
    w_base: Vec<Complex64>,
}

impl Discretization {
    fn new(cfg: &KernelConfig, contour: &ContourSpec) -> Result<Self> {
        contour.validate(cfg)?;
        let m = contour.nodes;
        let n = cfg.n() as f64;
        let inv_m = (m as f64).ln();
        let c = Complex64::new(contour.gamma_center, 0.0);
        let z = circle(contour.gamma_center, contour.gamma_radius, m);
        let w = circle(0.0, contour.sigma_radius, m);
        let log_pi_minus =
            |x: Complex64| -> Complex64 { cfg.pi().iter().map(|&p| (Complex64::new(p, 0.0) - x).ln()).sum() };
        let z_base = z
            .iter()
            .map(|&za| (za - c).ln() - inv_m + n * za.ln() - log_pi_minus(za))
            .collect();
        let w_base = w
            .iter()
            .map(|&wb| wb.ln() - inv_m - n * wb.ln() + log_pi_minus(wb))
            .collect();
        Ok(Self {
            n,
            q: cfg.q(),
            z,
            z_base,
            w,
            w_base,
        })
    }

    fn log_a(&self, eta: f64) -> Vec<Complex64> {
        let s = eta * self.n;
        self.z
            .iter()
            .zip(&self.z_base)
            .map(|(&z, &b)| b - s * (z - self.q))
            .collect()
    }

    fn log_b(&self, zeta: f64) -> Vec<Complex64> {
        let s = zeta * self.n;
        self.w
            .iter()
            .zip(&self.w_base)
            .map(|(&w, &b)| b + s * (w - self.q))
            .collect()
    }
}

/// Values `exp(v - shift)` with their common log scale `shift`.
type ScaledRow = (Vec<Complex64>, f64);

/// `exp(v - max Re v)` and the shift.
fn scaled_exp(v: &[Complex64]) -> ScaledRow {
    let shift = v.iter().map(|x| x.re).fold(f64::NEG_INFINITY, f64::max);
    (v.iter().map(|x| (x - shift).exp()).collect(), shift)
}

fn check_imag(value: Complex64, abs_sum: f64, what: &str) -> Result<()> {
    let im = value.im.abs();
    if im > IMAG_REL_TOL * value.re.abs() && im > IMAG_ROUNDING_FACTOR * f64::EPSILON * abs_sum {
        return Err(Error::Accuracy {
            what: format!("imaginary part of {what}"),
            deviation: im / value.re.abs().max(f64::MIN_POSITIVE),
            tolerance: IMAG_REL_TOL,
        });
    }
    Ok(())
}

fn check_point(eta: f64, zeta: f64) -> Result<()> {
    if !(eta > 0.0 && eta.is_finite() && zeta > 0.0 && zeta.is_finite()) {
        return Err(Error::Domain(format!(
            "kernel arguments must be positive, got ({eta}, {zeta})"
        )));
    }
    Ok(())
}

fn finish(sum: Complex64, abs_sum: f64, scale: f64, what: &str) -> Result<f64> {
    check_imag(sum, abs_sum, what)?;
    let v = sum.re * scale.exp();
    if !v.is_finite() {
        return Err(Error::Numerical {
            message: format!("{what} overflowed (log scale {scale})"),
            iterations: 0,
        });
    }
    Ok(v)
}

/// Double-contour evaluation of `K(eta, zeta)`.
pub fn kernel_value(eta: f64, zeta: f64, cfg: &KernelConfig, contour: &ContourSpec) -> Result<f64> {
    check_point(eta, zeta)?;
    let d = Discretization::new(cfg, contour)?;
    kernel_from(&d, eta, zeta)
}

fn kernel_from(d: &Discretization, eta: f64, zeta: f64) -> Result<f64> {
    let (a, alpha) = scaled_exp(&d.log_a(eta));
    let (b, beta) = scaled_exp(&d.log_b(zeta));
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for (za, aa) in d.z.iter().zip(&a) {
        let mut inner = Complex64::new(0.0, 0.0);
        for (wb, bb) in d.w.iter().zip(&b) {
            let t = bb / (wb - za);
            inner += t;
            abs_sum += aa.norm() * t.norm();
        }
        sum += aa * inner;
    }
    finish(sum * d.n, abs_sum * d.n, alpha + beta, "double-contour kernel")
}

/// Residue form: the `Gamma` integral is replaced by the sum over the poles
/// `z = pi_j`, leaving a single `Sigma` integral. The `Gamma` fields of the
/// contour are ignored.
pub fn kernel_value_residue(eta: f64, zeta: f64, cfg: &KernelConfig, contour: &ContourSpec) -> Result<f64> {
    check_point(eta, zeta)?;
    let gap = cfg.min_relative_gap();
    if gap < MIN_RELATIVE_GAP {
        return Err(Error::Degeneracy(format!(
            "residue form needs distinct pi values (relative gap {gap:e} < {MIN_RELATIVE_GAP:e})"
        )));
    }
    let q = cfg.q();
    if !(contour.sigma_radius > 0.0 && contour.sigma_radius < q) {
        return Err(Error::Configuration(format!(
            "Sigma radius {} must lie in (0, q = {q})",
            contour.sigma_radius
        )));
    }
    if contour.nodes < 16 || !contour.nodes.is_multiple_of(2) {
        return Err(Error::Configuration(format!(
            "contour node count {} must be even and at least 16",
            contour.nodes
        )));
    }
    let n = cfg.n() as f64;
    let pi = cfg.pi();
    let m = contour.nodes;
    let c = |x: f64| Complex64::new(x, 0.0);
    // Per pole: n ln pi_j - n pi_j eta - sum_{k != j} ln(pi_j - pi_k).
    let pole_log: Vec<Complex64> = (0..pi.len())
        .map(|j| {
            let denom: Complex64 = (0..pi.len()).filter(|&k| k != j).map(|k| c(pi[j] - pi[k]).ln()).sum();
            c(n * pi[j].ln() - n * pi[j] * eta) - denom
        })
        .collect();
    let mut logs = Vec::with_capacity(m * pi.len());
    for w in circle(0.0, contour.sigma_radius, m) {
        let common = w.ln() - (m as f64).ln() + n * eta * q + zeta * n * (w - q) - n * w.ln();
        let lw: Vec<Complex64> = pi.iter().map(|&p| (w - p).ln()).collect();
        let total: Complex64 = lw.iter().sum();
        for j in 0..pi.len() {
            logs.push(common + pole_log[j] + total - lw[j]);
        }
    }
    let (terms, shift) = scaled_exp(&logs);
    let sum: Complex64 = terms.iter().sum();
    let abs_sum: f64 = terms.iter().map(|t| t.norm()).sum();
    finish(sum * n, abs_sum * n, shift, "residue kernel")
}

/// `det(1 - K)` on `(s, s + L)` with a single Gauss–Legendre rule.
///
/// With `A_ia = exp(logA(x_i, z_a) - alpha_i)` and
/// `B_bj = exp(logB(x_j, w_b) - beta_j)`, the kernel matrix is
/// `K_ij = n e^{alpha_i + beta_j} (A C B)_ij` with `C_ab = 1 / (w_b - z_a)`.
/// Conjugating by `diag(e^{(beta_i - alpha_i) / 2})` leaves the determinant
/// unchanged and gives the balanced matrix
/// `s_i s_j n (A C B)_ij`, `s_i = sqrt(weight_i) e^{(alpha_i + beta_i) / 2}`.
pub fn fredholm_det(s: f64, cfg: &KernelConfig, nys: &NystromConfig, contour: &ContourSpec) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("threshold must be positive, got {s}")));
    }
    let d = Discretization::new(cfg, contour)?;
    let rule = gauss_legendre(nys.order(), s, s + nys.truncation())?;
    let nq = rule.nodes.len();
    let mz = d.z.len();

    let rows: Vec<(ScaledRow, ScaledRow)> = rule
        .nodes
        .par_iter()
        .map(|&x| (scaled_exp(&d.log_a(x)), scaled_exp(&d.log_b(x))))
        .collect();
    let mut scale = Vec::with_capacity(nq);
    // a_t[a][i] and b[j][b] layouts keep the inner loops contiguous.
    let mut a_t = vec![Complex64::new(0.0, 0.0); mz * nq];
    let mut b = Vec::with_capacity(nq);
    for (i, ((a_row, alpha), (b_row, beta))) in rows.into_iter().enumerate() {
        let log_s = 0.5 * (rule.weights[i].ln() + alpha + beta);
        if log_s > 300.0 {
            return Err(Error::Accuracy {
                what: format!("kernel magnitude at x = {} (contours not adapted to n)", rule.nodes[i]),
                deviation: log_s,
                tolerance: 300.0,
            });
        }
        scale.push(log_s.exp());
        for (a, v) in a_row.into_iter().enumerate() {
            a_t[a * nq + i] = v;
        }
        b.push(b_row);
    }

    // T[b][i] = sum_a A_ia / (w_b - z_a)
    let t: Vec<Vec<Complex64>> =
        d.w.par_iter()
            .map(|&wb| {
                let mut col = vec![Complex64::new(0.0, 0.0); nq];
                for (a, &za) in d.z.iter().enumerate() {
                    let inv = (wb - za).inv();
                    let src = &a_t[a * nq..(a + 1) * nq];
                    for (acc, &v) in col.iter_mut().zip(src) {
                        *acc += v * inv;
                    }
                }
                col
            })
            .collect();

    let matrix = ComplexMatrix::from_fn(nq, nq, |i, j| {
        let mut k = Complex64::new(0.0, 0.0);
        for (bi, col) in t.iter().enumerate() {
            k += col[i] * b[j][bi];
        }
        let delta = if i == j { 1.0 } else { 0.0 };
        Complex64::new(delta, 0.0) - k * (d.n * scale[i] * scale[j])
    });
    let det = complex_determinant(&matrix)?;
    if !det.re.is_finite() || det.im.abs() > DET_IMAG_TOL {
        return Err(Error::Accuracy {
            what: format!("imaginary part of the determinant at s = {s}"),
            deviation: det.im.abs(),
            tolerance: DET_IMAG_TOL,
        });
    }
    Ok(det.re)
}

/// `Pr(lambda_1 <= s) = det(1 - K on (s, inf))`, checked against the
/// doubled Nyström configuration; returns the refined value.
pub fn largest_eig_cdf(s: f64, cfg: &KernelConfig, nys: &NystromConfig, contour: &ContourSpec) -> Result<f64> {
    let coarse = fredholm_det(s, cfg, nys, contour)?;
    let fine = fredholm_det(s, cfg, &nys.doubled(), contour)?;
    let deviation = (coarse - fine).abs();
    if deviation > REFINEMENT_TOL {
        return Err(Error::Accuracy {
            what: format!("Nystrom refinement at s = {s}"),
            deviation,
            tolerance: REFINEMENT_TOL,
        });
    }
    clip_probability(fine, &format!("determinant at s = {s}"))
}

/// Doubles the contour node count until the kernel at every pair of the
/// probe points changes by at most `1e-10` relative to the largest value.
pub fn refine_contour_nodes(cfg: &KernelConfig, contour: &ContourSpec, probes: &[f64]) -> Result<ContourSpec> {
    let eval = |spec: &ContourSpec| -> Result<Vec<f64>> {
        let d = Discretization::new(cfg, spec)?;
        let mut out = Vec::with_capacity(probes.len() * probes.len());
        for &x in probes {
            for &y in probes {
                out.push(kernel_from(&d, x, y)?);
            }
        }
        Ok(out)
    };
    let mut current = *contour;
    let mut prev = eval(&current).ok();
    while current.nodes < MAX_CONTOUR_NODES {
        let next = current.with_nodes(2 * current.nodes);
        let vals = eval(&next).ok();
        if let (Some(a), Some(b)) = (&prev, &vals) {
            let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let diff = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            if diff <= 1e-10 * scale.max(f64::MIN_POSITIVE) {
                return Ok(current);
            }
        }
        current = next;
        prev = vals;
    }
    Err(Error::Numerical {
        message: format!("contour quadrature did not converge with {MAX_CONTOUR_NODES} nodes"),
        iterations: MAX_CONTOUR_NODES,
    })
}

/// `S(u, v) = sigma K(mu + sigma u, mu + sigma v)`.
pub fn rescaled_kernel(
    u: f64,
    v: f64,
    cfg: &KernelConfig,
    params: &CenteringParams,
    contour: &ContourSpec,
) -> Result<f64> {
    let lo = params.mu + params.sigma * u.min(v);
    if !(lo > 0.0) {
        return Err(Error::Domain(format!("mu + sigma min(u, v) = {lo} is not positive")));
    }
    Ok(params.sigma * kernel_value(params.mu + params.sigma * u, params.mu + params.sigma * v, cfg, contour)?)
}

/// `det(1 - S on (x, x + L))`, i.e. `Pr((lambda_1 - mu) / sigma <= x)`, with
/// the Nyström configuration given in rescaled units.
pub fn rescaled_cdf(
    x: f64,
    cfg: &KernelConfig,
    params: &CenteringParams,
    nys: &NystromConfig,
    contour: &ContourSpec,
) -> Result<f64> {
    let s = params.mu + params.sigma * x;
    if !(s > 0.0) {
        return Err(Error::Domain(format!("mu + sigma x = {s} is not positive")));
    }
    let raw = NystromConfig::new(params.sigma * nys.truncation(), nys.order())?;
    largest_eig_cdf(s, cfg, &raw, contour)
}

/// Largest pairwise deviation of `largest_eig_cdf(s)` across the given `q`
/// values. With `contour = None` each `q` uses its default contour.
pub fn q_invariance_check(
    cfg: &KernelConfig,
    s: f64,
    nys: &NystromConfig,
    qs: &[f64],
    contour: Option<&ContourSpec>,
) -> Result<f64> {
    let mut values = Vec::with_capacity(qs.len());
    for &q in qs {
        let c = cfg.with_q(q)?;
        let spec = match contour {
            Some(spec) => *spec,
            None => ContourSpec::default_for(&c),
        };
        values.push(largest_eig_cdf(s, &c, nys, &spec)?);
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(if values.is_empty() { 0.0 } else { hi - lo })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centering::{centering_params, SpectrumModel};
    use crate::kernel::oracle::cdf_n1_closed;

    fn cfg(pi: &[f64], n: usize) -> KernelConfig {
        KernelConfig::new(pi.to_vec(), n, 0.5 * pi[0]).unwrap()
    }

    #[test]
    fn single_pole_closed_form() {
        let c = cfg(&[1.0], 1);
        let spec = ContourSpec::default_for(&c);
        for (eta, zeta) in [(0.3, 0.3), (1.0, 2.5), (4.0, 0.7)] {
            let want = (-eta * (1.0 - c.q()) - zeta * c.q()).exp();
            let v = kernel_value(eta, zeta, &c, &spec).unwrap();
            let r = kernel_value_residue(eta, zeta, &c, &spec).unwrap();
            assert!((v - want).abs() < 1e-10 * want, "{v} vs {want}");
            assert!((r - want).abs() < 1e-10 * want, "{r} vs {want}");
        }
    }

    #[test]
    fn contour_and_residue_agree() {
        for (pi, n) in [
            (vec![1.0, 1.7, 3.0], 2),
            (vec![0.8, 1.1, 1.9, 2.4], 2),
            (vec![1.0, 2.0], 5),
        ] {
            let c = cfg(&pi, n);
            let spec = ContourSpec::default_for(&c);
            for (eta, zeta) in [(0.5, 0.5), (1.2, 2.0), (3.0, 0.9)] {
                let v = kernel_value(eta, zeta, &c, &spec).unwrap();
                let r = kernel_value_residue(eta, zeta, &c, &spec).unwrap();
                assert!((v - r).abs() <= 1e-8 * r.abs().max(1e-300), "pi {pi:?}: {v} vs {r}");
            }
        }
    }

    #[test]
    fn contour_deformation_and_node_doubling() {
        let c = cfg(&[1.0, 1.4, 2.5], 2);
        let spec = ContourSpec::default_for(&c);
        let base = kernel_value(1.5, 1.1, &c, &spec).unwrap();
        let doubled = kernel_value(1.5, 1.1, &c, &spec.with_nodes(512)).unwrap();
        assert!((base - doubled).abs() <= 1e-10 * base.abs());
        for r in [0.1, 0.3, 0.45] {
            let moved = kernel_value(1.5, 1.1, &c, &spec.with_sigma_radius(r)).unwrap();
            assert!((moved - base).abs() <= 1e-8 * base.abs().max(1.0), "r = {r}");
        }
        let wide = ContourSpec {
            gamma_center: 2.0,
            gamma_radius: 1.3,
            ..spec
        };
        let moved = kernel_value(1.5, 1.1, &c, &wide).unwrap();
        assert!((moved - base).abs() <= 1e-8 * base.abs().max(1.0));
    }

    #[test]
    fn residue_rejects_coincident_poles() {
        let c = cfg(&[1.0, 1.0, 2.0], 2);
        let spec = ContourSpec::default_for(&c);
        assert!(matches!(
            kernel_value_residue(1.0, 1.0, &c, &spec),
            Err(Error::Degeneracy(_))
        ));
        assert!(kernel_value(1.0, 1.0, &c, &spec).is_ok());
    }

    #[test]
    fn invalid_arguments() {
        let c = cfg(&[1.0, 2.0], 2);
        let spec = ContourSpec::default_for(&c);
        assert!(matches!(kernel_value(0.0, 1.0, &c, &spec), Err(Error::Domain(_))));
        let bad = spec.with_sigma_radius(0.6);
        assert!(matches!(kernel_value(1.0, 1.0, &c, &bad), Err(Error::Configuration(_))));
    }

    #[test]
    fn n1_determinant_is_hypoexponential() {
        let c = cfg(&[1.0], 1);
        let spec = ContourSpec::default_for(&c);
        let v = largest_eig_cdf(1.0, &c, &NystromConfig::raw_default(&c, 1.0), &spec).unwrap();
        assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-10);
        let c = cfg(&[1.0, 2.0], 1);
        let spec = ContourSpec::default_for(&c);
        for s in [0.2, 1.0, 3.0] {
            let v = largest_eig_cdf(s, &c, &NystromConfig::raw_default(&c, s), &spec).unwrap();
            let want = cdf_n1_closed(s, c.pi()).unwrap();
            assert!((v - want).abs() < 1e-8, "s = {s}: {v} vs {want}");
        }
    }

    #[test]
    fn determinant_monotone_and_saturates() {
        let c = cfg(&[1.0, 1.6, 2.2, 3.1], 2);
        let spec = ContourSpec::default_for(&c);
        let vals: Vec<f64> = [0.3, 0.8, 1.5, 2.5, 4.0]
            .iter()
            .map(|&s| largest_eig_cdf(s, &c, &NystromConfig::raw_default(&c, s), &spec).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]), "{vals:?}");
        let far = largest_eig_cdf(30.0, &c, &NystromConfig::raw_default(&c, 30.0), &spec).unwrap();
        assert!((far - 1.0).abs() < 1e-6);
    }

    #[test]
    fn q_invariance() {
        let c = cfg(&[1.0, 1.8], 2);
        let nys = NystromConfig::raw_default(&c, 1.2);
        let qs = [0.25, 0.5, 0.75];
        assert!(q_invariance_check(&c, 1.2, &nys, &qs, None).unwrap() <= 1e-6);
        let fixed = ContourSpec {
            gamma_center: 1.4,
            gamma_radius: 0.55,
            sigma_radius: 0.2,
            nodes: 256,
        };
        assert!(q_invariance_check(&c, 1.2, &nys, &qs, Some(&fixed)).unwrap() <= 1e-6);
        assert_eq!(q_invariance_check(&c, 1.2, &nys, &[0.5], None).unwrap(), 0.0);
        assert!(matches!(
            q_invariance_check(&c, 1.2, &nys, &[0.5, 1.0], None),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn rescaled_matches_raw_change_of_variables() {
        let sp = SpectrumModel::new(vec![1.0, 0.7, 0.4, 0.3]).unwrap();
        let params = centering_params(&sp, 2).unwrap();
        let c = KernelConfig::from_spectrum(&sp, 2).unwrap();
        let spec = ContourSpec::default_for(&c);
        let x = 0.4;
        let nys = NystromConfig::new(30.0, 40).unwrap();
        // Nystrom on S built entry by entry from the rescaled kernel.
        let rule = gauss_legendre(40, x, x + 30.0).unwrap();
        let m = rule.nodes.len();
        let mut a = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                let k = rescaled_kernel(rule.nodes[i], rule.nodes[j], &c, &params, &spec).unwrap();
                a[i * m + j] = f64::from(u8::from(i == j)) - rule.weights[i].sqrt() * k * rule.weights[j].sqrt();
            }
        }
        let direct = crate::numerics::real_determinant(a, m).unwrap();
        let raw = NystromConfig::new(params.sigma * 30.0, 40).unwrap();
        let via_raw = fredholm_det(params.mu + params.sigma * x, &c, &raw, &spec).unwrap();
        assert!((direct - via_raw).abs() < 1e-8, "{direct} vs {via_raw}");
        let d = rescaled_kernel(0.3, 0.3, &c, &params, &spec).unwrap();
        assert!(d.is_finite());
        assert!(rescaled_cdf(x, &c, &params, &nys, &spec).is_ok());
    }

    #[test]
    fn singular_case_properties() {
        // n < p: four population eigenvalues, two samples.
        let c = cfg(&[1.0, 1.3, 2.0, 2.6], 2);
        let spec = ContourSpec::default_for(&c);
        let s = 1.1;
        let nys = NystromConfig::raw_default(&c, s);
        let v = largest_eig_cdf(s, &c, &nys, &spec).unwrap();
        assert!((0.0..=1.0).contains(&v));
        let a = fredholm_det(s, &c, &nys, &spec).unwrap();
        let b = fredholm_det(
            s,
            &c,
            &NystromConfig::new(nys.truncation(), 2 * nys.order()).unwrap(),
            &spec,
        )
        .unwrap();
        let e = fredholm_det(
            s,
            &c,
            &NystromConfig::new(2.0 * nys.truncation(), 2 * nys.order()).unwrap(),
            &spec,
        )
        .unwrap();
        assert!((a - b).abs() < 1e-6 && (b - e).abs() < 1e-6);
    }

    #[test]
    fn node_refinement_stops() {
        let c = cfg(&[1.0, 2.0], 3);
        let spec = ContourSpec::default_for(&c).with_nodes(16);
        let refined = refine_contour_nodes(&c, &spec, &[0.5, 2.0]).unwrap();
        assert!(refined.nodes >= 16 && refined.nodes <= MAX_CONTOUR_NODES);
    }
}
