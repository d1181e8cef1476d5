//! Hermitian eigenvalues.
//!
//! A Hermitian matrix is reduced to a real symmetric tridiagonal matrix by
//! Householder reflections; the complex sub-diagonal is then made real by a
//! diagonal unitary similarity. Eigenvalues of the tridiagonal matrix are
//! found either all at once (implicit QL with Wilkinson shifts) or a few at
//! a time (Sturm-sequence bisection).

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

const MAX_QL_SWEEPS: usize = 60;

fn pivmin(off_sq: &[f64]) -> f64 {
    f64::MIN_POSITIVE * off_sq.iter().fold(1.0_f64, |acc, &b| acc.max(b))
}

/// Sturm count of `T - x I` from the squared off-diagonal.
fn sturm_count(diag: &[f64], off_sq: &[f64], pivmin: f64, x: f64) -> usize {
    let mut count = 0;
    let mut d = diag[0] - x;
    if d.abs() < pivmin {
        d = -pivmin;
    }
    count += usize::from(d < 0.0);
    for (&a, &b2) in diag[1..].iter().zip(off_sq) {
        d = a - x - b2 / d;
        if d.abs() < pivmin {
            d = -pivmin;
        }
        count += usize::from(d < 0.0);
    }
    count
}

const LANES: usize = 8;

/// [`sturm_count`] at several points in one pass.
fn sturm_counts(diag: &[f64], off_sq: &[f64], pivmin: f64, xs: &[f64; LANES - 1]) -> [usize; LANES - 1] {
    let mut counts = [0usize; LANES - 1];
    let mut d = [0.0f64; LANES - 1];
    for j in 0..LANES - 1 {
        d[j] = diag[0] - xs[j];
        if d[j].abs() < pivmin {
            d[j] = -pivmin;
        }
        counts[j] += usize::from(d[j] < 0.0);
    }
    for (&a, &b2) in diag[1..].iter().zip(off_sq) {
        for j in 0..LANES - 1 {
            let mut v = a - xs[j] - b2 / d[j];
            if v.abs() < pivmin {
                v = -pivmin;
            }
            d[j] = v;
            counts[j] += usize::from(v < 0.0);
        }
    }
    counts
}

/// Real symmetric tridiagonal matrix; `off[i]` couples rows `i` and `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::InvalidInput(format!(
                "tridiagonal needs n >= 1 diagonal and n - 1 off-diagonal entries, got {} and {}",
                diag.len(),
                off.len()
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    /// Interval containing every eigenvalue.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        let pad = 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + f64::MIN_POSITIVE;
        (lo - pad, hi + pad)
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let off_sq: Vec<f64> = self.off.iter().map(|b| b * b).collect();
        sturm_count(&self.diag, &off_sq, pivmin(&off_sq), x)
    }

    /// The `m` largest eigenvalues in descending order, by multisection:
    /// each sweep of the Sturm recurrence counts at `LANES - 1` interior
    /// points of the bracket at once, whose independent division chains
    /// overlap in the pipeline.
    pub fn top_eigenvalues(&self, m: usize) -> Result<Vec<f64>> {
        let n = self.dim();
        if m > n {
            return Err(Error::InvalidInput(format!(
                "requested {m} eigenvalues of a {n}x{n} matrix"
            )));
        }
        let (lo0, hi0) = self.gershgorin_bounds();
        let off_sq: Vec<f64> = self.off.iter().map(|b| b * b).collect();
        let piv = pivmin(&off_sq);
        // Every probe (x, count_below(x)) narrows later brackets too.
        let mut probes: Vec<(f64, usize)> = Vec::with_capacity(32 * m.max(1));
        let mut out = Vec::with_capacity(m);
        for k in 1..=m {
            // k-th largest = eigenvalue with ascending index n - k.
            let target = n - k + 1;
            let mut lo = lo0;
            let mut hi = hi0;
            for &(x, c) in &probes {
                if c >= target {
                    hi = hi.min(x);
                } else {
                    lo = lo.max(x);
                }
            }
            let mut sweeps = 0;
            loop {
                let tol = 2.0 * f64::EPSILON * lo.abs().max(hi.abs());
                let mid = 0.5 * (lo + hi);
                if hi - lo <= tol || mid <= lo || mid >= hi {
                    break;
                }
                let step = (hi - lo) / LANES as f64;
                let mut xs = [mid; LANES - 1];
                for (j, x) in xs.iter_mut().enumerate() {
                    let v = lo + step * (j + 1) as f64;
                    if v > lo && v < hi {
                        *x = v;
                    }
                }
                let counts = sturm_counts(&self.diag, &off_sq, piv, &xs);
                let (mut new_lo, mut new_hi) = (lo, hi);
                for (&x, &c) in xs.iter().zip(&counts) {
                    probes.push((x, c));
                    if c >= target {
                        new_hi = new_hi.min(x);
                    } else {
                        new_lo = new_lo.max(x);
                    }
                }
                lo = new_lo;
                hi = new_hi;
                sweeps += 1;
                if sweeps > 1_000 {
                    return Err(Error::Numerical {
                        message: "multisection failed to shrink the bracket".into(),
                        iterations: sweeps,
                    });
                }
            }
            out.push(0.5 * (lo + hi));
        }
        Ok(out)
    }

    /// All eigenvalues in descending order, by implicit QL.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let n = self.dim();
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        e.push(0.0);
        let mut total_sweeps = 0;
        for l in 0..n {
            let mut sweeps = 0;
            loop {
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() <= f64::EPSILON * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                sweeps += 1;
                total_sweeps += 1;
                if sweeps > MAX_QL_SWEEPS {
                    return Err(Error::Numerical {
                        message: format!("implicit QL did not converge for eigenvalue {l} of {n}"),
                        iterations: total_sweeps,
                    });
                }
                let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                let mut r = g.hypot(1.0);
                g = d[m] - d[l] + e[l] / (g + r.copysign(g));
                let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
                let mut underflow = false;
                let mut i = m;
                while i > l {
                    i -= 1;
                    let f = s * e[i];
                    let b = c * e[i];
                    r = f.hypot(g);
                    e[i + 1] = r;
                    if r == 0.0 {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if underflow {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        }
        d.sort_by(|a, b| b.total_cmp(a));
        Ok(d)
    }
}

/// Householder reduction of a Hermitian matrix to real symmetric
/// tridiagonal form with the same spectrum.
pub fn tridiagonalize(h: &ComplexMatrix) -> Result<SymTridiagonal> {
    if !h.is_hermitian() {
        return Err(Error::InvalidInput(format!(
            "matrix is not Hermitian (defect {:.3e})",
            h.hermitian_defect()
        )));
    }
    let n = h.rows();
    let mut a: Vec<Complex64> = h.entries().to_vec();
    let mut diag = vec![0.0; n];
    let mut off = vec![Complex64::new(0.0, 0.0); n.saturating_sub(1)];
    let zero = Complex64::new(0.0, 0.0);
    let mut v = vec![zero; n];
    let mut p = vec![zero; n];

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let x0 = a[(k + 1) * n + k];
        let norm = (k + 1..n).map(|i| a[i * n + k].norm_sqr()).sum::<f64>().sqrt();
        diag[k] = a[k * n + k].re;
        if norm == 0.0 {
            off[k] = zero;
            continue;
        }
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * norm;
        for (idx, i) in (k + 1..n).enumerate() {
            v[idx] = a[i * n + k];
        }
        v[0] -= alpha;
        let vnorm2 = 2.0 * norm * (norm + x0.norm());
        let tau = 2.0 / vnorm2;

        // p = tau * S v, with S the trailing m x m block.
        for (r, pr) in p.iter_mut().enumerate().take(m) {
            let row = (k + 1 + r) * n + k + 1;
            let acc = a[row..row + m]
                .iter()
                .zip(&v[..m])
                .fold(zero, |acc, (x, y)| acc + x * y);
            *pr = acc * tau;
        }
        let kappa: f64 = 0.5 * tau * (0..m).map(|i| (v[i].conj() * p[i]).re).sum::<f64>();
        for i in 0..m {
            p[i] -= v[i] * kappa;
        }
        // S <- S - v w^* - w v^*
        for r in 0..m {
            let row = (k + 1 + r) * n + k + 1;
            let (vr, wr) = (v[r], p[r]);
            for c in 0..m {
                a[row + c] -= vr * p[c].conj() + wr * v[c].conj();
            }
        }
        off[k] = alpha;
        a[(k + 1) * n + k] = alpha;
        a[k * n + k + 1] = alpha.conj();
        for i in k + 2..n {
            a[i * n + k] = zero;
            a[k * n + i] = zero;
        }
    }
    if n >= 2 {
        diag[n - 2] = a[(n - 2) * n + n - 2].re;
        off[n - 2] = a[(n - 1) * n + n - 2];
    }
    diag[n - 1] = a[(n - 1) * n + n - 1].re;
    SymTridiagonal::new(diag, off.iter().map(|z| z.norm()).collect())
}

/// All eigenvalues of a Hermitian matrix, sorted descending.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    tridiagonalize(h)?.eigenvalues()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(n: usize, seed: &[f64]) -> ComplexMatrix {
        let mut k = 0;
        let mut next = || {
            let v = seed[k % seed.len()] * (1.0 + (k as f64 * 0.7311).sin());
            k += 1;
            v
        };
        let mut h = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            h[(i, i)] = c(next(), 0.0);
            for j in 0..i {
                let z = c(next(), next());
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        h
    }

    #[test]
    fn identity_eigenvalues() {
        let ev = hermitian_eigenvalues(&ComplexMatrix::identity(3)).unwrap();
        for v in ev {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn diagonal_eigenvalues_sorted_descending() {
        let ev = hermitian_eigenvalues(&ComplexMatrix::from_diagonal(&[5.0, -2.0, 0.0])).unwrap();
        assert_eq!(ev, vec![5.0, 0.0, -2.0]);
    }

    #[test]
    fn pauli_y_eigenvalues() {
        let h = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0)]).unwrap();
        let ev = hermitian_eigenvalues(&h).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-15 && (ev[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let h = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(hermitian_eigenvalues(&h), Err(Error::InvalidInput(_))));
        let h = ComplexMatrix::new(1, 1, vec![c(1.0, 1.0)]).unwrap();
        assert!(hermitian_eigenvalues(&h).is_err());
    }

    #[test]
    fn one_by_one() {
        let h = ComplexMatrix::new(1, 1, vec![c(-3.5, 0.0)]).unwrap();
        assert_eq!(hermitian_eigenvalues(&h).unwrap(), vec![-3.5]);
    }

    #[test]
    fn bisection_matches_ql() {
        let h = random_hermitian(40, &[0.3, -1.2, 0.8, 2.1, -0.4, 1.7, -0.9]);
        let t = tridiagonalize(&h).unwrap();
        let all = t.eigenvalues().unwrap();
        let top = t.top_eigenvalues(40).unwrap();
        for (a, b) in all.iter().zip(&top) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn agrees_with_nalgebra() {
        let h = random_hermitian(25, &[1.1, -0.2, 0.5, -1.9, 0.05, 0.77]);
        let na = nalgebra::DMatrix::from_fn(25, 25, |i, j| {
            let z = h[(i, j)];
            nalgebra::Complex::new(z.re, z.im)
        });
        let mut reference: Vec<f64> = na.symmetric_eigenvalues().iter().copied().collect();
        reference.sort_by(|a, b| b.total_cmp(a));
        let ours = hermitian_eigenvalues(&h).unwrap();
        for (a, b) in ours.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-11, "{a} vs {b}");
        }
    }

    #[test]
    fn count_below_brackets() {
        let t = SymTridiagonal::new(vec![1.0, 2.0, 3.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(t.count_below(0.5), 0);
        assert_eq!(t.count_below(2.5), 2);
        assert_eq!(t.count_below(10.0), 3);
        assert!(t.top_eigenvalues(4).is_err());
    }

    proptest! {
        #[test]
        fn trace_and_unitary_invariance(
            vals in proptest::collection::vec(-3.0f64..3.0, 8),
            angle in 0.0f64..std::f64::consts::TAU,
            n in 2usize..12,
        ) {
            let h = random_hermitian(n, &vals);
            let ev = hermitian_eigenvalues(&h).unwrap();
            let norm = h.max_abs() * n as f64;
            let trace: f64 = ev.iter().sum();
            prop_assert!((trace - h.trace().re).abs() <= 1e-10 * norm.max(1.0));

            // Unitary from a product of a diagonal phase and a Givens rotation.
            let mut u = ComplexMatrix::identity(n);
            let (cs, sn) = (angle.cos(), angle.sin());
            u[(0, 0)] = c(cs, 0.0);
            u[(0, 1)] = c(-sn, 0.0) * Complex64::from_polar(1.0, 0.3);
            u[(1, 0)] = c(sn, 0.0);
            u[(1, 1)] = c(cs, 0.0) * Complex64::from_polar(1.0, 0.3);
            for i in 2..n {
                u[(i, i)] = Complex64::from_polar(1.0, angle * i as f64);
            }
            let conj = u.matmul(&h).unwrap().matmul(&u.conj_transpose()).unwrap();
            let mut sym = conj.clone();
            for i in 0..n {
                for j in 0..=i {
                    let avg = 0.5 * (conj[(i, j)] + conj[(j, i)].conj());
                    sym[(i, j)] = avg;
                    sym[(j, i)] = avg.conj();
                }
            }
            let ev2 = hermitian_eigenvalues(&sym).unwrap();
            for (a, b) in ev.iter().zip(&ev2) {
                prop_assert!((a - b).abs() <= 1e-8 * norm.max(1.0));
            }
            prop_assert!(ev.windows(2).all(|w| w[0] >= w[1]));
        }
    }
}
