use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    /// Real diagonal matrix.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&mut self, factor: f64) {
        for z in &mut self.entries {
            *z *= factor;
        }
    }

    /// Largest deviation from conjugate symmetry, `max |H[i,j] - conj(H[j,i])|`.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..=i {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Hermitian within `1e-12 * max|H|`.
    pub fn is_hermitian(&self) -> bool {
        self.is_square() && self.hermitian_defect() <= 1e-12 * self.max_abs()
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::InvalidInput(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let orow = other.row(k);
                let start = i * other.cols;
                for (dst, &b) in out.entries[start..start + other.cols].iter_mut().zip(orow) {
                    *dst += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `A A^* / divisor`, Hermitian `rows x rows`.
    pub fn outer_gram(&self, divisor: f64) -> Self {
        let (r, c) = (self.rows, self.cols);
        let mut out = Self::zeros(r, r);
        for i in 0..r {
            let ri = self.row(i);
            for j in 0..=i {
                let rj = self.row(j);
                let mut acc = Complex64::new(0.0, 0.0);
                for t in 0..c {
                    acc += ri[t] * rj[t].conj();
                }
                acc /= divisor;
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
        }
        out
    }

    /// `A^* A / divisor`, Hermitian `cols x cols`.
    pub fn inner_gram(&self, divisor: f64) -> Self {
        let (r, c) = (self.rows, self.cols);
        let mut out = Self::zeros(c, c);
        for k in 0..r {
            let row = self.row(k);
            for i in 0..c {
                let a = row[i].conj();
                for (o, x) in out.entries[i * c..=i * c + i].iter_mut().zip(&row[..=i]) {
                    *o += a * x;
                }
            }
        }
        for i in 0..c {
            for j in 0..=i {
                let v = out.entries[i * c + j] / divisor;
                out.entries[i * c + j] = v;
                out.entries[j * c + i] = v.conj();
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.cols + j]
    }
}

/// Determinant by LU factorisation with partial pivoting.
pub fn complex_determinant(m: &ComplexMatrix) -> Result<Complex64> {
    if !m.is_square() {
        return Err(Error::InvalidInput(format!(
            "determinant of a non-square {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let n = m.rows;
    let mut a = m.entries.clone();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let (piv, pmag) =
            (k..n)
                .map(|i| (i, a[i * n + k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmag == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if piv != k {
            for j in 0..n {
                a.swap(k * n + j, piv * n + j);
            }
            det = -det;
        }
        let pivot = a[k * n + k];
        det *= pivot;
        for i in k + 1..n {
            let factor = a[i * n + k] / pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in k + 1..n {
                let u = a[k * n + j];
                a[i * n + j] -= factor * u;
            }
        }
    }
    Ok(det)
}

/// Determinant of a real `n x n` row-major matrix, consuming the buffer.
pub fn real_determinant(mut a: Vec<f64>, n: usize) -> Result<f64> {
    if a.len() != n * n {
        return Err(Error::InvalidInput(format!(
            "expected {} entries for a {n}x{n} matrix, got {}",
            n * n,
            a.len()
        )));
    }
    let mut det = 1.0;
    for k in 0..n {
        let (piv, pmag) =
            (k..n)
                .map(|i| (i, a[i * n + k].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmag == 0.0 {
            return Ok(0.0);
        }
        if piv != k {
            for j in 0..n {
                a.swap(k * n + j, piv * n + j);
            }
            det = -det;
        }
        let pivot = a[k * n + k];
        det *= pivot;
        for i in k + 1..n {
            let factor = a[i * n + k] / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in k + 1..n {
                a[i * n + j] -= factor * a[k * n + j];
            }
        }
    }
    Ok(det)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn determinant_of_identity_is_one() {
        for n in 1..6 {
            let d = complex_determinant(&ComplexMatrix::identity(n)).unwrap();
            assert_eq!(d, c(1.0, 0.0));
        }
    }

    #[test]
    fn determinant_of_diagonal() {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 0)] = c(2.0, 0.0);
        m[(1, 1)] = c(0.0, 3.0);
        let d = complex_determinant(&m).unwrap();
        assert!((d - c(0.0, 6.0)).norm() < 1e-15);
    }

    #[test]
    fn determinant_two_by_two() {
        let m = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]).unwrap();
        let d = complex_determinant(&m).unwrap();
        assert!((d - c(-2.0, 0.0)).norm() < 1e-14);
        let r = real_determinant(vec![1.0, 2.0, 3.0, 4.0], 2).unwrap();
        assert!((r + 2.0).abs() < 1e-14);
    }

    #[test]
    fn determinant_rejects_non_square() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(complex_determinant(&m), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn constructor_checks_shape() {
        assert!(ComplexMatrix::new(0, 2, vec![]).is_err());
        assert!(ComplexMatrix::new(2, 2, vec![c(0.0, 0.0); 3]).is_err());
    }

    #[test]
    fn gram_products_agree_with_matmul() {
        let x = ComplexMatrix::from_fn(3, 2, |i, j| c(i as f64 + 0.5, j as f64 - 1.0));
        let outer = x.outer_gram(2.0);
        let mut reference = x.matmul(&x.conj_transpose()).unwrap();
        reference.scale(0.5);
        assert!(outer
            .entries()
            .iter()
            .zip(reference.entries())
            .all(|(a, b)| (a - b).norm() < 1e-14));
        let inner = x.inner_gram(1.0);
        let reference = x.conj_transpose().matmul(&x).unwrap();
        assert!(inner
            .entries()
            .iter()
            .zip(reference.entries())
            .all(|(a, b)| (a - b).norm() < 1e-14));
        assert!(inner.is_hermitian());
    }
}
