use std::ops::Range;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Square complex matrix with `k` sub- and super-diagonals.
///
/// Storage is row-major over the band: entry `(i, j)` lives at
/// `data[i * (2k + 1) + (j + k - i)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    k: usize,
    data: Vec<Complex64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, k: usize) -> Self {
        let k = k.min(n.saturating_sub(1));
        Self { n, k, data: vec![ZERO; n * (2 * k + 1)] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![Complex64::new(1.0, 0.0); n])
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len(), 0);
        m.data.copy_from_slice(values);
        m
    }

    pub fn real_diagonal(values: impl IntoIterator<Item = f64>) -> Self {
        let v: Vec<Complex64> = values.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
        Self::diagonal(&v)
    }

    /// Banded Toeplitz matrix from a centred stencil of odd length, truncated at the edges.
    pub fn stencil(n: usize, coeffs: &[f64]) -> Self {
        let k = coeffs.len() / 2;
        let mut m = Self::zeros(n, k);
        for i in 0..n {
            for (c, &v) in coeffs.iter().enumerate() {
                let j = i as isize + c as isize - k as isize;
                if j >= 0 && (j as usize) < n {
                    m.set(i, j as usize, Complex64::new(v, 0.0));
                }
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.k
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let off = j as isize - i as isize;
        (off.unsigned_abs() <= self.k && i < self.n && j < self.n)
            .then(|| i * (2 * self.k + 1) + (off + self.k as isize) as usize)
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.slot(i, j).map_or(ZERO, |s| self.data[s])
    }

    /// Panics when `(i, j)` is outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        let s = self.slot(i, j).expect("entry outside band");
        self.data[s] = v;
    }

    /// Column range of the band in row `i`.
    pub fn row_span(&self, i: usize) -> Range<usize> {
        i.saturating_sub(self.k)..(i + self.k + 1).min(self.n)
    }

    fn widened(&self, k: usize) -> Self {
        if k <= self.k {
            return self.clone();
        }
        let mut out = Self::zeros(self.n, k);
        for i in 0..self.n {
            for j in self.row_span(i) {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self { n: self.n, k: self.k, data: self.data.iter().map(|v| v * c).collect() }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &Self, c: Complex64) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut out = self.widened(other.k);
        for i in 0..other.n {
            for j in other.row_span(i) {
                let s = out.slot(i, j).expect("band");
                out.data[s] += c * other.get(i, j);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_scaled(other, Complex64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(other, Complex64::new(-1.0, 0.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut out = Self::zeros(self.n, self.k + other.k);
        for i in 0..self.n {
            for l in self.row_span(i) {
                let a = self.get(i, l);
                if a == ZERO {
                    continue;
                }
                for j in other.row_span(l) {
                    let s = out.slot(i, j).expect("band");
                    out.data[s] += a * other.get(l, j);
                }
            }
        }
        out
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.n, self.k);
        for i in 0..self.n {
            for j in self.row_span(i) {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        self.add(&self.adjoint()).scaled(Complex64::new(0.5, 0.0))
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in self.row_span(i) {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs_rows(0..self.n)
    }

    pub fn max_abs_rows(&self, rows: Range<usize>) -> f64 {
        rows.flat_map(|i| self.row_span(i).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j).norm())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n, "dimension mismatch");
        (0..self.n).map(|i| self.row_span(i).map(|j| self.get(i, j) * v[j]).sum()).collect()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Solves `M x = rhs` by banded Gaussian elimination without pivoting.
    ///
    /// Suitable for diagonally dominant or `1 + iH`-type matrices; a pivot
    /// of negligible size raises `SolveFailure`.
    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        assert_eq!(rhs.len(), self.n, "dimension mismatch");
        let (n, k) = (self.n, self.k);
        let mut a = self.clone();
        let mut x = rhs.to_vec();
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for p in 0..n {
            let piv = a.get(p, p);
            if !(piv.norm() > 1e-14 * scale) || !piv.is_finite() {
                return Err(Error::SolveFailure { row: p });
            }
            for r in p + 1..(p + k + 1).min(n) {
                let l = a.get(r, p) / piv;
                if l == ZERO {
                    continue;
                }
                for c in p..(p + k + 1).min(n) {
                    let v = a.get(r, c) - l * a.get(p, c);
                    a.set(r, c, v);
                }
                let xp = x[p];
                x[r] -= l * xp;
            }
        }
        for p in (0..n).rev() {
            let mut s = x[p];
            for c in p + 1..(p + k + 1).min(n) {
                s -= a.get(p, c) * x[c];
            }
            x[p] = s / a.get(p, p);
        }
        Ok(x)
    }
}
