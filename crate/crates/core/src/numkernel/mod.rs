//! Dense complex linear algebra and special functions used by every other
//! module.
//!
//! Deliberately small: dense Hermitian eigendecomposition (cyclic Jacobi),
//! PSD projection, circularly-symmetric Gaussian sampling, and the
//! exponential integral E1. Matrices here are a few hundred rows at most.

mod eig;
mod sampling;
mod special;

pub use eig::{hermitian_eig, max_eigpair, psd_project, EigPair};
pub use sampling::{sample_cn, substream};
pub use special::{exp_e1_scaled, exp_integral_e1, EULER_GAMMA, LOG2_E};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for the Hermitian tag check: `max |A_ij - conj(A_ji)|`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dense complex vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexVector {
    pub entries: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Self { entries }
    }

    pub fn zeros(n: usize) -> Self {
        Self { entries: vec![Complex64::new(0.0, 0.0); n] }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> Complex64) -> Self {
        Self { entries: (0..n).map(f).collect() }
    }

    /// Standard basis vector `e_k`.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = Self::zeros(n);
        v.entries[k] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Squared Euclidean norm.
    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Inner product `self^H other` (conjugate-linear in `self`).
    pub fn inner(&self, other: &ComplexVector) -> Complex64 {
        debug_assert_eq!(self.len(), other.len());
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scale(&self, s: Complex64) -> ComplexVector {
        ComplexVector::new(self.entries.iter().map(|z| z * s).collect())
    }

    pub fn scale_real(&self, s: f64) -> ComplexVector {
        ComplexVector::new(self.entries.iter().map(|z| z * s).collect())
    }

    pub fn add(&self, other: &ComplexVector) -> ComplexVector {
        debug_assert_eq!(self.len(), other.len());
        ComplexVector::new(
            self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        )
    }

    pub fn sub(&self, other: &ComplexVector) -> ComplexVector {
        debug_assert_eq!(self.len(), other.len());
        ComplexVector::new(
            self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        )
    }

    /// Unit-norm copy.
    pub fn normalized(&self) -> Result<ComplexVector> {
        let n = self.norm();
        if n <= 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(self.scale_real(1.0 / n))
    }

    /// Outer product `self other^H`.
    pub fn outer(&self, other: &ComplexVector) -> ComplexMatrix {
        let rows = self.len();
        let cols = other.len();
        ComplexMatrix::from_fn(rows, cols, |i, j| self.entries[i] * other.entries[j].conj())
    }

    pub fn all_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    pub fn diag(d: &ComplexVector) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = d.entries[i];
        }
        m
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Matrix-vector product `A x`.
    pub fn matvec(&self, x: &ComplexVector) -> ComplexVector {
        debug_assert_eq!(self.cols, x.len());
        let mut out = ComplexVector::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            let row = &self.entries[i * self.cols..(i + 1) * self.cols];
            for (a, b) in row.iter().zip(&x.entries) {
                acc += a * b;
            }
            out.entries[i] = acc;
        }
        out
    }

    /// Matrix product `A B`.
    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, entries }
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, entries }
    }

    pub fn scale_real(&self, s: f64) -> ComplexMatrix {
        let entries = self.entries.iter().map(|z| z * s).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, entries }
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |A_ij - conj(A_ji)|` over all entries.
    pub fn hermitian_deviation(&self) -> f64 {
        debug_assert!(self.is_square());
        let mut dev = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermitian_deviation() <= tol
    }

    /// Check the Hermitian tag the way eigendecomposition expects it.
    pub fn require_hermitian(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch { expected: self.rows, got: self.cols });
        }
        let dev = self.hermitian_deviation();
        // Tag tolerance is relative for large-magnitude matrices, with the
        // spec's absolute floor for O(1) data.
        let tol = HERMITIAN_TOL * self.max_abs().max(1.0);
        if dev > tol {
            return Err(Error::NonHermitianInput { max_asymmetry: dev });
        }
        Ok(())
    }

    /// Force exact Hermitian symmetry: `(A + A^H) / 2`.
    pub fn hermitize(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    /// `x^H A x`; real part only (exact for Hermitian `A`).
    pub fn quadratic_form(&self, x: &ComplexVector) -> f64 {
        x.inner(&self.matvec(x)).re
    }

    /// Real part of `tr(A B)`.
    pub fn trace_product_re(&self, other: &ComplexMatrix) -> f64 {
        debug_assert!(self.cols == other.rows && self.rows == other.cols);
        let mut acc = 0.0;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += (self[(i, k)] * other[(k, i)]).re;
            }
        }
        acc
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector::from_fn(self.rows, |i| self[(i, j)])
    }

    pub fn all_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.cols + j]
    }
}
