//! Dense complex linear algebra on `ℂ^d` with the Euclidean norm.
//!
//! Everything here is self-contained: LU with partial pivoting, one-sided
//! Jacobi SVD, Hessenberg + shifted QR eigenvalues and Riesz projections by
//! trapezoid quadrature of the resolvent.

mod decomp;
mod eig;
pub mod io;
mod lu;
mod svd;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

pub use num_complex::Complex64 as C64;
use thiserror::Error;

pub use decomp::{spectral_decomp, Cluster, SpectralDecomp, M_QUAD, TOL_PROJ};
pub use eig::{eigenvalues, hessenberg, multiset_distance};
pub use lu::{solve, Lu, EPS_PIVOT, TOL_SOLVE};
pub use svd::{op_norm, sigma_min, singular_values, svd, Svd};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension must be at least 1")]
    EmptyDimension,
    #[error("expected {expected} entries, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is numerically singular (pivot magnitude {pivot:e})")]
    Singular { pivot: f64 },
    #[error("QR iteration did not converge after {iterations} iterations; last iterate:\n{dump}")]
    NoConvergence { iterations: usize, dump: String },
    #[error("eigenvalue clusters are not separable at cluster_tol={cluster_tol:e} (gap {gap:e})")]
    DegenerateSpectrum { cluster_tol: f64, gap: f64 },
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(LinalgError::EmptyDimension);
        }
        if data.len() != dim * dim {
            return Err(LinalgError::Shape {
                expected: dim * dim,
                got: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|z| !z.is_finite()) {
            return Err(LinalgError::NonFinite {
                row: k / dim,
                col: k % dim,
            });
        }
        Ok(Self { dim, data })
    }

    pub(crate) fn from_vec_unchecked(dim: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be at least 1");
        Self::from_vec_unchecked(dim, vec![C64::new(0.0, 0.0); dim * dim])
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, C64::new(1.0, 0.0))
    }

    pub fn scalar(dim: usize, c: C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = c;
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diag(&d)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self::from_vec_unchecked(dim, data)
    }

    /// Convenience constructor for real matrices given as rows.
    ///
    /// Panics on ragged input; intended for literals.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "rows must be square");
        Self::from_fn(dim, |i, j| C64::new(rows[i][j], 0.0))
    }

    /// Nilpotent upper shift: ones on the superdiagonal.
    pub fn shift(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| {
            if j == i + 1 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Jordan block `λI + N` with `N` the upper shift.
    pub fn jordan(lambda: C64, dim: usize) -> Self {
        &Self::scalar(dim, lambda) + &Self::shift(dim)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.is_finite())
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        match self.data.iter().position(|z| !z.is_finite()) {
            Some(k) => Err(LinalgError::NonFinite {
                row: k / self.dim,
                col: k % self.dim,
            }),
            None => Ok(()),
        }
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> CVector {
        CVector::from_vec_unchecked((0..self.dim).map(|i| self[(i, j)]).collect())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_vec_unchecked(self.dim, self.data.iter().map(|&z| z * c).collect())
    }

    pub fn scale_real(&self, c: f64) -> Self {
        Self::from_vec_unchecked(self.dim, self.data.iter().map(|&z| z * c).collect())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    /// `λI − A`.
    pub fn shifted_from(&self, lambda: C64) -> Self {
        let mut m = self.scale_real(-1.0);
        for i in 0..self.dim {
            m[(i, i)] += lambda;
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Spectral norm (largest singular value).
    pub fn norm(&self) -> f64 {
        singular_values(self).first().copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn mul_vec(&self, x: &CVector) -> CVector {
        assert_eq!(self.dim, x.dim(), "dimension mismatch in mul_vec");
        let out = (0..self.dim)
            .map(|i| self.row(i).iter().zip(x.as_slice()).map(|(a, b)| a * b).sum())
            .collect();
        CVector::from_vec_unchecked(out)
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::identity(self.dim);
        for _ in 0..n {
            out = &out * self;
        }
        out
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in add");
        CMatrix::from_vec_unchecked(self.dim, self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sub");
        CMatrix::from_vec_unchecked(self.dim, self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        CMatrix::from_vec_unchecked(self.dim, self.data.iter().map(|z| -z).collect())
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in mul");
        let n = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        CMatrix::from_vec_unchecked(n, out)
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({})[", self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>12.5e}{:+.5e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Vector in `ℂ^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct CVector {
    data: Vec<C64>,
}

impl CVector {
    pub fn new(data: Vec<C64>) -> Result<Self> {
        if data.is_empty() {
            return Err(LinalgError::EmptyDimension);
        }
        if let Some(k) = data.iter().position(|z| !z.is_finite()) {
            return Err(LinalgError::NonFinite { row: k, col: 0 });
        }
        Ok(Self { data })
    }

    pub(crate) fn from_vec_unchecked(data: Vec<C64>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_vec_unchecked(vec![C64::new(0.0, 0.0); dim])
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[k] = C64::new(1.0, 0.0);
        v
    }

    pub fn from_real(xs: &[f64]) -> Self {
        Self::from_vec_unchecked(xs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_vec_unchecked(self.data.iter().map(|&z| z * c).collect())
    }

    pub fn dot(&self, other: &Self) -> C64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }
}

impl Index<usize> for CVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for CVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.data[i]
    }
}

impl Add for &CVector {
    type Output = CVector;
    fn add(self, rhs: &CVector) -> CVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in add");
        CVector::from_vec_unchecked(self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &CVector {
    type Output = CVector;
    fn sub(self, rhs: &CVector) -> CVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in sub");
        CVector::from_vec_unchecked(self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect())
    }
}

#[cfg(test)]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_entries() {
        let err = CMatrix::new(2, vec![c(1.0, 0.0), c(f64::NAN, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap_err();
        assert_eq!(err, LinalgError::NonFinite { row: 0, col: 1 });
        assert_eq!(CMatrix::new(0, vec![]).unwrap_err(), LinalgError::EmptyDimension);
    }

    #[test]
    fn commutator_of_diagonal_and_shift() {
        let j = CMatrix::shift(2);
        let d = CMatrix::from_real_diag(&[1.0, 2.0]);
        let comm = j.commutator(&d);
        assert_eq!(comm, CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]));
    }

    #[test]
    fn shifted_from_builds_resolvent_operand() {
        let a = CMatrix::from_real_diag(&[1.0, 2.0]);
        let m = a.shifted_from(c(3.0, 0.0));
        assert_eq!(m, CMatrix::from_real_diag(&[2.0, 1.0]));
    }
}
