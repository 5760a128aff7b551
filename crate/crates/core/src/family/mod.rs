//! Families `h ↦ T_h` on `(0,1]` built from catalog coefficients times
//! constant matrices (or vectors), and their asymptotic functionals.
//!
//! A family represents an element of `C_b((0,1], B(X))`; classes modulo
//! null families are represented by canonical representatives with
//! certified-null terms dropped.

mod coeff;
pub mod io;
mod ops;
mod tail;

use std::fmt;

use thiserror::Error;

use crate::bracket::BracketError;
use crate::linalg::io::ParseError;
use crate::linalg::{CMatrix, CVector, LinalgError, C64};

pub use coeff::CoeffFn;
pub use ops::{
    asym_qn_equivalent, asymptotically_equivalent, commute_in_limit, is_null_family, limsup_norm, module_action,
    norm_stats, quotient_norm_bounds, sup_norm, QuotientBounds,
};
pub use tail::{least_squares_slope, HGrid, LimitVerdict, TailParams, TailStats};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("invalid coefficient: {0}")]
    InvalidCoeff(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("family has sampled terms and cannot be written: {0}")]
    NotSerializable(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Bracket(#[from] BracketError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Values a family can take: matrices or vectors.
pub trait FamilyValue: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn value_dim(&self) -> usize;
    fn zero_value(dim: usize) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, c: f64) -> Self;
    fn value_norm(&self) -> f64;
    fn value_is_zero(&self) -> bool;
}

impl FamilyValue for CMatrix {
    fn value_dim(&self) -> usize {
        self.dim()
    }
    fn zero_value(dim: usize) -> Self {
        CMatrix::zeros(dim)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, c: f64) -> Self {
        self.scale_real(c)
    }
    fn value_norm(&self) -> f64 {
        self.norm()
    }
    fn value_is_zero(&self) -> bool {
        self.is_zero()
    }
}

impl FamilyValue for CVector {
    fn value_dim(&self) -> usize {
        self.dim()
    }
    fn zero_value(dim: usize) -> Self {
        CVector::zeros(dim)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }
    fn value_norm(&self) -> f64 {
        self.norm()
    }
    fn value_is_zero(&self) -> bool {
        self.is_zero()
    }
}

/// `h ↦ Σ_j c_j(h)·V_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Family<V> {
    dim: usize,
    terms: Vec<(CoeffFn, V)>,
}

pub type OperatorFamily = Family<CMatrix>;
pub type VectorFamily = Family<CVector>;

impl<V: FamilyValue> Family<V> {
    /// The zero family.
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: Vec::new() }
    }

    pub fn constant(v: V) -> Self {
        Self {
            dim: v.value_dim(),
            terms: vec![(CoeffFn::Const, v)],
        }
    }

    pub fn new(dim: usize, terms: Vec<(CoeffFn, V)>) -> Result<Self, FamilyError> {
        if let Some((_, v)) = terms.iter().find(|(_, v)| v.value_dim() != dim) {
            return Err(FamilyError::DimensionMismatch(dim, v.value_dim()));
        }
        Ok(Self { dim, terms })
    }

    /// Appends `c(h)·v`.
    pub fn with_term(mut self, c: CoeffFn, v: V) -> Result<Self, FamilyError> {
        if v.value_dim() != self.dim {
            return Err(FamilyError::DimensionMismatch(self.dim, v.value_dim()));
        }
        self.terms.push((c, v));
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(CoeffFn, V)] {
        &self.terms
    }

    pub fn eval(&self, h: f64) -> V {
        let mut out = V::zero_value(self.dim);
        for (c, v) in &self.terms {
            let w = c.eval(h);
            if w != 0.0 {
                out = out.plus(&v.times(w));
            }
        }
        out
    }

    pub fn eval_norm(&self, h: f64) -> f64 {
        self.eval(h).value_norm()
    }

    fn check_dim(&self, other: &Self) -> Result<(), FamilyError> {
        if self.dim != other.dim {
            return Err(FamilyError::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, FamilyError> {
        self.check_dim(other)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Self { dim: self.dim, terms }.canonical())
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FamilyError> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            terms: self.terms.iter().map(|(c, v)| (c.clone(), v.times(s))).collect(),
        }
    }

    /// Merges terms with equal coefficients and drops exactly-zero values.
    pub fn canonical(&self) -> Self {
        self.canonical_tol(0.0)
    }

    /// As [`Family::canonical`], also dropping terms with `‖V‖ ≤ tol`.
    pub fn canonical_tol(&self, tol: f64) -> Self {
        let mut merged: Vec<(CoeffFn, V)> = Vec::new();
        for (c, v) in &self.terms {
            match merged.iter_mut().find(|(m, _)| m == c) {
                Some((_, acc)) => *acc = acc.plus(v),
                None => merged.push((c.clone(), v.clone())),
            }
        }
        merged.retain(|(_, v)| !v.value_is_zero() && (tol == 0.0 || v.value_norm() > tol));
        Self {
            dim: self.dim,
            terms: merged,
        }
    }

    pub fn is_catalog(&self) -> bool {
        self.terms.iter().all(|(c, _)| c.is_catalog())
    }

    /// Certificate that `‖F(h)‖ → 0`: every surviving term decays. `None`
    /// when a sampled term survives canonicalization.
    pub fn null_certificate(&self, tol: f64) -> Option<bool> {
        let canon = self.canonical_tol(tol);
        let mut all = true;
        for (c, _) in &canon.terms {
            all &= c.decays()?;
        }
        Some(all)
    }

    /// Canonical representative of the class modulo null families: terms
    /// with certified-decaying coefficients are removed.
    pub fn drop_null_terms(&self) -> Self {
        let mut canon = self.canonical();
        canon.terms.retain(|(c, _)| c.decays() != Some(true));
        canon
    }

    /// `lim_{h→0} F(h)` for catalog families: the sum of constant terms.
    pub fn limit_value(&self) -> Option<V> {
        if !self.is_catalog() {
            return None;
        }
        let mut out = V::zero_value(self.dim);
        for (c, v) in &self.terms {
            if *c == CoeffFn::Const {
                out = out.plus(v);
            }
        }
        Some(out)
    }

    /// `Σ_j sup|c_j|·‖V_j‖`, for catalog families.
    pub fn sup_bound(&self) -> Option<f64> {
        self.terms
            .iter()
            .map(|(c, v)| c.sup_bound().map(|s| s * v.value_norm()))
            .sum()
    }
}

impl OperatorFamily {
    pub fn identity(dim: usize) -> Self {
        Self::constant(CMatrix::identity(dim))
    }

    /// `λI − F`.
    pub fn shifted_from(&self, lambda: C64) -> Self {
        let mut terms: Vec<(CoeffFn, CMatrix)> = self
            .terms
            .iter()
            .map(|(c, a)| (c.clone(), a.scale_real(-1.0)))
            .collect();
        terms.push((CoeffFn::Const, CMatrix::scalar(self.dim, lambda)));
        Family { dim: self.dim, terms }.canonical()
    }

    /// Termwise product `h ↦ F(h)·G(h)`.
    pub fn mul(&self, other: &Self) -> Result<Self, FamilyError> {
        self.check_dim(other)?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (c1, a) in &self.terms {
            for (c2, b) in &other.terms {
                terms.push((c1.product(c2), a * b));
            }
        }
        Ok(Family { dim: self.dim, terms }.canonical())
    }

    /// `h ↦ F(h)G(h) − G(h)F(h)`.
    pub fn commutator(&self, other: &Self) -> Result<Self, FamilyError> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Termwise action `h ↦ F(h)·V(h)`.
    pub fn apply(&self, v: &VectorFamily) -> Result<VectorFamily, FamilyError> {
        if self.dim != v.dim {
            return Err(FamilyError::DimensionMismatch(self.dim, v.dim));
        }
        let mut terms = Vec::with_capacity(self.terms.len() * v.terms.len());
        for (c1, a) in &self.terms {
            for (c2, x) in &v.terms {
                terms.push((c1.product(c2), a.mul_vec(x)));
            }
        }
        Ok(Family { dim: self.dim, terms }.canonical())
    }
}

/// Anything sampled as a matrix-valued function of `h`.
pub trait MatrixFamily: Sync {
    fn family_dim(&self) -> usize;
    fn at(&self, h: f64) -> CMatrix;
}

impl MatrixFamily for OperatorFamily {
    fn family_dim(&self) -> usize {
        self.dim
    }
    fn at(&self, h: f64) -> CMatrix {
        self.eval(h)
    }
}

/// Matrix family given by a closure, with no catalog certificate.
pub struct FnFamily<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(f64) -> CMatrix + Sync> FnFamily<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(f64) -> CMatrix + Sync> MatrixFamily for FnFamily<F> {
    fn family_dim(&self) -> usize {
        self.dim
    }
    fn at(&self, h: f64) -> CMatrix {
        (self.f)(h)
    }
}
