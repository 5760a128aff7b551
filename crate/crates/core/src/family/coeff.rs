//! Scalar coefficient functions `c: (0,1] → ℝ` of family terms.

use std::fmt;
use std::sync::Arc;

use super::FamilyError;

type SampledFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Catalog coefficients carry a decay certificate; `Sampled` closures do not.
#[derive(Clone)]
pub enum CoeffFn {
    /// `h ↦ 1`.
    Const,
    /// `h ↦ h^p`, `p > 0`.
    PowH(f64),
    /// `h ↦ exp(−a/h)`, `a > 0`.
    ExpInv(f64),
    /// `h ↦ h^p·exp(−a/h)`, `p ≥ 0`, `a > 0`; the product closure of the two
    /// decaying kinds.
    PowExpInv { p: f64, a: f64 },
    /// Arbitrary user closure, no certificate.
    Sampled { label: String, f: SampledFn },
}

impl CoeffFn {
    /// `h^p`; `p = 0` normalizes to `Const`.
    pub fn pow(p: f64) -> Result<Self, FamilyError> {
        if !(p.is_finite() && p >= 0.0) {
            return Err(FamilyError::InvalidCoeff(format!(
                "pow exponent {p} must be finite and >= 0"
            )));
        }
        Ok(if p == 0.0 { CoeffFn::Const } else { CoeffFn::PowH(p) })
    }

    pub fn exp_inv(a: f64) -> Result<Self, FamilyError> {
        Self::pow_exp(0.0, a)
    }

    /// `h^p·exp(−a/h)`, normalized to the simplest catalog kind.
    pub fn pow_exp(p: f64, a: f64) -> Result<Self, FamilyError> {
        if !(a.is_finite() && a >= 0.0) {
            return Err(FamilyError::InvalidCoeff(format!(
                "expinv rate {a} must be finite and > 0"
            )));
        }
        if a == 0.0 {
            return Self::pow(p);
        }
        Self::pow(p)?;
        Ok(if p == 0.0 {
            CoeffFn::ExpInv(a)
        } else {
            CoeffFn::PowExpInv { p, a }
        })
    }

    pub fn sampled(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        CoeffFn::Sampled {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, h: f64) -> f64 {
        match self {
            CoeffFn::Const => 1.0,
            CoeffFn::PowH(p) => h.powf(*p),
            CoeffFn::ExpInv(a) => (-a / h).exp(),
            CoeffFn::PowExpInv { p, a } => h.powf(*p) * (-a / h).exp(),
            CoeffFn::Sampled { f, .. } => f(h),
        }
    }

    /// `(p, a)` with `c(h) = h^p·exp(−a/h)`, for catalog kinds.
    fn exponents(&self) -> Option<(f64, f64)> {
        match self {
            CoeffFn::Const => Some((0.0, 0.0)),
            CoeffFn::PowH(p) => Some((*p, 0.0)),
            CoeffFn::ExpInv(a) => Some((0.0, *a)),
            CoeffFn::PowExpInv { p, a } => Some((*p, *a)),
            CoeffFn::Sampled { .. } => None,
        }
    }

    pub fn is_catalog(&self) -> bool {
        self.exponents().is_some()
    }

    /// Certified `c(h) → 0`; `None` for sampled closures.
    pub fn decays(&self) -> Option<bool> {
        self.exponents().map(|(p, a)| p > 0.0 || a > 0.0)
    }

    /// `sup_{h∈(0,1]} |c(h)|` for catalog kinds (always 1 or less).
    pub fn sup_bound(&self) -> Option<f64> {
        self.exponents().map(|(_, a)| (-a).exp())
    }

    /// Pointwise product; catalog kinds stay in the catalog.
    pub fn product(&self, other: &Self) -> Self {
        match (self.exponents(), other.exponents()) {
            (Some((p1, a1)), Some((p2, a2))) => {
                Self::pow_exp(p1 + p2, a1 + a2).expect("sums of valid exponents are valid")
            }
            _ => {
                let (f, g) = (self.clone(), other.clone());
                let label = format!("({self})*({other})");
                Self::sampled(label, move |h| f.eval(h) * g.eval(h))
            }
        }
    }
}

impl PartialEq for CoeffFn {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (CoeffFn::Sampled { f, .. }, CoeffFn::Sampled { f: g, .. }) => Arc::ptr_eq(f, g),
            (CoeffFn::Sampled { .. }, _) | (_, CoeffFn::Sampled { .. }) => false,
            _ => self.exponents() == other.exponents(),
        }
    }
}

impl fmt::Display for CoeffFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffFn::Const => write!(f, "const"),
            CoeffFn::PowH(p) => write!(f, "pow {p}"),
            CoeffFn::ExpInv(a) => write!(f, "expinv {a}"),
            CoeffFn::PowExpInv { p, a } => write!(f, "powexp {p} {a}"),
            CoeffFn::Sampled { label, .. } => write!(f, "sampled {label}"),
        }
    }
}

impl fmt::Debug for CoeffFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
