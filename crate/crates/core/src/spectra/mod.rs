//! Resolvent set and spectrum of a family: `λ` is a resolvent point when
//! `σ_min(λI − F(h))` stays bounded below along the tail (the exact inverses
//! then form a bounded approximate resolvent), and a spectrum point when it
//! tends to zero (no bounded approximate inverse can exist).

mod grid;

use std::fmt;

use thiserror::Error;

use crate::family::{
    asymptotically_equivalent, FamilyError, HGrid, LimitVerdict, MatrixFamily, OperatorFamily, TailParams, TailStats,
};
use crate::linalg::{eigenvalues, singular_values, CMatrix, LinalgError, Lu, C64, TOL_SOLVE};

pub(crate) use grid::{cell_center, cell_index, scan};
pub use grid::{family_spectrum_grid, spectrum_grid_with, GridCell, Rect, RegionGrid};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid rectangle: {0}")]
    InvalidRect(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PointClass {
    Resolvent,
    Spectrum,
    Undetermined,
}

impl PointClass {
    pub fn code(self) -> char {
        match self {
            PointClass::Resolvent => 'R',
            PointClass::Spectrum => 'S',
            PointClass::Undetermined => 'U',
        }
    }
}

impl fmt::Display for PointClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectraParams {
    /// Resolvent threshold on `min σ_min`, relative to the family scale.
    pub delta_res: f64,
    /// Tail thresholds, relative to the family scale.
    pub tail: TailParams,
}

impl Default for SpectraParams {
    fn default() -> Self {
        Self {
            delta_res: 1e-6,
            tail: TailParams::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ResolventProbe {
    pub lambda: C64,
    pub tail_sigma: Vec<f64>,
    /// `‖(λI − F(h))^{-1}‖ = 1/σ_min`; `+∞` where singular.
    pub tail_resnorm: Vec<f64>,
    /// Largest `‖(λI − F(h))R_h − I‖_F` over the tail (0 unless Resolvent).
    pub max_residual: f64,
    pub sigma_stats: TailStats,
    pub classification: PointClass,
}

impl ResolventProbe {
    pub fn min_tail_sigma(&self) -> f64 {
        self.tail_sigma.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Tail samples of a family evaluated once, shared by many probes.
#[derive(Clone, Debug)]
pub struct ProbeContext {
    pub hs: Vec<f64>,
    pub mats: Vec<CMatrix>,
    /// `max(1, lim sup ‖F(h)‖)`.
    pub scale: f64,
    /// Tail maximum of `‖F(h)‖`.
    pub norm_max: f64,
    /// Points probed in addition to cell centres: eigenvalues of the limit
    /// operator for catalog families, of the last sample otherwise.
    pub candidates: Vec<C64>,
    pub params: SpectraParams,
}

impl ProbeContext {
    pub fn new(f: &OperatorFamily, g: &HGrid, params: &SpectraParams) -> Result<Self, SpectraError> {
        let mut ctx = Self::from_matrix_family(f, g, params)?;
        if let Some(f0) = f.limit_value() {
            ctx.candidates = eigenvalues(&f0)?;
        }
        Ok(ctx)
    }

    pub fn from_matrix_family(f: &dyn MatrixFamily, g: &HGrid, params: &SpectraParams) -> Result<Self, SpectraError> {
        let hs = g.tail_samples();
        let mats: Vec<CMatrix> = hs.iter().map(|&h| f.at(h)).collect();
        if let Some(bad) = mats.iter().find(|m| !m.is_finite()) {
            bad.check_finite()?;
        }
        let norm_max = mats.iter().map(|m| m.norm()).fold(0.0, f64::max);
        let candidates = eigenvalues(mats.last().expect("tail has at least 3 samples"))?;
        Ok(Self {
            hs,
            mats,
            scale: norm_max.max(1.0),
            norm_max,
            candidates,
            params: *params,
        })
    }

    pub fn dim(&self) -> usize {
        self.mats[0].dim()
    }

    pub fn tail_params(&self) -> TailParams {
        self.params.tail.scaled(self.scale)
    }

    /// `σ_min(λI − F(h))` on the tail.
    pub fn tail_sigmas(&self, lambda: C64) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::with_capacity(self.mats.len());
        for (k, m) in self.mats.iter().enumerate() {
            let s = match out.last() {
                Some(&prev) if self.mats[k - 1] == *m => prev,
                _ => *singular_values(&m.shifted_from(lambda)).last().expect("dim >= 1"),
            };
            out.push(s);
        }
        out
    }

    pub fn probe(&self, lambda: C64) -> ResolventProbe {
        let sigmas = self.tail_sigmas(lambda);
        let stats = TailStats::analyze(&self.hs, sigmas.clone(), self.hs.len(), &self.tail_params());
        let resnorm: Vec<f64> = sigmas
            .iter()
            .map(|&s| if s > 0.0 { 1.0 / s } else { f64::INFINITY })
            .collect();
        let min_sigma = sigmas.iter().copied().fold(f64::INFINITY, f64::min);
        let mut max_residual = 0.0;
        let classification = if min_sigma >= self.params.delta_res * self.scale {
            match self.checked_inverses(lambda) {
                Some((_, res)) => {
                    max_residual = res;
                    PointClass::Resolvent
                }
                None => PointClass::Undetermined,
            }
        } else if stats.limit_verdict == LimitVerdict::ToZero {
            PointClass::Spectrum
        } else {
            PointClass::Undetermined
        };
        ResolventProbe {
            lambda,
            tail_sigma: sigmas,
            tail_resnorm: resnorm,
            max_residual,
            sigma_stats: stats,
            classification,
        }
    }

    /// Exact inverses `(λI − F(h))^{-1}` on the tail with the largest
    /// residual `‖(λI − F(h))R − I‖_F`, or `None` if a factorization fails or
    /// a residual exceeds `TOL_SOLVE·‖A‖_F‖R‖_F`.
    pub fn checked_inverses(&self, lambda: C64) -> Option<(Vec<CMatrix>, f64)> {
        let id = CMatrix::identity(self.dim());
        let mut out = Vec::with_capacity(self.mats.len());
        let mut worst: f64 = 0.0;
        for m in &self.mats {
            let a = m.shifted_from(lambda);
            let r = Lu::factor(&a).ok()?.inverse();
            let res = (&(&a * &r) - &id).frobenius_norm();
            if res > TOL_SOLVE * a.frobenius_norm() * r.frobenius_norm() {
                return None;
            }
            worst = worst.max(res);
            out.push(r);
        }
        Some((out, worst))
    }
}

pub fn probe_resolvent(f: &OperatorFamily, lambda: C64, g: &HGrid) -> Result<ResolventProbe, SpectraError> {
    Ok(ProbeContext::new(f, g, &SpectraParams::default())?.probe(lambda))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadiusBound {
    /// `max_{n_max/2 ≤ n ≤ n_max} (inner_n)^{1/n}`, `+∞` on overflow.
    pub value: f64,
    /// `(inner_n)^{1/n}` for `n = 1..=n_max`.
    pub roots: Vec<f64>,
    /// Tail verdict of `‖F(h)^n‖` for each `n`.
    pub inner: Vec<LimitVerdict>,
}

/// Root estimate of the spectral radius with the tail maximum of `‖F(h)^n‖`
/// standing in for the inner limit.
pub fn spectral_radius_bound(f: &dyn MatrixFamily, g: &HGrid, n_max: usize) -> Result<RadiusBound, SpectraError> {
    if n_max < 8 {
        return Err(SpectraError::Precondition(format!("n_max must be >= 8, got {n_max}")));
    }
    let hs = g.tail_samples();
    let base: Vec<CMatrix> = hs.iter().map(|&h| f.at(h)).collect();
    let scale = base.iter().map(|m| m.norm()).fold(1.0, f64::max);
    let p = TailParams::default();
    let mut powers = base.clone();
    let mut roots = Vec::with_capacity(n_max);
    let mut inner = Vec::with_capacity(n_max);
    let mut overflow = false;
    for n in 1..=n_max {
        if n > 1 {
            for (pw, b) in powers.iter_mut().zip(&base) {
                *pw = &*pw * b;
            }
        }
        let values: Vec<f64> = powers
            .iter()
            .map(|m| if m.is_finite() { m.norm() } else { f64::INFINITY })
            .collect();
        if values.iter().any(|v| !v.is_finite() || *v > 1e300) {
            overflow = true;
        }
        let stats = TailStats::analyze(&hs, values, hs.len(), &p.scaled(scale.powi(n as i32).min(1e300)));
        inner.push(stats.limit_verdict);
        roots.push(stats.tail_max.powf(1.0 / n as f64));
    }
    let value = if overflow {
        f64::INFINITY
    } else {
        roots[n_max / 2 - 1..].iter().copied().fold(0.0, f64::max)
    };
    Ok(RadiusBound { value, roots, inner })
}

fn require_resolvent(ctx: &ProbeContext, lambda: C64) -> Result<Vec<CMatrix>, SpectraError> {
    let probe = ctx.probe(lambda);
    if probe.classification != PointClass::Resolvent {
        return Err(SpectraError::Precondition(format!(
            "{lambda} is classified {}, not a resolvent point",
            probe.classification
        )));
    }
    Ok(ctx
        .checked_inverses(lambda)
        .expect("resolvent probe verified the inverses")
        .0)
}

/// Tail test on `‖R(λ,h) − R(μ,h) − (μ−λ)R(λ,h)R(μ,h)‖` for the exact
/// inverses. The zero floor is rounding level for the operands involved.
pub fn resolvent_identity_residual(
    f: &OperatorFamily,
    lambda: C64,
    mu: C64,
    g: &HGrid,
) -> Result<TailStats, SpectraError> {
    let ctx = ProbeContext::new(f, g, &SpectraParams::default())?;
    let rl = require_resolvent(&ctx, lambda)?;
    let rm = require_resolvent(&ctx, mu)?;
    let mut values = Vec::with_capacity(rl.len());
    let mut floor: f64 = 0.0;
    for (a, b) in rl.iter().zip(&rm) {
        let prod = (a * b).scale(mu - lambda);
        values.push((&(a - b) - &prod).norm());
        let (na, nb) = (a.norm(), b.norm());
        floor = floor.max(1e-12 * (na + nb + (mu - lambda).norm() * na * nb));
    }
    let p = ctx.tail_params().with_floor(floor.max(ctx.tail_params().zero_floor));
    Ok(TailStats::analyze(&ctx.hs, values, ctx.hs.len(), &p))
}

#[derive(Clone, Debug)]
pub struct UniquenessReport {
    pub stats: TailStats,
    /// Both families are two-sided approximate inverses with bounded tails.
    pub precondition_ok: bool,
    pub diagnostics: String,
}

/// Two-sided approximate-inverse test of `R` at `λ`: residual tails tend to
/// zero and `‖R(h)‖` does not grow.
fn approximate_inverse_ok(f: &OperatorFamily, lambda: C64, r: &dyn MatrixFamily, g: &HGrid) -> (bool, String) {
    let id = CMatrix::identity(f.dim());
    let p = TailParams::default();
    let norms = TailStats::sample(g, &p, |h| r.at(h).norm());
    let scale = norms.tail_max.max(1.0) * (f.eval(g.smallest()).norm() + lambda.norm()).max(1.0);
    let ps = p.scaled(scale);
    let left = TailStats::sample(g, &ps, |h| {
        let a = f.eval(h).shifted_from(lambda);
        (&(&a * &r.at(h)) - &id).norm()
    });
    let right = TailStats::sample(g, &ps, |h| {
        let a = f.eval(h).shifted_from(lambda);
        (&(&r.at(h) * &a) - &id).norm()
    });
    let ok = left.to_zero() && right.to_zero() && norms.limit_verdict != LimitVerdict::Unbounded;
    let msg = format!(
        "left residual {} (tail max {:.3e}), right residual {} (tail max {:.3e}), norm {}",
        left.limit_verdict, left.tail_max, right.limit_verdict, right.tail_max, norms.limit_verdict
    );
    (ok, msg)
}

/// Tail test on `‖R1(h) − R2(h)‖`. A violated precondition is reported in
/// the result rather than rejected.
pub fn resolvent_uniqueness_residual(
    f: &OperatorFamily,
    lambda: C64,
    r1: &dyn MatrixFamily,
    r2: &dyn MatrixFamily,
    g: &HGrid,
) -> Result<UniquenessReport, SpectraError> {
    if r1.family_dim() != f.dim() || r2.family_dim() != f.dim() {
        return Err(FamilyError::DimensionMismatch(f.dim(), r1.family_dim().max(r2.family_dim())).into());
    }
    let (ok1, m1) = approximate_inverse_ok(f, lambda, r1, g);
    let (ok2, m2) = approximate_inverse_ok(f, lambda, r2, g);
    let scale = TailStats::sample_tail(g, &TailParams::default(), |h| r1.at(h).norm())
        .tail_max
        .max(1.0);
    let stats = TailStats::sample(g, &TailParams::default().scaled(scale), |h| {
        (&r1.at(h) - &r2.at(h)).norm()
    });
    Ok(UniquenessReport {
        stats,
        precondition_ok: ok1 && ok2,
        diagnostics: format!("R1: {m1}; R2: {m2}"),
    })
}

#[derive(Clone, Debug)]
pub struct InvarianceReport {
    pub grid_f: RegionGrid,
    pub grid_g: RegionGrid,
    /// Row-major indices of cells classified differently (both determined).
    pub disagreements: Vec<usize>,
    /// Cells undetermined in either grid.
    pub undetermined: usize,
}

impl InvarianceReport {
    pub fn undetermined_fraction(&self) -> f64 {
        self.undetermined as f64 / self.grid_f.cells.len() as f64
    }
}

/// Compares the spectrum grids of two certified asymptotically equivalent
/// families cell by cell.
pub fn class_invariance_check(
    f: &OperatorFamily,
    g_fam: &OperatorFamily,
    rect: &Rect,
    nx: usize,
    ny: usize,
    g: &HGrid,
) -> Result<InvarianceReport, SpectraError> {
    let eq = asymptotically_equivalent(f, g_fam, g, &TailParams::default())?;
    if !(eq.to_zero() && eq.certificate == Some(true)) {
        return Err(SpectraError::Precondition(format!(
            "families are not certified asymptotically equivalent ({}, certificate {:?})",
            eq.limit_verdict, eq.certificate
        )));
    }
    let grid_f = family_spectrum_grid(f, rect, nx, ny, g)?;
    let grid_g = family_spectrum_grid(g_fam, rect, nx, ny, g)?;
    let mut disagreements = Vec::new();
    let mut undetermined = 0;
    for (k, (a, b)) in grid_f.cells.iter().zip(&grid_g.cells).enumerate() {
        if a.class == PointClass::Undetermined || b.class == PointClass::Undetermined {
            undetermined += 1;
        } else if a.class != b.class {
            disagreements.push(k);
        }
    }
    Ok(InvarianceReport {
        grid_f,
        grid_g,
        disagreements,
        undetermined,
    })
}
