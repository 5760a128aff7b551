//! Sampled checks of the family single-valued extension property.
//!
//! A witness is a sampled vector family `f_h(λ)` on a mesh of `λ`. It
//! falsifies the property when `‖(λI − F(h))f_h(λ)‖ → 0` at every mesh point
//! while `f_h(λ)` itself stays bounded (class O) but does not tend to zero
//! somewhere. Absence of such a witness is reported as "not falsified".

use std::fmt;
use std::sync::Arc;

use crate::family::{HGrid, LimitVerdict, OperatorFamily, TailStats};
use crate::linalg::{CVector, C64};
use crate::spectra::{ProbeContext, SpectraParams};

use super::LocalError;

pub trait Witness: Sync {
    fn label(&self) -> String;
    fn dim(&self) -> usize;
    fn eval(&self, h: f64, lambda: C64) -> CVector;
}

type WitnessFn = Arc<dyn Fn(f64, C64) -> CVector + Send + Sync>;

/// Witness backed by a closure.
#[derive(Clone)]
pub struct FnWitness {
    label: String,
    dim: usize,
    f: WitnessFn,
}

impl FnWitness {
    pub fn new(label: impl Into<String>, dim: usize, f: impl Fn(f64, C64) -> CVector + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            dim,
            f: Arc::new(f),
        }
    }
}

impl fmt::Debug for FnWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnWitness")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .finish()
    }
}

impl Witness for FnWitness {
    fn label(&self) -> String {
        self.label.clone()
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, h: f64, lambda: C64) -> CVector {
        (self.f)(h, lambda)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessRecord {
    pub label: String,
    /// `‖(λI − F(h))f_h(λ)‖ → 0` at every mesh point.
    pub residual_to_zero: bool,
    /// `lim sup ‖f_h(λ)‖ < ∞` at every mesh point.
    pub pointwise_class_o: bool,
    /// `lim sup sup_λ ‖f_h(λ)‖ < ∞` over the mesh.
    pub uniform_class_o: bool,
    /// First mesh point where `‖f_h(λ)‖` is bounded away from zero.
    pub nonzero_at: Option<C64>,
    pub falsifies: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SvepReport {
    pub records: Vec<WitnessRecord>,
}

impl SvepReport {
    pub fn falsified(&self) -> bool {
        self.records.iter().any(|r| r.falsifies)
    }

    pub fn verdict(&self) -> &'static str {
        if self.falsified() {
            "falsified"
        } else {
            "not falsified"
        }
    }
}

fn check_witness_dim(ctx: &ProbeContext, w: &dyn Witness) -> Result<(), LocalError> {
    if w.dim() != ctx.dim() {
        return Err(LocalError::DimensionMismatch(ctx.dim(), w.dim()));
    }
    Ok(())
}

fn record(ctx: &ProbeContext, w: &dyn Witness, mesh: &[C64]) -> WitnessRecord {
    let params = ctx.tail_params();
    let n = ctx.hs.len();
    let mut residual_to_zero = true;
    let mut pointwise_class_o = true;
    let mut nonzero_at = None;
    let mut sup_norms = vec![0.0f64; n];
    for &lambda in mesh {
        let mut resid = Vec::with_capacity(n);
        let mut norms = Vec::with_capacity(n);
        for (k, (&h, m)) in ctx.hs.iter().zip(&ctx.mats).enumerate() {
            let v = w.eval(h, lambda);
            resid.push(m.shifted_from(lambda).mul_vec(&v).norm());
            norms.push(v.norm());
            sup_norms[k] = sup_norms[k].max(v.norm());
        }
        residual_to_zero &= TailStats::analyze(&ctx.hs, resid, n, &params).to_zero();
        let ns = TailStats::analyze(&ctx.hs, norms, n, &params.with_floor(params.zero_floor / ctx.scale));
        pointwise_class_o &= ns.limit_verdict != LimitVerdict::Unbounded;
        if nonzero_at.is_none() && ns.limit_verdict == LimitVerdict::BoundedPositive {
            nonzero_at = Some(lambda);
        }
    }
    let uniform = TailStats::analyze(&ctx.hs, sup_norms, n, &params);
    WitnessRecord {
        label: w.label(),
        residual_to_zero,
        pointwise_class_o,
        uniform_class_o: uniform.limit_verdict != LimitVerdict::Unbounded,
        nonzero_at,
        falsifies: residual_to_zero && pointwise_class_o && nonzero_at.is_some(),
    }
}

/// Runs every witness over `mesh`. Witnesses are evaluated on the tail of
/// `g`; records keep the witness order.
pub fn svep_falsification_probe(
    f: &OperatorFamily,
    witnesses: &[&dyn Witness],
    mesh: &[C64],
    g: &HGrid,
) -> Result<SvepReport, LocalError> {
    let ctx = ProbeContext::new(f, g, &SpectraParams::default())?;
    for w in witnesses {
        check_witness_dim(&ctx, *w)?;
    }
    let records = crate::par::map(witnesses.to_vec(), |w| record(&ctx, w, mesh));
    Ok(SvepReport { records })
}

/// Tail statistics of `sup_λ ‖x_h(λ) − y_h(λ)‖` over `mesh` for two
/// solution families of `(λI − F(h))x_h(λ) → x`. Both residuals must tend
/// to zero at every mesh point.
pub fn local_extension_uniqueness_check(
    f: &OperatorFamily,
    x: &CVector,
    xs: &dyn Witness,
    ys: &dyn Witness,
    mesh: &[C64],
    g: &HGrid,
) -> Result<TailStats, LocalError> {
    let ctx = ProbeContext::new(f, g, &SpectraParams::default())?;
    if x.dim() != ctx.dim() {
        return Err(LocalError::DimensionMismatch(ctx.dim(), x.dim()));
    }
    check_witness_dim(&ctx, xs)?;
    check_witness_dim(&ctx, ys)?;
    let params = ctx.tail_params().scaled(x.norm().max(1.0));
    let n = ctx.hs.len();
    let mut diff = vec![0.0f64; n];
    for &lambda in mesh {
        for (name, w) in [("first", xs), ("second", ys)] {
            let resid: Vec<f64> = ctx
                .hs
                .iter()
                .zip(&ctx.mats)
                .map(|(&h, m)| (&m.shifted_from(lambda).mul_vec(&w.eval(h, lambda)) - x).norm())
                .collect();
            let s = TailStats::analyze(&ctx.hs, resid, n, &params);
            if !s.to_zero() {
                return Err(LocalError::Precondition(format!(
                    "{name} solution family `{}` has residual {} at λ = {lambda}",
                    w.label(),
                    s.limit_verdict
                )));
            }
        }
        for (k, &h) in ctx.hs.iter().enumerate() {
            diff[k] = diff[k].max((&xs.eval(h, lambda) - &ys.eval(h, lambda)).norm());
        }
    }
    Ok(TailStats::analyze(&ctx.hs, diff, n, &params))
}
