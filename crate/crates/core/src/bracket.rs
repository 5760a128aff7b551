//! The binomial bracket `(T−S)^[n] = Σ_k (−1)^{n−k} C(n,k) T^k S^{n−k}` and a
//! root-test estimator for quasinilpotent equivalence.
//!
//! Brackets are evaluated with the recurrence `B₀ = I`,
//! `B_{n+1} = T·B_n − B_n·S`, which needs one pair of matrix products per
//! step and never forms binomial coefficients. The explicit sum is kept as
//! an independent cross-check.

use std::fmt;

use thiserror::Error;

use crate::linalg::CMatrix;

pub const MAX_BRACKET_ORDER: usize = 64;
/// Norms below this are treated as an exact zero bracket.
pub const EPS_ZERO: f64 = 1e-300;
/// Norms above this count as overflow.
pub const OVERFLOW: f64 = 1e300;
/// Largest order checked against the explicit binomial sum.
pub const CROSS_CHECK_ORDER: usize = 12;
/// Largest decrease in `ln ρ_n` per step still treated as "non-decreasing".
const TREND_TOL: f64 = 1e-2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BracketError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("bracket order {0} exceeds {MAX_BRACKET_ORDER}")]
    OrderTooLarge(usize),
    #[error("need at least 4 terms, got n_max={0}")]
    TooFewTerms(usize),
}

fn check_dims(t: &CMatrix, s: &CMatrix) -> Result<(), BracketError> {
    if t.dim() != s.dim() {
        return Err(BracketError::DimensionMismatch(t.dim(), s.dim()));
    }
    Ok(())
}

/// `(T−S)^[n]` by recurrence; `n = 0` gives `I`.
pub fn bracket(t: &CMatrix, s: &CMatrix, n: usize) -> Result<CMatrix, BracketError> {
    check_dims(t, s)?;
    if n > MAX_BRACKET_ORDER {
        return Err(BracketError::OrderTooLarge(n));
    }
    let mut b = CMatrix::identity(t.dim());
    for _ in 0..n {
        b = bracket_step(t, s, &b);
    }
    Ok(b)
}

pub(crate) fn bracket_step(t: &CMatrix, s: &CMatrix, b: &CMatrix) -> CMatrix {
    &(t * b) - &(b * s)
}

/// `(T−S)^[n]` from the explicit binomial sum.
pub fn bracket_binomial(t: &CMatrix, s: &CMatrix, n: usize) -> Result<CMatrix, BracketError> {
    check_dims(t, s)?;
    if n > MAX_BRACKET_ORDER {
        return Err(BracketError::OrderTooLarge(n));
    }
    let d = t.dim();
    let t_pows: Vec<CMatrix> = std::iter::successors(Some(CMatrix::identity(d)), |p| Some(p * t))
        .take(n + 1)
        .collect();
    let s_pows: Vec<CMatrix> = std::iter::successors(Some(CMatrix::identity(d)), |p| Some(p * s))
        .take(n + 1)
        .collect();
    let mut sum = CMatrix::zeros(d);
    let mut binom = 1.0_f64;
    for k in 0..=n {
        let sign = if (n - k).is_multiple_of(2) { 1.0 } else { -1.0 };
        let term = (&t_pows[k] * &s_pows[n - k]).scale_real(sign * binom);
        sum = &sum + &term;
        binom = binom * (n - k) as f64 / (k + 1) as f64;
    }
    Ok(sum)
}

/// Norms and roots `ρ_n = ‖(T−S)^[n]‖^{1/n}` for `n = 1..=n_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketSeq {
    pub n_max: usize,
    pub norms: Vec<f64>,
    pub roots: Vec<f64>,
    /// First order at which the bracket vanished exactly, if any.
    pub zero_from: Option<usize>,
    pub overflow: bool,
}

impl BracketSeq {
    pub fn from_norms(norms: Vec<f64>) -> Self {
        let n_max = norms.len();
        let mut zero_from = None;
        let mut overflow = false;
        let mut roots = Vec::with_capacity(n_max);
        for (idx, &v) in norms.iter().enumerate() {
            let n = idx + 1;
            if !v.is_finite() || v > OVERFLOW {
                overflow = true;
            }
            if v < EPS_ZERO {
                zero_from.get_or_insert(n);
            }
            let root = if zero_from.is_some() {
                0.0
            } else {
                v.powf(1.0 / n as f64)
            };
            roots.push(root);
        }
        Self {
            n_max,
            norms,
            roots,
            zero_from,
            overflow,
        }
    }

    /// `ρ_n` (1-based).
    pub fn root(&self, n: usize) -> f64 {
        self.roots[n - 1]
    }

    pub fn final_root(&self) -> f64 {
        *self.roots.last().expect("n_max >= 1")
    }
}

/// Sequences for both orders, `(T−S)^[n]` and `(S−T)^[n]`.
#[derive(Clone, Debug)]
pub struct BracketPair {
    pub forward: BracketSeq,
    pub backward: BracketSeq,
    /// Largest relative deviation between recurrence and binomial sum for
    /// `n ≤ 12`, normalised by `(‖T‖+‖S‖)^n`.
    pub cross_check: Option<f64>,
}

pub(crate) fn norm_sequence(t: &CMatrix, s: &CMatrix, n_max: usize) -> Vec<f64> {
    let mut b = CMatrix::identity(t.dim());
    let mut norms = Vec::with_capacity(n_max);
    let mut dead = false;
    for _ in 0..n_max {
        if dead {
            norms.push(0.0);
            continue;
        }
        b = bracket_step(t, s, &b);
        let v = if b.is_zero() { 0.0 } else { b.norm() };
        if v == 0.0 {
            dead = true;
        }
        if !v.is_finite() || v > OVERFLOW {
            norms.resize(n_max, f64::INFINITY);
            break;
        }
        norms.push(v);
    }
    norms
}

/// Relative recurrence-vs-sum deviation up to order `upto`.
pub fn cross_check(t: &CMatrix, s: &CMatrix, upto: usize) -> Result<f64, BracketError> {
    check_dims(t, s)?;
    let scale = t.norm() + s.norm();
    let mut b = CMatrix::identity(t.dim());
    let mut worst: f64 = 0.0;
    for n in 1..=upto {
        b = bracket_step(t, s, &b);
        let reference = bracket_binomial(t, s, n)?;
        let denom = scale.powi(n as i32).max(f64::MIN_POSITIVE);
        worst = worst.max((&b - &reference).norm() / denom);
    }
    Ok(worst)
}

pub fn bracket_seq(t: &CMatrix, s: &CMatrix, n_max: usize) -> Result<BracketPair, BracketError> {
    check_dims(t, s)?;
    if n_max < 4 {
        return Err(BracketError::TooFewTerms(n_max));
    }
    if n_max > MAX_BRACKET_ORDER {
        return Err(BracketError::OrderTooLarge(n_max));
    }
    Ok(BracketPair {
        forward: BracketSeq::from_norms(norm_sequence(t, s, n_max)),
        backward: BracketSeq::from_norms(norm_sequence(s, t, n_max)),
        cross_check: None,
    })
}

/// As [`bracket_seq`], additionally comparing the recurrence with the
/// binomial sum for orders up to [`CROSS_CHECK_ORDER`].
pub fn bracket_seq_checked(t: &CMatrix, s: &CMatrix, n_max: usize) -> Result<BracketPair, BracketError> {
    let mut pair = bracket_seq(t, s, n_max)?;
    let upto = n_max.min(CROSS_CHECK_ORDER);
    let fwd = cross_check(t, s, upto)?;
    let bwd = cross_check(s, t, upto)?;
    pair.cross_check = Some(fwd.max(bwd));
    Ok(pair)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Equivalent,
    NotEquivalent,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Equivalent => "equivalent",
            Verdict::NotEquivalent => "not-equivalent",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QnParams {
    pub n_max: usize,
    /// Final root below this ⇒ equivalent.
    pub eps_q: f64,
    /// Window of roots bounded below by this (and not decaying) ⇒ not
    /// equivalent.
    pub delta_q: f64,
    pub window: usize,
}

impl Default for QnParams {
    fn default() -> Self {
        Self {
            n_max: 40,
            eps_q: 0.05,
            delta_q: 0.2,
            window: 5,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub verdict: Verdict,
    /// `max(ρ_{n_max}(T,S), ρ_{n_max}(S,T))`.
    pub final_root: f64,
    /// Least-squares slope of `ln ρ_n` over the last window, for the order
    /// with the larger final root (`−∞` if that window hit an exact zero).
    pub trend: f64,
    pub diagnostics: String,
    pub forward_roots: Vec<f64>,
    pub backward_roots: Vec<f64>,
}

/// Slope of `ln ρ_n` against `n` over the trailing window.
fn window_trend(roots: &[f64], window: usize) -> f64 {
    let w = window.min(roots.len()).max(2);
    let tail = &roots[roots.len() - w..];
    if tail.iter().any(|&r| r <= 0.0) {
        return f64::NEG_INFINITY;
    }
    let xs: Vec<f64> = (0..w).map(|k| k as f64).collect();
    let ys: Vec<f64> = tail.iter().map(|r| r.ln()).collect();
    crate::family::least_squares_slope(&xs, &ys)
}

fn one_sided(seq: &BracketSeq, p: &QnParams) -> (Verdict, f64) {
    let trend = window_trend(&seq.roots, p.window);
    if seq.overflow {
        return (Verdict::Inconclusive, trend);
    }
    if seq.final_root() < p.eps_q {
        return (Verdict::Equivalent, trend);
    }
    let w = p.window.min(seq.roots.len());
    let floor = seq.roots[seq.roots.len() - w..]
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if floor >= p.delta_q && trend >= -TREND_TOL {
        (Verdict::NotEquivalent, trend)
    } else {
        (Verdict::Inconclusive, trend)
    }
}

/// Combines the two one-sided root sequences into a symmetric verdict.
pub fn root_test(forward: &BracketSeq, backward: &BracketSeq, p: &QnParams) -> EquivalenceReport {
    let (vf, tf) = one_sided(forward, p);
    let (vb, tb) = one_sided(backward, p);
    let verdict = match (vf, vb) {
        (Verdict::Equivalent, Verdict::Equivalent) => Verdict::Equivalent,
        (Verdict::NotEquivalent, _) | (_, Verdict::NotEquivalent) => Verdict::NotEquivalent,
        _ => Verdict::Inconclusive,
    };
    let (final_root, trend) = if forward.final_root() >= backward.final_root() {
        (forward.final_root(), tf)
    } else {
        (backward.final_root(), tb)
    };
    let describe = |s: &BracketSeq| match (s.zero_from, s.overflow) {
        (_, true) => "overflow".to_string(),
        (Some(k), _) => format!("zero from n={k}"),
        (None, _) => format!("rho_n_max={:.6e}", s.final_root()),
    };
    let diagnostics = format!(
        "forward: {} ({vf}); backward: {} ({vb})",
        describe(forward),
        describe(backward)
    );
    EquivalenceReport {
        verdict,
        final_root,
        trend,
        diagnostics,
        forward_roots: forward.roots.clone(),
        backward_roots: backward.roots.clone(),
    }
}

/// Root-test verdict on `‖(T−S)^[n]‖^{1/n}` and `‖(S−T)^[n]‖^{1/n}`.
pub fn qn_equivalent(t: &CMatrix, s: &CMatrix, p: &QnParams) -> Result<EquivalenceReport, BracketError> {
    let pair = bracket_seq(t, s, p.n_max)?;
    Ok(root_test(&pair.forward, &pair.backward, p))
}
