//! Asymptotic functionals: `lim sup` norms, null tests, equivalences,
//! quotient-norm bounds, commutation in the limit and the module action.

use crate::bracket::{self, root_test, BracketSeq, EquivalenceReport, QnParams};
use crate::linalg::CMatrix;

use super::{
    Family, FamilyError, FamilyValue, HGrid, LimitVerdict, OperatorFamily, TailParams, TailStats, VectorFamily,
};

/// Tail maximum of `‖F(h_k)‖`.
pub fn limsup_norm<V: FamilyValue>(f: &Family<V>, g: &HGrid) -> f64 {
    g.tail_samples().into_iter().map(|h| f.eval_norm(h)).fold(0.0, f64::max)
}

/// Maximum of `‖F(h_k)‖` over every sample.
pub fn sup_norm<V: FamilyValue>(f: &Family<V>, g: &HGrid) -> f64 {
    g.samples().into_iter().map(|h| f.eval_norm(h)).fold(0.0, f64::max)
}

/// Sampled tail statistics of `‖F(h)‖`, without certificates.
pub fn norm_stats<V: FamilyValue>(f: &Family<V>, g: &HGrid, p: &TailParams) -> TailStats {
    TailStats::sample(g, p, |h| f.eval_norm(h))
}

/// Tail test on `‖F(h)‖` combined with the catalog certificate. Terms of
/// norm at most `p.zero_floor` are ignored by the certificate.
pub fn is_null_family<V: FamilyValue>(f: &Family<V>, g: &HGrid, p: &TailParams) -> TailStats {
    norm_stats(f, g, p).with_certificate(f.null_certificate(p.zero_floor))
}

/// Null test on `F − G`.
pub fn asymptotically_equivalent<V: FamilyValue>(
    f: &Family<V>,
    g_fam: &Family<V>,
    g: &HGrid,
    p: &TailParams,
) -> Result<TailStats, FamilyError> {
    Ok(is_null_family(&f.sub(g_fam)?, g, p))
}

/// Root test on `σ_n = lim sup_h ‖(F(h)−G(h))^[n]‖`, both orders.
///
/// For catalog families the inner limit is taken exactly: `F(h) → F₀` and
/// `G(h) → G₀`, and brackets of fixed order are continuous, so
/// `σ_n = ‖(F₀−G₀)^[n]‖`. Families with sampled terms fall back to tail
/// statistics of the per-`h` bracket norms.
pub fn asym_qn_equivalent(
    f: &OperatorFamily,
    g_fam: &OperatorFamily,
    g: &HGrid,
    qn: &QnParams,
    p: &TailParams,
) -> Result<EquivalenceReport, FamilyError> {
    if f.dim() != g_fam.dim() {
        return Err(FamilyError::DimensionMismatch(f.dim(), g_fam.dim()));
    }
    if let (Some(f0), Some(g0)) = (f.limit_value(), g_fam.limit_value()) {
        let pair = bracket::bracket_seq(&f0, &g0, qn.n_max)?;
        let mut report = root_test(&pair.forward, &pair.backward, qn);
        report.diagnostics = format!("inner limit: catalog limit operators; {}", report.diagnostics);
        return Ok(report);
    }
    let tail = g.tail_samples();
    let sampled = |t: &dyn Fn(f64) -> CMatrix, s: &dyn Fn(f64) -> CMatrix| -> Result<BracketSeq, FamilyError> {
        if qn.n_max < 4 {
            return Err(bracket::BracketError::TooFewTerms(qn.n_max).into());
        }
        let per_h: Vec<Vec<f64>> = tail
            .iter()
            .map(|&h| bracket::norm_sequence(&t(h), &s(h), qn.n_max))
            .collect();
        let sigma = (0..qn.n_max)
            .map(|n| {
                let values: Vec<f64> = per_h.iter().map(|row| row[n]).collect();
                let stats = TailStats::analyze(&tail, values, tail.len(), p);
                match stats.limit_verdict {
                    LimitVerdict::ToZero => 0.0,
                    LimitVerdict::Unbounded => f64::INFINITY,
                    _ => stats.tail_max,
                }
            })
            .collect();
        Ok(BracketSeq::from_norms(sigma))
    };
    let forward = sampled(&|h| f.eval(h), &|h| g_fam.eval(h))?;
    let backward = sampled(&|h| g_fam.eval(h), &|h| f.eval(h))?;
    let mut report = root_test(&forward, &backward, qn);
    report.diagnostics = format!("inner limit: tail estimate; {}", report.diagnostics);
    Ok(report)
}

/// Two-sided bounds `lower ≤ ‖Ḟ‖ ≤ upper` on the quotient norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuotientBounds {
    pub lower: f64,
    pub upper: f64,
    /// `sup_k ‖F(h_k)‖` before dropping certified-null terms.
    pub raw_upper: f64,
}

/// `lim sup` is a class invariant, so both the given representative and its
/// canonical one (certified-null terms dropped) bound the quotient norm
/// from below; each one's sup over the grid bounds it from above.
pub fn quotient_norm_bounds<V: FamilyValue>(f: &Family<V>, g: &HGrid) -> QuotientBounds {
    let canon = f.drop_null_terms();
    let raw_upper = sup_norm(f, g);
    let lower = limsup_norm(f, g).min(limsup_norm(&canon, g));
    let upper = raw_upper.min(sup_norm(&canon, g));
    QuotientBounds {
        lower,
        upper,
        raw_upper,
    }
}

/// Tail test on `‖F(h)G(h) − G(h)F(h)‖`, thresholds scaled by
/// `max(1, ‖F‖·‖G‖)` to absorb rounding in the products.
pub fn commute_in_limit(
    f: &OperatorFamily,
    g_fam: &OperatorFamily,
    g: &HGrid,
    p: &TailParams,
) -> Result<TailStats, FamilyError> {
    if f.dim() != g_fam.dim() {
        return Err(FamilyError::DimensionMismatch(f.dim(), g_fam.dim()));
    }
    let scale = (sup_norm(f, g) * sup_norm(g_fam, g)).max(1.0);
    let ps = p.scaled(scale);
    let stats = TailStats::sample(g, &ps, |h| {
        let (a, b) = (f.eval(h), g_fam.eval(h));
        a.commutator(&b).norm()
    });
    let comm = f.commutator(g_fam)?;
    Ok(stats.with_certificate(comm.null_certificate(ps.zero_floor)))
}

/// `h ↦ F(h)·V(h)` as a vector family.
pub fn module_action(f: &OperatorFamily, v: &VectorFamily) -> Result<VectorFamily, FamilyError> {
    f.apply(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket::Verdict;
    use crate::family::CoeffFn;
    use crate::linalg::{c, CVector};

    fn grid() -> HGrid {
        HGrid::default()
    }

    fn params() -> TailParams {
        TailParams::default()
    }

    fn pow(p: f64) -> CoeffFn {
        CoeffFn::pow(p).unwrap()
    }

    fn expinv(a: f64) -> CoeffFn {
        CoeffFn::exp_inv(a).unwrap()
    }

    fn sample_a() -> CMatrix {
        CMatrix::from_fn(3, |i, j| c((i + 2 * j) as f64 * 0.3 - 0.7, (i as f64 - j as f64) * 0.2))
    }

    fn sample_b() -> CMatrix {
        CMatrix::from_fn(3, |i, j| c(((i * j) % 3) as f64 - 1.0, 0.4))
    }

    #[test]
    fn limsup_of_constant_is_norm() {
        let a = sample_a();
        assert_eq!(limsup_norm(&OperatorFamily::constant(a.clone()), &grid()), a.norm());
    }

    #[test]
    fn limsup_drops_exponentially_small_term() {
        let f = OperatorFamily::identity(2)
            .with_term(expinv(1.0), CMatrix::identity(2))
            .unwrap();
        assert!((limsup_norm(&f, &grid()) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn limsup_of_linear_decay() {
        let f = OperatorFamily::zero(2).with_term(pow(1.0), CMatrix::shift(2)).unwrap();
        let g = grid();
        let h_first_tail = g.tail_samples()[0];
        assert!((limsup_norm(&f, &g) - h_first_tail).abs() < 1e-24);
        assert_eq!(is_null_family(&f, &g, &params()).limit_verdict, LimitVerdict::ToZero);
    }

    #[test]
    fn null_family_examples() {
        let a = sample_a();
        let g = grid();
        let p = params();
        let lin = OperatorFamily::zero(3).with_term(pow(1.0), a.clone()).unwrap();
        assert_eq!(is_null_family(&lin, &g, &p).limit_verdict, LimitVerdict::ToZero);
        let cst = OperatorFamily::constant(a.clone());
        assert_eq!(
            is_null_family(&cst, &g, &p).limit_verdict,
            LimitVerdict::BoundedPositive
        );
        let ex = OperatorFamily::zero(3).with_term(expinv(3.0), a).unwrap();
        let s = is_null_family(&ex, &g, &p);
        assert_eq!(s.limit_verdict, LimitVerdict::ToZero);
        assert!(s.tail_max < 1e-38);
    }

    #[test]
    fn sampled_null_family_without_certificate() {
        let f = OperatorFamily::zero(2)
            .with_term(CoeffFn::sampled("h^2", |h| h * h), CMatrix::identity(2))
            .unwrap();
        let s = is_null_family(&f, &grid(), &params());
        assert_eq!(s.certificate, None);
        assert_eq!(s.limit_verdict, LimitVerdict::ToZero);
    }

    #[test]
    fn asymptotic_equivalence_examples() {
        let (a, b) = (sample_a(), sample_b());
        let g = grid();
        let p = params();
        let f = OperatorFamily::constant(a.clone());
        let fh = f.clone().with_term(pow(1.0), b.clone()).unwrap();
        assert!(asymptotically_equivalent(&f, &fh, &g, &p).unwrap().to_zero());
        let fn_ = f.clone().with_term(CoeffFn::Const, CMatrix::shift(3)).unwrap();
        assert_eq!(
            asymptotically_equivalent(&f, &fn_, &g, &p).unwrap().limit_verdict,
            LimitVerdict::BoundedPositive
        );
        let fe = f.clone().with_term(expinv(1.0), b.clone()).unwrap();
        let fq = f.with_term(pow(2.0), sample_b().scale_real(0.5)).unwrap();
        assert!(asymptotically_equivalent(&fe, &fq, &g, &p).unwrap().to_zero());
    }

    #[test]
    fn asym_qn_examples() {
        let g = grid();
        let p = params();
        let qn = QnParams::default();
        let t = OperatorFamily::constant(CMatrix::scalar(3, c(2.0, 0.0)));
        let s = OperatorFamily::constant(CMatrix::jordan(c(2.0, 0.0), 3));
        assert_eq!(
            asym_qn_equivalent(&t, &s, &g, &qn, &p).unwrap().verdict,
            Verdict::Equivalent
        );
        let t = OperatorFamily::constant(CMatrix::from_real_diag(&[0.0, 1.0]));
        let s = OperatorFamily::constant(CMatrix::from_real_diag(&[0.0, 2.0]));
        assert_eq!(
            asym_qn_equivalent(&t, &s, &g, &qn, &p).unwrap().verdict,
            Verdict::NotEquivalent
        );
        let f = OperatorFamily::constant(sample_a())
            .with_term(pow(1.0), sample_b())
            .unwrap();
        let h = OperatorFamily::constant(sample_a())
            .with_term(expinv(1.0), sample_b())
            .unwrap();
        assert_eq!(
            asym_qn_equivalent(&f, &h, &g, &qn, &p).unwrap().verdict,
            Verdict::Equivalent
        );
    }

    #[test]
    fn asym_qn_sampled_fallback() {
        let g = grid();
        let t = OperatorFamily::constant(CMatrix::scalar(3, c(2.0, 0.0)))
            .with_term(CoeffFn::sampled("h", |h| h), CMatrix::identity(3))
            .unwrap();
        let s = OperatorFamily::constant(CMatrix::jordan(c(2.0, 0.0), 3));
        let r = asym_qn_equivalent(&t, &s, &g, &QnParams::default(), &params()).unwrap();
        assert_eq!(r.verdict, Verdict::Equivalent, "{}", r.diagnostics);
        assert!(r.diagnostics.starts_with("inner limit: tail"));
    }

    #[test]
    fn quotient_bounds_examples() {
        let g = grid();
        let a = sample_a();
        let q = quotient_norm_bounds(&OperatorFamily::constant(a.clone()), &g);
        assert_eq!((q.lower, q.upper), (a.norm(), a.norm()));

        let f = OperatorFamily::identity(2)
            .with_term(expinv(1.0), CMatrix::identity(2))
            .unwrap();
        let q = quotient_norm_bounds(&f, &g);
        assert!((q.lower - 1.0).abs() < 1e-12 && (q.upper - 1.0).abs() < 1e-12);
        assert!((q.raw_upper - (1.0 + (-1.0f64).exp())).abs() < 1e-12);

        let hn = OperatorFamily::zero(2).with_term(pow(1.0), CMatrix::shift(2)).unwrap();
        let q = quotient_norm_bounds(&hn, &g);
        assert_eq!((q.lower, q.upper), (0.0, 0.0));
        assert_eq!(q.raw_upper, 1.0);
    }

    #[test]
    fn commutation_examples() {
        let g = grid();
        let p = params();
        let a = sample_a();
        let pa = &(&a * &a).scale_real(2.0) - &a;
        let s = commute_in_limit(&OperatorFamily::constant(a), &OperatorFamily::constant(pa), &g, &p).unwrap();
        assert!(s.to_zero(), "{s:?}");
        let d1 = OperatorFamily::constant(CMatrix::from_real_diag(&[1.0, 3.0]));
        let d2 = OperatorFamily::constant(CMatrix::from_real_diag(&[-2.0, 5.0]));
        assert!(commute_in_limit(&d1, &d2, &g, &p).unwrap().to_zero());
        let j = OperatorFamily::constant(CMatrix::shift(2));
        let d = OperatorFamily::constant(CMatrix::from_real_diag(&[1.0, 2.0]));
        let s = commute_in_limit(&j, &d, &g, &p).unwrap();
        assert_eq!(s.limit_verdict, LimitVerdict::BoundedPositive);
        assert!((s.tail_max - 1.0).abs() < 1e-12);
    }

    #[test]
    fn module_action_examples() {
        let g = grid();
        let p = params();
        let two = OperatorFamily::constant(CMatrix::scalar(2, c(2.0, 0.0)));
        let v = VectorFamily::constant(CVector::basis(2, 0));
        let out = module_action(&two, &v).unwrap();
        assert_eq!(out.eval(0.5), CVector::from_real(&[2.0, 0.0]));

        let hi = OperatorFamily::zero(2)
            .with_term(pow(1.0), CMatrix::identity(2))
            .unwrap();
        assert!(is_null_family(&module_action(&hi, &v).unwrap(), &g, &p).to_zero());

        let f = OperatorFamily::constant(sample_a())
            .with_term(pow(1.0), sample_b())
            .unwrap();
        let x = VectorFamily::constant(CVector::from_real(&[1.0, 0.5, -1.0]))
            .with_term(pow(1.0), CVector::from_real(&[0.0, 2.0, 1.0]))
            .unwrap();
        let x2 = x
            .clone()
            .with_term(pow(1.0), CVector::from_real(&[3.0, 3.0, 3.0]))
            .unwrap();
        let diff = module_action(&f, &x2)
            .unwrap()
            .sub(&module_action(&f, &x).unwrap())
            .unwrap();
        assert!(is_null_family(&diff, &g, &p).to_zero());
    }
}
