//! The verification checklist. Every check draws its instances from its own
//! `(seed, stream)` generator, so checks are independent of each other and
//! of the selection.

use std::collections::BTreeSet;
use std::fmt::Display;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::bracket::{bracket, bracket_binomial, bracket_seq, qn_equivalent, Verdict};
use crate::family::{
    asym_qn_equivalent, asymptotically_equivalent, commute_in_limit, quotient_norm_bounds, CoeffFn, FnFamily,
    OperatorFamily, TailParams,
};
use crate::linalg::{eigenvalues, spectral_decomp, CMatrix, CVector, Lu, C64};
use crate::local::{
    local_extension_uniqueness_check, local_spectrum_exact_with, member_from_grid, svep_falsification_probe, FnWitness,
    LocalGridContext, Region, Witness,
};
use crate::spectra::{
    class_invariance_check, family_spectrum_grid, resolvent_identity_residual, resolvent_uniqueness_residual,
    spectral_radius_bound, PointClass, ProbeContext, Rect, RegionGrid, SpectraParams,
};

use super::gen::{
    commuting_nilpotent, generate_pair, random_catalog_family, random_decaying_coeff, random_diagonalizable,
    random_matrix, random_supported_vector, random_vector, rng_for, PairKind,
};
use super::{CheckRecord, CheckVerdict, HarnessError, ReportBundle, ScenarioConfig, Suite};

/// Cluster tolerance for defective test matrices, whose computed
/// eigenvalues split by about `ε^{1/m}` for a block of size `m`.
const DEFECTIVE_CLUSTER_TOL: f64 = 1e-3;
/// Resolution of the local grids in the family-level local checks.
const LOCAL_RES: usize = 32;
/// Orders on which shifted-bracket roots are compared with `|c|`.
const SHIFT_EXACT_ORDERS: usize = 10;

struct Outcome {
    instance: String,
    numerics: Vec<(String, String)>,
    failures: Vec<String>,
    inconclusive: Vec<String>,
}

impl Outcome {
    fn new(instance: impl Into<String>) -> Self {
        Self {
            instance: instance.into(),
            numerics: Vec::new(),
            failures: Vec::new(),
            inconclusive: Vec::new(),
        }
    }

    fn num(&mut self, key: &str, v: f64) {
        self.numerics.push((key.into(), format!("{v:.6e}")));
    }

    fn int(&mut self, key: &str, v: usize) {
        self.numerics.push((key.into(), v.to_string()));
    }

    fn fail(&mut self, msg: impl Into<String>) {
        self.failures.push(msg.into());
    }

    fn expect(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.fail(msg());
        }
    }

    fn inconclusive(&mut self, msg: impl Into<String>) {
        self.inconclusive.push(msg.into());
    }

    fn ok<T, E: Display>(&mut self, r: Result<T, E>, what: &str) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.fail(format!("{what}: {e}"));
                None
            }
        }
    }

    fn verdict(&self) -> (CheckVerdict, String) {
        let summarize = |v: &[String]| {
            if v.len() > 1 {
                format!("{} (+{} more)", v[0], v.len() - 1)
            } else {
                v[0].clone()
            }
        };
        if !self.failures.is_empty() {
            (CheckVerdict::Fail, summarize(&self.failures))
        } else if !self.inconclusive.is_empty() {
            (CheckVerdict::Inconclusive, summarize(&self.inconclusive))
        } else {
            (CheckVerdict::Pass, String::new())
        }
    }
}

type CheckFn = fn(&ScenarioConfig) -> Outcome;

struct Check {
    id: &'static str,
    suite: Suite,
    anchor: &'static str,
    run: CheckFn,
}

const CHECKS: &[Check] = &[
    Check {
        id: "bracket.recurrence-vs-binomial",
        suite: Suite::Bracket,
        anchor: "(T-S)^[n] = sum_k (-1)^(n-k) C(n,k) T^k S^(n-k)",
        run: recurrence_vs_binomial,
    },
    Check {
        id: "bracket.scalar-vs-jordan",
        suite: Suite::Bracket,
        anchor: "T, S quasinilpotent equivalent => Sp(T) = Sp(S) and Sp_T(x) = Sp_S(x)",
        run: scalar_vs_jordan,
    },
    Check {
        id: "bracket.commuting-nilpotent",
        suite: Suite::Bracket,
        anchor: "T, S quasinilpotent equivalent => Sp(T) = Sp(S) and Sp_T(x) = Sp_S(x)",
        run: commuting_nilpotent_pairs,
    },
    Check {
        id: "bracket.non-equivalent",
        suite: Suite::Bracket,
        anchor: "lim_n ||(T-S)^[n]||^(1/n) = 1 > 0 => T, S not quasinilpotent equivalent",
        run: non_equivalent,
    },
    Check {
        id: "bracket.reflexive-and-shift",
        suite: Suite::Bracket,
        anchor: "(T-T)^[n] = 0 and (T-(T+cI))^[n] = (-c)^n I",
        run: reflexive_and_shift,
    },
    Check {
        id: "family.quotient-sandwich",
        suite: Suite::Family,
        anchor: "limsup_h ||F(h)|| <= ||F + C_0|| <= sup_h ||F(h)|| in C_b/C_0",
        run: quotient_sandwich,
    },
    Check {
        id: "family.null-difference",
        suite: Suite::Family,
        anchor: "||F(h) - G(h)|| -> 0 => F, G asymptotically equivalent",
        run: null_difference,
    },
    Check {
        id: "family.commuting-asym-qn",
        suite: Suite::Family,
        anchor: "[F(h),G(h)] -> 0 and lim_n limsup_h ||(F(h)-G(h))^[n]||^(1/n) = 0",
        run: commuting_asym_qn,
    },
    Check {
        id: "spectra.constant-oracle",
        suite: Suite::Spectra,
        anchor: "Sp({A}) = Sp(A) for a constant family",
        run: constant_oracle,
    },
    Check {
        id: "spectra.sqrt-family",
        suite: Suite::Spectra,
        anchor: "Sp({F(h)}) = {0} although Sp(F(h)) = {+sqrt(h), -sqrt(h)}",
        run: sqrt_family,
    },
    Check {
        id: "spectra.resolvent-identity",
        suite: Suite::Spectra,
        anchor: "R(l) - R(m) = (m-l) R(l) R(m); approximate inverses agree as h -> 0",
        run: resolvent_identity,
    },
    Check {
        id: "spectra.null-invariance",
        suite: Suite::Spectra,
        anchor: "F, G asymptotically equivalent => Sp({F}) = Sp({G})",
        run: null_invariance,
    },
    Check {
        id: "local.oracle-equivalence",
        suite: Suite::Local,
        anchor: "Sp_A(x) = {l_i : P_i x != 0}",
        run: local_oracle,
    },
    Check {
        id: "local.commuting-qn-agreement",
        suite: Suite::Local,
        anchor: "commuting, asymptotically qn-equivalent F, G => Sp_F(x) = Sp_G(x) and X_F(a) = X_G(a)",
        run: commuting_qn_agreement,
    },
    Check {
        id: "local.inclusion",
        suite: Suite::Local,
        anchor: "r(F) is contained in r_F(x), i.e. Sp_F(x) is contained in Sp(F)",
        run: local_inclusion,
    },
    Check {
        id: "local.truncation",
        suite: Suite::Local,
        anchor: "X_F(a) = X_F(a intersected with Sp(F))",
        run: local_truncation,
    },
    Check {
        id: "local.extension-uniqueness",
        suite: Suite::Local,
        anchor: "two local solutions of (l - F(h)) x_h(l) -> x satisfy ||x_h(l) - y_h(l)|| -> 0",
        run: extension_uniqueness,
    },
    Check {
        id: "local.equivalence-invariance",
        suite: Suite::Local,
        anchor: "F, G asymptotically equivalent => r_F(x) = r_G(x) for all x",
        run: equivalence_invariance,
    },
    Check {
        id: "local.monotone-membership",
        suite: Suite::Local,
        anchor: "a contained in b => X_F(a) contained in X_F(b)",
        run: monotone_membership,
    },
    Check {
        id: "local.linearity",
        suite: Suite::Local,
        anchor: "Sp(ax + by) contained in Sp(x) union Sp(y)",
        run: linearity,
    },
    Check {
        id: "local.svep-unfalsified",
        suite: Suite::Local,
        anchor: "(l - F(h)) f_h(l) -> 0 with f in class O => f_h(l) -> 0",
        run: svep_unfalsified,
    },
    Check {
        id: "local.quotient-invariance",
        suite: Suite::Local,
        anchor: "F + (null family) has the same SVEP probes and local classifications as F",
        run: quotient_invariance,
    },
];

/// Ids of every check in execution order.
pub fn check_ids() -> Vec<(String, Suite)> {
    CHECKS.iter().map(|c| (c.id.to_string(), c.suite)).collect()
}

/// Runs the selected checks in their declared order.
pub fn run_suite(cfg: &ScenarioConfig) -> Result<ReportBundle, HarnessError> {
    cfg.validate()?;
    let records = CHECKS
        .iter()
        .filter(|c| cfg.suites.contains(&c.suite))
        .filter(|c| cfg.only.as_deref().is_none_or(|id| id == c.id))
        .map(|c| {
            let out = (c.run)(cfg);
            let (verdict, note) = out.verdict();
            CheckRecord {
                id: c.id.to_string(),
                suite: c.suite,
                anchor: c.anchor.to_string(),
                instance: out.instance,
                verdict,
                numerics: out.numerics,
                note,
                repro: (verdict == CheckVerdict::Fail).then(|| cfg.repro(c.suite, c.id)),
            }
        })
        .collect();
    Ok(ReportBundle {
        config: cfg.clone(),
        records,
    })
}

// ---------------------------------------------------------------- helpers

fn dim_for(cfg: &ScenarioConfig, k: usize, cap: usize) -> usize {
    let top = cfg.dim.min(cap);
    2 + k % (top - 1)
}

fn covering_rect(radius: f64) -> Rect {
    Rect::centered(1.1 * radius + 0.25).expect("positive half-width")
}

/// Same set of points up to `tol`, ignoring order and repeats.
fn same_points(a: &[C64], b: &[C64], tol: f64) -> bool {
    let covered = |xs: &[C64], ys: &[C64]| xs.iter().all(|x| ys.iter().any(|y| (x - y).norm() <= tol));
    covered(a, b) && covered(b, a)
}

fn fmt_points(pts: &[C64]) -> String {
    let parts: Vec<String> = pts.iter().map(|z| format!("{:.4}{:+.4}i", z.re, z.im)).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Cluster centres repeated by multiplicity, sorted.
fn cluster_multiset(a: &CMatrix) -> Result<Vec<C64>, String> {
    let dec = spectral_decomp(a, DEFECTIVE_CLUSTER_TOL).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for cl in &dec.clusters {
        out.extend(std::iter::repeat_n(cl.center, cl.multiplicity));
    }
    Ok(sorted(out))
}

fn sorted(mut v: Vec<C64>) -> Vec<C64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

fn multiset_gap(a: &[C64], b: &[C64]) -> f64 {
    crate::linalg::multiset_distance(a, b)
}

fn cells_of(grid: &RegionGrid, pts: &[C64]) -> Option<BTreeSet<usize>> {
    pts.iter().map(|&z| grid.cell_index(z)).collect()
}

fn spectrum_cells(grid: &RegionGrid) -> BTreeSet<usize> {
    grid.indices_of(PointClass::Spectrum).into_iter().collect()
}

/// Cells on which two grids disagree with both classes determined.
fn determined_disagreements(a: &RegionGrid, b: &RegionGrid) -> (usize, usize) {
    let mut differ = 0;
    let mut undetermined = 0;
    for (x, y) in a.cells.iter().zip(&b.cells) {
        if x.class == PointClass::Undetermined || y.class == PointClass::Undetermined {
            undetermined += 1;
        } else if x.class != y.class {
            differ += 1;
        }
    }
    (differ, undetermined)
}

fn random_region(rng: &mut impl Rng, half: f64) -> Region {
    let atom = |rng: &mut dyn rand::RngCore| {
        let c = C64::new(rng.gen_range(-half..half), rng.gen_range(-half..half));
        if rng.gen_bool(0.5) {
            Region::disc(c, rng.gen_range(0.2..1.5))
        } else {
            let (w, h) = (rng.gen_range(0.2..1.5), rng.gen_range(0.2..1.5));
            Region::Rect(Rect::new(c.re - w, c.re + w, c.im - h, c.im + h).expect("positive sides"))
        }
    };
    match rng.gen_range(0..4) {
        0 | 1 => atom(rng),
        2 => Region::Union(vec![atom(rng), atom(rng)]),
        _ => Region::Inter(vec![atom(rng), atom(rng)]),
    }
}

fn radius_bound(f: &OperatorFamily, cfg: &ScenarioConfig) -> Result<f64, String> {
    spectral_radius_bound(f, &cfg.grid, crate::local::MEMBER_RADIUS_ORDER)
        .map(|r| r.value)
        .map_err(|e| e.to_string())
        .and_then(|v| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err("spectral radius bound overflowed".into())
            }
        })
}

/// Random points of `rect` classified Resolvent for `ctx`.
fn resolvent_points(rng: &mut impl Rng, ctx: &ProbeContext, rect: &Rect, n: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..1000 {
        if out.len() == n {
            break;
        }
        let z = C64::new(
            rng.gen_range(rect.re_min..rect.re_max),
            rng.gen_range(rect.im_min..rect.im_max),
        );
        if ctx.probe(z).classification == PointClass::Resolvent {
            out.push(z);
        }
    }
    out
}

fn solve_at(f: &OperatorFamily, h: f64, lambda: C64, x: &CVector) -> CVector {
    match Lu::factor(&f.eval(h).shifted_from(lambda)) {
        Ok(lu) => lu.solve(x),
        Err(_) => CVector::zeros(x.dim()),
    }
}

/// Families and vectors shared by the family-level local checks: certified
/// null-difference families, commuting local-shift pairs and constant
/// diagonalizable matrices, five vectors each.
struct LocalCase {
    label: String,
    f: OperatorFamily,
    xs: Vec<CVector>,
}

fn local_pool(cfg: &ScenarioConfig, stream: u64) -> Vec<LocalCase> {
    let mut rng = rng_for(cfg.seed, stream);
    let mut out = Vec::new();
    for k in 0..6 {
        let d = dim_for(cfg, k, 6);
        let p = generate_pair(
            PairKind::NullDifference,
            cfg.seed.wrapping_add(stream * 100 + k as u64),
            d,
        )
        .expect("valid dimension");
        let xs = (0..5).map(|_| random_vector(&mut rng, d)).collect();
        out.push(LocalCase {
            label: format!("null-difference#{k} d={d}"),
            f: p.f,
            xs,
        });
    }
    for k in 0..4 {
        let d = dim_for(cfg, k + 1, 6);
        let p = generate_pair(
            PairKind::LocalShift,
            cfg.seed.wrapping_add(stream * 100 + 50 + k as u64),
            d,
        )
        .expect("valid dimension");
        let xs: Vec<CVector> = (0..5).map(|_| random_vector(&mut rng, d)).collect();
        out.push(LocalCase {
            label: format!("local-shift-g#{k} d={d}"),
            f: p.g,
            xs,
        });
    }
    for k in 0..6 {
        let d = dim_for(cfg, k, 6);
        let ks = random_diagonalizable(&mut rng, d, 0.5);
        let xs = (0..5).map(|_| random_supported_vector(&mut rng, &ks)).collect();
        out.push(LocalCase {
            label: format!("diagonalizable#{k} d={d}"),
            f: OperatorFamily::constant(ks.matrix),
            xs,
        });
    }
    out
}

/// Local grid context over a rectangle covering the radius bound.
fn local_context(cfg: &ScenarioConfig, f: &OperatorFamily, res: usize) -> Result<(LocalGridContext, f64), String> {
    let radius = radius_bound(f, cfg)?;
    let rect = covering_rect(radius);
    LocalGridContext::new(f, &rect, res, res, &cfg.grid, &cfg.local_params())
        .map(|c| (c, radius))
        .map_err(|e| e.to_string())
}

// ----------------------------------------------------------------- bracket

fn recurrence_vs_binomial(cfg: &ScenarioConfig) -> Outcome {
    let mut out = Outcome::new("200 random 4x4 complex pairs, orders 1..=12");
    let mut rng = rng_for(cfg.seed, 1);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let t = random_matrix(&mut rng, 4);
        let s = random_matrix(&mut rng, 4);
        for n in 1..=12 {
            let (Some(b), Some(r)) = (
                out.ok(bracket(&t, &s, n), "bracket"),
                out.ok(bracket_binomial(&t, &s, n), "sum"),
            ) else {
                continue;
            };
            let denom = r.norm().max(f64::MIN_POSITIVE);
            worst = worst.max((&b - &r).norm() / denom);
        }
    }
    out.num("max_rel_err", worst);
    out.expect(worst <= 1e-8, || format!("relative error {worst:.3e} exceeds 1e-8"));
    out
}

fn check_qn_pair(out: &mut Outcome, cfg: &ScenarioConfig, t: &CMatrix, s: &CMatrix, oracle: &[C64], label: &str) {
    if let Some(rep) = out.ok(qn_equivalent(t, s, &cfg.qn), label) {
        out.expect(rep.verdict == Verdict::Equivalent, || {
            format!("{label}: verdict {} (final root {:.3e})", rep.verdict, rep.final_root)
        });
    }
    let oracle = sorted(oracle.to_vec());
    for (name, m) in [("T", t), ("S", s)] {
        match cluster_multiset(m) {
            Ok(ms) => {
                let gap = multiset_gap(&ms, &oracle);
                out.expect(gap <= 1e-7, || {
                    format!("{label}: eigenvalues of {name} off by {gap:.3e}")
                });
            }
            Err(e) => out.fail(format!("{label}: {e}")),
        }
    }
}

fn check_local_pair(
    out: &mut Outcome,
    cfg: &ScenarioConfig,
    t: &CMatrix,
    s: &CMatrix,
    x: &CVector,
    oracle: &[C64],
    label: &str,
) {
    let lt = out.ok(
        local_spectrum_exact_with(t, x, cfg.tol_loc, DEFECTIVE_CLUSTER_TOL),
        label,
    );
    let ls = out.ok(
        local_spectrum_exact_with(s, x, cfg.tol_loc, DEFECTIVE_CLUSTER_TOL),
        label,
    );
    if let (Some(lt), Some(ls)) = (lt, ls) {
        let (pt, ps) = (lt.points(), ls.points());
        out.expect(same_points(&pt, &ps, 1e-7) && same_points(&pt, oracle, 1e-7), || {
            format!(
                "{label}: Sp_T(x) = {}, Sp_S(x) = {}, expected {}",
                fmt_points(&pt),
                fmt_points(&ps),
                fmt_points(oracle)
            )
        });
    }
}

fn scalar_vs_jordan(cfg: &ScenarioConfig) -> Outcome {
    let mut out = Outcome::new("T = 2I_3, S = J_3(2); 20 random x");
    let Some(p) = out.ok(generate_pair(PairKind::ScalarVsJordan, cfg.seed, 3), "generate") else {
        return out;
    };
    let (t, s) = (p.f.eval(1.0), p.g.eval(1.0));
    let two = C64::new(2.0, 0.0);
    check_qn_pair(&mut out, cfg, &t, &s, &[two; 3], "pair");
    if let Some(pair) = out.ok(bracket_seq(&t, &s, cfg.qn.n_max), "roots") {
        out.num("rho_1", pair.forward.roots[0]);
        out.num("rho_2", pair.forward.roots[1]);
        out.expect(pair.forward.zero_from == Some(3), || {
            format!("bracket should vanish from n = 3, got {:?}", pair.forward.zero_from)
        });
    }
    let mut rng = rng_for(cfg.seed, 2);
    for k in 0..20 {
        let x = random_vector(&mut rng, 3);
        check_local_pair(&mut out, cfg, &t, &s, &x, &[two], &format!("x#{k}"));
    }
    out
}

fn commuting_nilpotent_pairs(cfg: &ScenarioConfig) -> Outcome {
    let mut out = Outcome::new("20 pairs (A, A+N), AN = NA, N nilpotent, d <= 6; 20 random x each");
    let mut rng = rng_for(cfg.seed, 3);
    let mut worst_root: f64 = 0.0;
    for k in 0..20 {
        let d = dim_for(cfg, k, 6);
        let cn = commuting_nilpotent(&mut rng, d);
        let s = &cn.a + &cn.n;
        let label = format!("pair#{k} d={d}");
        check_qn_pair(&mut out, cfg, &cn.a, &s, &cn.eigenvalues, &label);
        if let Ok(rep) = qn_equivalent(&cn.a, &s, &cfg.qn) {
            worst_root = worst_root.max(rep.final_root);
        }
        for j in 0..20 {
            let x = cn.random_vector(&mut rng);
            let oracle = cn.support(&x);
            check_local_pair(&mut out, cfg, &cn.a, &s, &x, &oracle, &format!("{label} x#{j}"));
        }
    }
    out.num("max_final_root", worst_root);
    out
}

fn non_equivalent(cfg: &ScenarioConfig) -> Outcome {
    let mut out = Outcome::new("T = diag(0,1), S = diag(0,2), n <= 40");
    let Some(p) = out.ok(generate_pair(PairKind::NonEquivalent, cfg.seed, 2), "generate") else {
        return out;
    };
    let (t, s) = (p.f.eval(1.0), p.g.eval(1.0));
    if let Some(rep) = out.ok(qn_equivalent(&t, &s, &cfg.qn), "root test") {
        out.expect(rep.verdict == Verdict::NotEquivalent, || {
            format!("verdict {}", rep.verdict)
        });
        let roots: Vec<f64> = rep.forward_roots.iter().chain(&rep.backward_roots).copied().collect();
        let lo = roots.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = roots.iter().copied().fold(0.0, f64::max);
        out.num("min_root", lo);
        out.num("max_root", hi);
        out.expect(lo >= 0.999 && hi <= 1.001, || format!("roots span [{lo}, {hi}]"));
    }
    out
}

fn reflexive_and_shift(cfg: &ScenarioConfig) -> Outcome {
    let mut out =
        Outcome::new("20 random T: (T, T) and (T, T + cI) with |c| in [0.5, 1.5], roots compared for n <= 10");
    let mut rng = rng_for(cfg.seed, 4);
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let d = dim_for(cfg, k, 6);
        let t = random_matrix(&mut rng, d);
        let c = C64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..std::f64::consts::TAU));
        if let Some(rep) = out.ok(qn_equivalent(&t, &t, &cfg.qn), "reflexive") {
            out.expect(rep.verdict == Verdict::Equivalent, || {
                format!("T#{k} vs itself: {}", rep.verdict)
            });
        }
        let shifted = &t + &CMatrix::scalar(d, c);
        if let Some(rep) = out.ok(qn_equivalent(&t, &shifted, &cfg.qn), "shift") {
            // Roundoff in the recurrence grows like the eigenvalue spread to
            // the power n, so exact roots are compared on the early orders.
            let dev = rep
                .forward_roots
                .iter()
                .take(SHIFT_EXACT_ORDERS)
                .map(|r| (r - c.norm()).abs() / c.norm())
                .fold(0.0, f64::max);
            worst = worst.max(dev);
            out.expect(rep.verdict == Verdict::NotEquivalent && dev <= 1e-6, || {
                format!("T#{k} vs T+cI: {} with relative root deviation {dev:.3e}", rep.verdict)
            });
        }
    }
    out.num("max_rel_root_dev", worst);
    out
}

// ------------------------------------------------------------------ family

fn quotient_sandwich(cfg: &ScenarioConfig) -> Outcome {
    let mut out = Outcome::new("100 catalog families (50 constant), plus (1 + exp(-1/h)) I");
    let mut rng = rng_for(cfg.seed, 5);
    let mut worst_const: f64 = 0.0;
    let mut worst_order: f64 = f64::NEG_INFINITY;
    for k in 0..100 {
        let d = dim_for(cfg, k, 8);
        let f = if k % 2 == 0 {
            OperatorFamily::constant(random_matrix(&mut rng, d))
        } else {
            random_catalog_family(&mut rng, d, 2)
        };
        let b = quotient_norm_bounds(&f, &cfg.grid);
        worst_order = worst_order.max(b.lower - b.upper);
        out.expect(b.lower <= b.upper, || {
            format!("family#{k}: lower {} > upper {}", b.lower, b.upper)
        });
        if k % 2 == 0 {
            let gap = b.upper - b.lower;
            worst_const = worst_const.max(gap);
            out.expect(gap <= 1e-7, || {
                format!("constant family#{k}: bounds differ by {gap:.3e}")
            });
        }
    }
    out.num("max_lower_minus_upper", worst_order);
    out.num("max_constant_gap", worst_const);
    let example = OperatorFamily::identity(2)
        .with_term(CoeffFn::exp_inv(1.0).expect("valid"), CMatrix::identity(2))
        .expect("same dimension");
    let b = quotient_norm_bounds(&example, &cfg.grid);
    out.num("example_lower", b.lower);
    out.num("example_upper", b.upper);
    out.num("example_raw_upper", b.raw_upper);
    out.expect((b.lower - 1.0).abs() <= 1e-12 && (b.upper - 1.0).abs() <= 1e-12, || {
        format!("(1 + exp(-1/h)) I: bounds ({}, {})", b.lower, b.upper)
    });
    out
}

fn null_difference(cfg: &ScenarioConfig) -> Outcome {
    let mut out = Outcome::new("30 null-difference, 10 h-perturbation, 10 exp-null pairs; non-equivalent control");
    let p = TailParams::default();
    let kinds = [
        (PairKind::NullDifference, 30),
        (PairKind::HPerturbation, 10),
        (PairKind::ExpNull, 10),
    ];
    let mut worst: f64 = 0.0;
    for (kind, count) in kinds {
        for k in 0..count {
            let d = dim_for(cfg, k, 8);
            let Some(pair) = out.ok(generate_pair(kind, cfg.seed.wrapping_add(k as u64), d), "generate") else {
                continue;
            };
            if let Some(s) = out.ok(asymptotically_equivalent(&pair.f, &pair.g, &cfg.grid, &p), "null test") {
                worst = worst.max(s.tail_max);
                out.expect(s.to_zero() && s.certificate == Some(true), || {
                    format!("{kind}#{k}: {} with certificate {:?}", s.limit_verdict, s.certificate)
                });
            }
        }
    }
    out.num("max_tail_difference", worst);
    if let Ok(pair) = generate_pair(PairKind::NonEquivalent, cfg.seed, 2) {
        if let Some(s) = out.ok(asymptotically_equivalent(&pair.f, &pair.g, &cfg.grid, &p), "control") {
            out.expect(!s.to_zero(), || "non-equivalent control judged null".into());
        }
    }
    out
}

fn commuting_asym_qn(cfg: &ScenarioConfig) -> Outcome {
    let mut out = Outcome::new("20 local-shift pairs (A + hA^2, B + hB^2), B = A + N; non-equivalent control");
    let p = TailParams::default();
    for k in 0..20 {
        let d = dim_for(cfg, k, 6);
        let Some(pair) = out.ok(
            generate_pair(PairKind::LocalShift, cfg.seed.wrapping_add(k as u64), d),
            "generate",
        ) else {
            continue;
        };
        if let Some(s) = out.ok(commute_in_limit(&pair.f, &pair.g, &cfg.grid, &p), "commutator") {
            out.expect(s.to_zero(), || format!("pair#{k}: commutator {}", s.limit_verdict));
        }
        if let Some(rep) = out.ok(
            asym_qn_equivalent(&pair.f, &pair.g, &cfg.grid, &cfg.qn, &p),
            "root test",
        ) {
            out.expect(rep.verdict == Verdict::Equivalent, || {
                format!("pair#{k}: {}", rep.verdict)
            });
        }
    }
    if let Ok(pair) = generate_pair(PairKind::NonEquivalent, cfg.seed, 2) {
        if let Some(rep) = out.ok(asym_qn_equivalent(&pair.f, &pair.g, &cfg.grid, &cfg.qn, &p), "control") {
            out.expect(rep.verdict == Verdict::NotEquivalent, || {
                format!("control: {}", rep.verdict)
            });
        }
    }
    out
}

// ----------------------------------------------------------------- spectra

fn constant_oracle(cfg: &ScenarioConfig) -> Outcome {
    let mut out = Outcome::new("50 constant diagonalizable families, d <= 6, 64x64 grid covering the radius bound");
    let mut rng = rng_for(cfg.seed, 6);
    let (mut spectrum_cells_total, mut undetermined) = (0, 0);
    for k in 0..50 {
        let d = dim_for(cfg, k, 6);
        let ks = random_diagonalizable(&mut rng, d, 0.3);
        let f = OperatorFamily::constant(ks.matrix.clone());
        let label = format!("instance#{k} d={d}");
        let radius = match radius_bound(&f, cfg) {
            Ok(r) => r,
            Err(e) => {
                out.fail(format!("{label}: {e}"));
                continue;
            }
        };
        let rect = covering_rect(radius);
        let Some(grid) = out.ok(family_spectrum_grid(&f, &rect, 64, 64, &cfg.grid), &label) else {
            continue;
        };
        let Some(eig_cells) = cells_of(&grid, &ks.eigenvalues) else {
            out.fail(format!("{label}: an eigenvalue lies outside the rectangle"));
            continue;
        };
        let near = |k: usize| eig_cells.iter().any(|&e| grid.adjacent(k, e));
        let s_cells = spectrum_cells(&grid);
        spectrum_cells_total += s_cells.len();
        undetermined += grid.count(PointClass::Undetermined);
        let stray: Vec<usize> = s_cells.iter().copied().filter(|&k| !near(k)).collect();
        let missed: Vec<usize> = eig_cells
            .iter()
            .copied()
            .filter(|&e| !s_cells.iter().any(|&s| grid.adjacent(s, e)))
            .collect();
        let stray_u = grid
            .indices_of(PointClass::Undetermined)
            .into_iter()
            .filter(|&k| !near(k))
            .count();
        out.expect(stray.is_empty() && missed.is_empty() && stray_u == 0, || {
            format!(
                "{label}: {} stray spectrum cells, {} eigenvalue cells missed, {stray_u} stray undetermined cells",
                stray.len(),
                missed.len()
            )
        });
    }
    out.int("spectrum_cells", spectrum_cells_total);
    out.int("undetermined_cells", undetermined);
    out
}

fn sqrt_family(cfg: &ScenarioConfig) -> Outcome {
    let mut out = Outcome::new("F(h) = [[0,1],[h,0]] on a 128x128 grid over [-2,2]^2");
    let f = OperatorFamily::constant(CMatrix::shift(2))
        .with_term(
            CoeffFn::pow(1.0).expect("valid"),
            CMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]),
        )
        .expect("same dimension");
    let rect = Rect::centered(2.0).expect("valid");
    if let Some(grid) = out.ok(family_spectrum_grid(&f, &rect, 128, 128, &cfg.grid), "grid") {
        let s = grid.indices_of(PointClass::Spectrum);
        let origin = grid.cell_index(C64::new(0.0, 0.0));
        out.int("spectrum_cells", s.len());
        out.int("undetermined_cells", grid.count(PointClass::Undetermined));
        out.expect(origin.is_some_and(|o| s == vec![o]), || {
            format!("spectrum cells {:?}, expected only the cell of 0", s)
        });
    }
    let h = cfg.grid.smallest();
    if let Some(eigs) = out.ok(eigenvalues(&f.eval(h)), "eigenvalues") {
        let smallest = eigs.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        out.num("min_abs_eigenvalue_at_h_min", smallest);
        out.expect(smallest > 0.0, || "per-h eigenvalues should be nonzero".into());
    }
    if let Some(rb) = out.ok(spectral_radius_bound(&f, &cfg.grid, 40), "radius bound") {
        out.num("radius_bound", rb.value);
        out.expect(rb.value <= 1e-3, || {
            format!("radius bound {:.3e} exceeds 1e-3", rb.value)
        });
    }
    out
}

fn resolvent_identity(cfg: &ScenarioConfig) -> Outcome {
    let mut out = Outcome::new("50 triples (F, l, m): catalog F, l and m classified Resolvent");
    let mut rng = rng_for(cfg.seed, 7);
    let params = SpectraParams {
        delta_res: cfg.delta_res,
        ..SpectraParams::default()
    };
    let (mut worst, mut worst_unique) = (0.0f64, 0.0f64);
    let mut done = 0;
    let mut attempts = 0;
    while done < 50 && attempts < 200 {
        attempts += 1;
        let d = dim_for(cfg, attempts, 6);
        let f = random_catalog_family(&mut rng, d, 1);
        let Some(ctx) = out.ok(ProbeContext::new(&f, &cfg.grid, &params), "context") else {
            continue;
        };
        let rect = covering_rect(ctx.norm_max);
        let pts = resolvent_points(&mut rng, &ctx, &rect, 2);
        if pts.len() < 2 {
            continue;
        }
        done += 1;
        let (l, m) = (pts[0], pts[1]);
        if let Some(s) = out.ok(resolvent_identity_residual(&f, l, m, &cfg.grid), "identity") {
            worst = worst.max(s.tail_max);
            out.expect(s.to_zero() && s.tail_max <= 1e-8, || {
                format!(
                    "triple#{done}: identity residual {} tail max {:.3e}",
                    s.limit_verdict, s.tail_max
                )
            });
        }
        let w = random_matrix(&mut rng, d);
        let (f1, f2) = (f.clone(), f.clone());
        let r1 = FnFamily::new(d, move |h| inverse_at(&f1, h, l));
        let r2 = FnFamily::new(d, move |h| &inverse_at(&f2, h, l) + &w.scale_real(h));
        if let Some(u) = out.ok(resolvent_uniqueness_residual(&f, l, &r1, &r2, &cfg.grid), "uniqueness") {
            worst_unique = worst_unique.max(u.stats.tail_max);
            out.expect(u.precondition_ok && u.stats.to_zero(), || {
                format!(
                    "triple#{done}: uniqueness {} ({})",
                    u.stats.limit_verdict, u.diagnostics
                )
            });
        }
    }
    out.expect(done == 50, || format!("only {done} triples with two resolvent points"));
    out.int("triples", done);
    out.num("max_identity_tail", worst);
    out.num("max_uniqueness_tail", worst_unique);
    out
}

fn inverse_at(f: &OperatorFamily, h: f64, lambda: C64) -> CMatrix {
    let a = f.eval(h).shifted_from(lambda);
    match Lu::factor(&a) {
        Ok(lu) => lu.inverse(),
        Err(_) => CMatrix::scalar(a.dim(), C64::new(f64::INFINITY, 0.0)),
    }
}

fn null_invariance(cfg: &ScenarioConfig) -> Outcome {
    let mut out = Outcome::new("30 null-difference pairs (F, F + exp(-1/h) B), 64x64 grids");
    let (mut undetermined, mut cells, mut differ) = (0, 0, 0);
    for k in 0..30 {
        let d = dim_for(cfg, k, 6);
        let Some(pair) = out.ok(
            generate_pair(PairKind::NullDifference, cfg.seed.wrapping_add(1000 + k as u64), d),
            "generate",
        ) else {
            continue;
        };
        let radius = match radius_bound(&pair.f, cfg) {
            Ok(r) => r,
            Err(e) => {
                out.fail(format!("pair#{k}: {e}"));
                continue;
            }
        };
        let rect = covering_rect(radius);
        if let Some(rep) = out.ok(
            class_invariance_check(&pair.f, &pair.g, &rect, 64, 64, &cfg.grid),
            "grids",
        ) {
            undetermined += rep.undetermined;
            cells += rep.grid_f.cells.len();
            differ += rep.disagreements.len();
            out.expect(rep.disagreements.is_empty(), || {
                format!("pair#{k}: {} cells differ", rep.disagreements.len())
            });
            out.expect(rep.undetermined_fraction() < 0.01, || {
                format!("pair#{k}: undetermined fraction {:.4}", rep.undetermined_fraction())
            });
        }
    }
    out.int("differing_cells", differ);
    out.int("undetermined_cells", undetermined);
    out.num("undetermined_fraction", undetermined as f64 / cells.max(1) as f64);
    out
}

// ------------------------------------------------------------------- local

fn local_oracle(cfg: &ScenarioConfig) -> Outcome {
    let mut out = Outcome::new("100 constant diagonalizable families (gap >= 0.5), one x each, 64x64 grid");
    let mut rng = rng_for(cfg.seed, 8);
    let (mut undetermined, mut support_total) = (0, 0);
    for k in 0..100 {
        let d = dim_for(cfg, k, 6);
        let ks = random_diagonalizable(&mut rng, d, 0.5);
        let x = random_supported_vector(&mut rng, &ks);
        let f = OperatorFamily::constant(ks.matrix.clone());
        let label = format!("instance#{k} d={d}");
        let (lctx, _) = match local_context(cfg, &f, 64) {
            Ok(c) => c,
            Err(e) => {
                out.fail(format!("{label}: {e}"));
                continue;
            }
        };
        let Some(grid) = out.ok(lctx.local_grid(&x), &label) else {
            continue;
        };
        let oracle = ks.support(&x, cfg.tol_loc);
        support_total += oracle.len();
        let Some(exact) = out.ok(
            local_spectrum_exact_with(&ks.matrix, &x, cfg.tol_loc, DEFECTIVE_CLUSTER_TOL),
            &label,
        ) else {
            continue;
        };
        out.expect(same_points(&exact.points(), &oracle, 1e-7), || {
            format!(
                "{label}: exact support {} vs oracle {}",
                fmt_points(&exact.points()),
                fmt_points(&oracle)
            )
        });
        undetermined += grid.count(PointClass::Undetermined);
        let want = cells_of(&grid, &oracle);
        out.expect(want.as_ref() == Some(&spectrum_cells(&grid)), || {
            format!(
                "{label}: local spectrum cells {:?} vs oracle cells {:?}",
                spectrum_cells(&grid),
                want
            )
        });
        out.expect(grid.count(PointClass::Undetermined) == 0, || {
            format!("{label}: {} undetermined cells", grid.count(PointClass::Undetermined))
        });
    }
    out.int("support_points", support_total);
    out.int("undetermined_cells", undetermined);
    out
}

fn commuting_qn_agreement(cfg: &ScenarioConfig) -> Outcome {
    let mut out = Outcome::new(format!(
        "20 local-shift pairs, 20 x and 10 region descriptors each, {LOCAL_RES}x{LOCAL_RES} grids"
    ));
    let mut rng = rng_for(cfg.seed, 9);
    let (mut undetermined, mut cells, mut member_checks) = (0, 0, 0);
    for k in 0..20 {
        let d = dim_for(cfg, k, 6);
        let cn = commuting_nilpotent(&mut rng, d);
        let b = &cn.a + &cn.n;
        let lin = CoeffFn::pow(1.0).expect("valid");
        let f = OperatorFamily::constant(cn.a.clone())
            .with_term(lin.clone(), &cn.a * &cn.a)
            .expect("same dimension");
        let g = OperatorFamily::constant(b.clone())
            .with_term(lin, &b * &b)
            .expect("same dimension");
        let label = format!("pair#{k} d={d}");
        let radius = match radius_bound(&f, cfg).and_then(|rf| radius_bound(&g, cfg).map(|rg| rf.max(rg))) {
            Ok(r) => r,
            Err(e) => {
                out.fail(format!("{label}: {e}"));
                continue;
            }
        };
        let rect = covering_rect(radius);
        let lp = cfg.local_params();
        let ctxs = LocalGridContext::new(&f, &rect, LOCAL_RES, LOCAL_RES, &cfg.grid, &lp)
            .and_then(|cf| LocalGridContext::new(&g, &rect, LOCAL_RES, LOCAL_RES, &cfg.grid, &lp).map(|cg| (cf, cg)));
        let Some((cf, cg)) = out.ok(ctxs, &label) else {
            continue;
        };
        let regions: Vec<Region> = (0..10).map(|_| random_region(&mut rng, rect.re_max)).collect();
        for j in 0..20 {
            let x = if j % 2 == 0 {
                cn.random_vector(&mut rng)
            } else {
                random_vector(&mut rng, d)
            };
            let (Some(gf), Some(gg)) = (out.ok(cf.local_grid(&x), &label), out.ok(cg.local_grid(&x), &label)) else {
                continue;
            };
            let (differ, und) = determined_disagreements(&gf, &gg);
            undetermined += und;
            cells += gf.cells.len();
            out.expect(differ == 0, || format!("{label} x#{j}: {differ} cells differ"));
            let oracle = cells_of(&gf, &cn.support(&x));
            out.expect(oracle.as_ref() == Some(&spectrum_cells(&gf)), || {
                format!("{label} x#{j}: local spectrum cells differ from the block support")
            });
            for (r, a) in regions.iter().enumerate() {
                let (mf, mg) = (member_from_grid(&gf, a), member_from_grid(&gg, a));
                member_checks += 1;
                if mf.inconclusive || mg.inconclusive {
                    out.inconclusive(format!("{label} x#{j} region#{r}: undetermined cells outside {a}"));
                } else {
                    out.expect(mf.member == mg.member, || {
                        format!("{label} x#{j}: membership in {a} differs")
                    });
                }
            }
        }
    }
    out.int("membership_queries", member_checks);
    out.int("undetermined_cells", undetermined);
    out.num("undetermined_fraction", undetermined as f64 / cells.max(1) as f64);
    out
}

/// Runs `body` on every local grid of the shared pool and enforces the
/// undetermined budget of 2% of probed cells.
fn over_local_pool(
    cfg: &ScenarioConfig,
    stream: u64,
    out: &mut Outcome,
    mut body: impl FnMut(&mut Outcome, &LocalCase, &LocalGridContext, f64, &CVector, &RegionGrid, &mut ChaCha8Rng),
) {
    let mut rng = rng_for(cfg.seed, stream + 1);
    let (mut undetermined, mut cells) = (0, 0);
    for case in local_pool(cfg, stream) {
        let (lctx, radius) = match local_context(cfg, &case.f, LOCAL_RES) {
            Ok(c) => c,
            Err(e) => {
                out.fail(format!("{}: {e}", case.label));
                continue;
            }
        };
        for x in &case.xs {
            let Some(grid) = out.ok(lctx.local_grid(x), &case.label) else {
                continue;
            };
            undetermined += grid.count(PointClass::Undetermined);
            cells += grid.cells.len();
            body(out, &case, &lctx, radius, x, &grid, &mut rng);
        }
    }
    let frac = undetermined as f64 / cells.max(1) as f64;
    out.int("probed_cells", cells);
    out.num("undetermined_fraction", frac);
    out.expect(frac < 0.02, || {
        format!("undetermined fraction {frac:.4} is not below 0.02")
    });
}

const POOL_DESC: &str =
    "6 null-difference families, 4 local-shift families, 6 constant diagonalizable families; 5 x each";

fn local_inclusion(cfg: &ScenarioConfig) -> Outcome {
    let mut out = Outcome::new(format!("{POOL_DESC}; {LOCAL_RES}x{LOCAL_RES} grids"));
    let mut violations = 0;
    over_local_pool(cfg, 20, &mut out, |out, case, lctx, _, _, grid, _| {
        let v = lctx.inclusion_violations(grid);
        violations += v.len();
        out.expect(v.is_empty(), || {
            format!("{}: local spectrum cells {:?} are resolvent cells", case.label, v)
        });
    });
    out.int("violations", violations);
    out
}

fn local_truncation(cfg: &ScenarioConfig) -> Outcome {
    let mut out = Outcome::new(format!(
        "{POOL_DESC}; 10 regions each, truncated to the radius-bound disc"
    ));
    let mut queries = 0;
    over_local_pool(cfg, 22, &mut out, |out, case, _, radius, _, grid, rng| {
        for _ in 0..10 {
            let a = random_region(rng, grid.rect.re_max);
            // Cell centres of spectral cells lie within one cell diagonal of
            // the spectral radius bound.
            let disc = Region::disc(C64::new(0.0, 0.0), radius + grid.cell_diag());
            let truncated = a.intersect(disc);
            let (m1, m2) = (member_from_grid(grid, &a), member_from_grid(grid, &truncated));
            queries += 1;
            out.expect(m1.member == m2.member, || {
                format!("{}: membership in {a} changes when truncated", case.label)
            });
        }
    });
    out.int("queries", queries);
    out
}

fn extension_uniqueness(cfg: &ScenarioConfig) -> Outcome {
    let mut out = Outcome::new(format!(
        "{POOL_DESC}; y_h = x_h + h w on 6 resolvent points, control y_h = x_h + w"
    ));
    let mut worst: f64 = 0.0;
    let mut controls = 0;
    over_local_pool(cfg, 24, &mut out, |out, case, lctx, _, x, grid, rng| {
        let mesh = resolvent_points(rng, &lctx.ctx, &grid.rect, 6);
        if mesh.len() < 6 {
            out.fail(format!("{}: too few resolvent points", case.label));
            return;
        }
        let d = x.dim();
        let w = random_vector(rng, d);
        let (f1, f2, f3) = (case.f.clone(), case.f.clone(), case.f.clone());
        let (x1, x2, x3) = (x.clone(), x.clone(), x.clone());
        let (w2, w3) = (w.clone(), w);
        let xs = FnWitness::new("x_h", d, move |h, l| solve_at(&f1, h, l, &x1));
        let ys = FnWitness::new("x_h + h w", d, move |h, l| {
            &solve_at(&f2, h, l, &x2) + &w2.scale(C64::new(h, 0.0))
        });
        let bad = FnWitness::new("x_h + w", d, move |h, l| &solve_at(&f3, h, l, &x3) + &w3);
        if let Some(s) = out.ok(
            local_extension_uniqueness_check(&case.f, x, &xs, &ys, &mesh, &cfg.grid),
            &case.label,
        ) {
            worst = worst.max(s.tail_max);
            out.expect(s.to_zero(), || {
                format!("{}: difference {}", case.label, s.limit_verdict)
            });
        }
        controls += 1;
        out.expect(
            local_extension_uniqueness_check(&case.f, x, &xs, &bad, &mesh, &cfg.grid).is_err(),
            || format!("{}: shifted control passed the residual precondition", case.label),
        );
    });
    out.num("max_difference_tail", worst);
    out.int("controls_rejected", controls);
    out
}

fn equivalence_invariance(cfg: &ScenarioConfig) -> Outcome {
    let mut out = Outcome::new(format!(
        "20 null-difference pairs, 5 x each, {LOCAL_RES}x{LOCAL_RES} grids"
    ));
    let mut rng = rng_for(cfg.seed, 26);
    let (mut undetermined, mut cells) = (0, 0);
    for k in 0..20 {
        let d = dim_for(cfg, k, 6);
        let Some(pair) = out.ok(
            generate_pair(PairKind::NullDifference, cfg.seed.wrapping_add(2000 + k as u64), d),
            "generate",
        ) else {
            continue;
        };
        let label = format!("pair#{k} d={d}");
        let radius = match radius_bound(&pair.f, cfg) {
            Ok(r) => r,
            Err(e) => {
                out.fail(format!("{label}: {e}"));
                continue;
            }
        };
        let rect = covering_rect(radius);
        let lp = cfg.local_params();
        let ctxs = LocalGridContext::new(&pair.f, &rect, LOCAL_RES, LOCAL_RES, &cfg.grid, &lp).and_then(|cf| {
            LocalGridContext::new(&pair.g, &rect, LOCAL_RES, LOCAL_RES, &cfg.grid, &lp).map(|cg| (cf, cg))
        });
        let Some((cf, cg)) = out.ok(ctxs, &label) else {
            continue;
        };
        for j in 0..5 {
            let x = random_vector(&mut rng, d);
            let (Some(gf), Some(gg)) = (out.ok(cf.local_grid(&x), &label), out.ok(cg.local_grid(&x), &label)) else {
                continue;
            };
            let (differ, und) = determined_disagreements(&gf, &gg);
            undetermined += gf.count(PointClass::Undetermined) + gg.count(PointClass::Undetermined);
            cells += 2 * gf.cells.len();
            let _ = und;
            out.expect(differ == 0, || format!("{label} x#{j}: {differ} cells differ"));
        }
    }
    let frac = undetermined as f64 / cells.max(1) as f64;
    out.int("probed_cells", cells);
    out.num("undetermined_fraction", frac);
    out.expect(frac < 0.02, || {
        format!("undetermined fraction {frac:.4} is not below 0.02")
    });
    out
}

fn monotone_membership(cfg: &ScenarioConfig) -> Outcome {
    let mut out = Outcome::new(format!("{POOL_DESC}; 10 pairs a, b = a union c each"));
    let mut queries = 0;
    over_local_pool(cfg, 28, &mut out, |out, case, _, _, _, grid, rng| {
        for _ in 0..10 {
            let a = random_region(rng, grid.rect.re_max);
            let b = Region::Union(vec![a.clone(), random_region(rng, grid.rect.re_max)]);
            let (ma, mb) = (member_from_grid(grid, &a), member_from_grid(grid, &b));
            queries += 1;
            out.expect(!ma.member || mb.member, || {
                format!("{}: member of {a} but not of {b}", case.label)
            });
        }
    });
    out.int("queries", queries);
    out
}

fn linearity(cfg: &ScenarioConfig) -> Outcome {
    let mut out = Outcome::new(format!(
        "exact: 50 diagonalizable matrices; family: 20 diagonalizable and null-difference families, {LOCAL_RES}x{LOCAL_RES}"
    ));
    let mut rng = rng_for(cfg.seed, 30);
    for k in 0..50 {
        let d = dim_for(cfg, k, 6);
        let ks = random_diagonalizable(&mut rng, d, 0.5);
        let x = random_supported_vector(&mut rng, &ks);
        let y = random_supported_vector(&mut rng, &ks);
        let (a, b) = (
            crate::harness::random_entry(&mut rng),
            crate::harness::random_entry(&mut rng),
        );
        let z = &x.scale(a) + &y.scale(b);
        let sp = |v: &CVector| local_spectrum_exact_with(&ks.matrix, v, cfg.tol_loc, DEFECTIVE_CLUSTER_TOL);
        if let (Ok(sx), Ok(sy), Ok(sz)) = (sp(&x), sp(&y), sp(&z)) {
            let mut union = sx.points();
            union.extend(sy.points());
            out.expect(
                sz.points().iter().all(|p| union.iter().any(|q| (p - q).norm() <= 1e-7)),
                || format!("exact#{k}: Sp(ax+by) not contained in the union"),
            );
        } else {
            out.fail(format!("exact#{k}: decomposition failed"));
        }
    }
    let mut undetermined = 0;
    for k in 0..20 {
        let d = dim_for(cfg, k, 6);
        let f = if k % 2 == 0 {
            OperatorFamily::constant(random_diagonalizable(&mut rng, d, 0.5).matrix)
        } else {
            match generate_pair(PairKind::NullDifference, cfg.seed.wrapping_add(3000 + k as u64), d) {
                Ok(p) => p.g,
                Err(e) => {
                    out.fail(e.to_string());
                    continue;
                }
            }
        };
        let label = format!("family#{k} d={d}");
        let (lctx, _) = match local_context(cfg, &f, LOCAL_RES) {
            Ok(c) => c,
            Err(e) => {
                out.fail(format!("{label}: {e}"));
                continue;
            }
        };
        let x = random_vector(&mut rng, d);
        let y = random_vector(&mut rng, d);
        let (a, b) = (
            crate::harness::random_entry(&mut rng),
            crate::harness::random_entry(&mut rng),
        );
        let z = &x.scale(a) + &y.scale(b);
        let grids = [&x, &y, &z].map(|v| lctx.local_grid(v));
        let [Ok(gx), Ok(gy), Ok(gz)] = grids else {
            out.fail(format!("{label}: grid failed"));
            continue;
        };
        undetermined += gz.count(PointClass::Undetermined);
        let bad: Vec<usize> = gz
            .indices_of(PointClass::Spectrum)
            .into_iter()
            .filter(|&k| gx.cells[k].class == PointClass::Resolvent && gy.cells[k].class == PointClass::Resolvent)
            .collect();
        out.expect(bad.is_empty(), || {
            format!("{label}: cells {bad:?} outside both supports")
        });
    }
    out.int("undetermined_cells", undetermined);
    out
}

/// Random witnesses: decaying multiples of constant vectors or of local
/// solutions, constant vectors, and undamped local solutions.
fn random_witnesses(rng: &mut impl Rng, f: &OperatorFamily, n: usize) -> Vec<FnWitness> {
    let d = f.dim();
    (0..n)
        .map(|k| {
            let v = random_vector(rng, d);
            let c = random_decaying_coeff(rng);
            let fam = f.clone();
            match k % 4 {
                0 => FnWitness::new(format!("{c} * v"), d, move |h, _| v.scale(C64::new(c.eval(h), 0.0))),
                1 => FnWitness::new("v", d, move |_, _| v.clone()),
                2 => FnWitness::new(format!("{c} * R v"), d, move |h, l| {
                    solve_at(&fam, h, l, &v).scale(C64::new(c.eval(h), 0.0))
                }),
                _ => FnWitness::new("R v", d, move |h, l| solve_at(&fam, h, l, &v)),
            }
        })
        .collect()
}

fn svep_unfalsified(cfg: &ScenarioConfig) -> Outcome {
    let mut out = Outcome::new("10 catalog families, 100 random witnesses each, 8 resolvent mesh points");
    let mut rng = rng_for(cfg.seed, 32);
    let (mut witnesses, mut residual_null) = (0, 0);
    for k in 0..10 {
        let d = dim_for(cfg, k, 6);
        let f = random_catalog_family(&mut rng, d, 2);
        let label = format!("family#{k} d={d}");
        let Some(ctx) = out.ok(ProbeContext::new(&f, &cfg.grid, &SpectraParams::default()), &label) else {
            continue;
        };
        let mesh = resolvent_points(&mut rng, &ctx, &covering_rect(ctx.norm_max), 8);
        let ws = random_witnesses(&mut rng, &f, 100);
        let refs: Vec<&dyn Witness> = ws.iter().map(|w| w as &dyn Witness).collect();
        if let Some(rep) = out.ok(svep_falsification_probe(&f, &refs, &mesh, &cfg.grid), &label) {
            witnesses += rep.records.len();
            residual_null += rep.records.iter().filter(|r| r.residual_to_zero).count();
            out.expect(!rep.falsified(), || format!("{label}: {}", rep.verdict()));
        }
    }
    out.int("witnesses", witnesses);
    out.int("residual_to_zero", residual_null);
    out
}

fn quotient_invariance(cfg: &ScenarioConfig) -> Outcome {
    let mut out = Outcome::new("10 null-difference pairs, 40 random witnesses each, 8 resolvent mesh points");
    let mut rng = rng_for(cfg.seed, 34);
    for k in 0..10 {
        let d = dim_for(cfg, k, 6);
        let Some(pair) = out.ok(
            generate_pair(PairKind::NullDifference, cfg.seed.wrapping_add(4000 + k as u64), d),
            "generate",
        ) else {
            continue;
        };
        let label = format!("pair#{k} d={d}");
        let Some(ctx) = out.ok(ProbeContext::new(&pair.f, &cfg.grid, &SpectraParams::default()), &label) else {
            continue;
        };
        let mesh = resolvent_points(&mut rng, &ctx, &covering_rect(ctx.norm_max), 8);
        let ws = random_witnesses(&mut rng, &pair.f, 40);
        let refs: Vec<&dyn Witness> = ws.iter().map(|w| w as &dyn Witness).collect();
        let rf = out.ok(svep_falsification_probe(&pair.f, &refs, &mesh, &cfg.grid), &label);
        let rg = out.ok(svep_falsification_probe(&pair.g, &refs, &mesh, &cfg.grid), &label);
        if let (Some(rf), Some(rg)) = (rf, rg) {
            out.expect(rf == rg, || format!("{label}: probe records differ"));
        }
    }
    out
}
