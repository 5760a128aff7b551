//! Acceptance criteria, one PASS/FAIL line each. Expected values come from
//! constructions with known spectra and from small dense routines in this
//! file, not from the library under test.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use opfam::bracket::{bracket, bracket_seq, qn_equivalent, QnParams, Verdict};
use opfam::family::{
    asym_qn_equivalent, commute_in_limit, quotient_norm_bounds, CoeffFn, FnFamily, HGrid, OperatorFamily, TailParams,
};
use opfam::linalg::{eigenvalues, spectral_decomp, CMatrix, CVector, C64};
use opfam::local::{
    local_extension_uniqueness_check, local_spectrum_exact_with, member_from_grid, FnWitness, LocalGridContext,
    LocalParams, Region,
};
use opfam::spectra::{
    class_invariance_check, family_spectrum_grid, probe_resolvent, resolvent_identity_residual,
    resolvent_uniqueness_residual, spectral_radius_bound, PointClass, Rect, RegionGrid,
};

// ------------------------------------------------------------ dense oracle

type Dense = Vec<Vec<C64>>;

fn zero(d: usize) -> Dense {
    vec![vec![C64::new(0.0, 0.0); d]; d]
}

fn eye(d: usize) -> Dense {
    let mut m = zero(d);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = C64::new(1.0, 0.0);
    }
    m
}

fn mm(a: &Dense, b: &Dense) -> Dense {
    let d = a.len();
    let mut c = zero(d);
    for i in 0..d {
        for k in 0..d {
            let aik = a[i][k];
            for j in 0..d {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

fn lin(a: &Dense, s: C64, b: &Dense, t: C64) -> Dense {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x * s + y * t).collect())
        .collect()
}

fn frob(a: &Dense) -> f64 {
    a.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn to_lib(a: &Dense) -> CMatrix {
    CMatrix::from_fn(a.len(), |i, j| a[i][j])
}

fn from_lib(a: &CMatrix) -> Dense {
    (0..a.dim())
        .map(|i| (0..a.dim()).map(|j| a[(i, j)]).collect())
        .collect()
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `Σ_k (−1)^{n−k} C(n,k) T^k S^{n−k}`.
fn binomial_bracket(t: &Dense, s: &Dense, n: usize) -> Dense {
    let d = t.len();
    let mut tp = vec![eye(d)];
    let mut sp = vec![eye(d)];
    for k in 1..=n {
        tp.push(mm(&tp[k - 1], t));
        sp.push(mm(&sp[k - 1], s));
    }
    let mut sum = zero(d);
    for k in 0..=n {
        let sign = if (n - k).is_multiple_of(2) { 1.0 } else { -1.0 };
        sum = lin(
            &sum,
            C64::new(1.0, 0.0),
            &mm(&tp[k], &sp[n - k]),
            C64::new(sign * binom(n, k), 0.0),
        );
    }
    sum
}

/// Inverse of a unit upper-triangular matrix by back substitution.
fn unit_upper_inverse(v: &Dense) -> Dense {
    let d = v.len();
    let mut inv = eye(d);
    for col in 0..d {
        for i in (0..col).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for k in i + 1..=col {
                acc += v[i][k] * inv[k][col];
            }
            inv[i][col] = -acc;
        }
    }
    inv
}

/// Gauss-Jordan inverse with partial pivoting.
fn gauss_inverse(a: &Dense) -> Dense {
    let d = a.len();
    let mut m: Dense = a
        .iter()
        .zip(eye(d))
        .map(|(r, e)| r.iter().copied().chain(e).collect())
        .collect();
    for c in 0..d {
        let p = (c..d)
            .max_by(|&x, &y| m[x][c].norm().total_cmp(&m[y][c].norm()))
            .unwrap();
        m.swap(c, p);
        let piv = m[c][c];
        for v in m[c].iter_mut() {
            *v /= piv;
        }
        for r in 0..d {
            if r != c {
                let f = m[r][c];
                let row_c = m[c].clone();
                for (x, y) in m[r].iter_mut().zip(row_c) {
                    *x -= f * y;
                }
            }
        }
    }
    m.into_iter().map(|r| r[d..].to_vec()).collect()
}

/// Spectral norm by power iteration on `AᴴA`.
fn power_norm(a: &Dense) -> f64 {
    let d = a.len();
    let mut v: Vec<C64> = (0..d)
        .map(|i| C64::new(1.0 + i as f64 * 0.37, 0.1 * i as f64))
        .collect();
    let mut est = 0.0;
    for _ in 0..2000 {
        let av: Vec<C64> = (0..d).map(|i| (0..d).map(|j| a[i][j] * v[j]).sum()).collect();
        let aav: Vec<C64> = (0..d).map(|j| (0..d).map(|i| a[i][j].conj() * av[i]).sum()).collect();
        let n = aav.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 {
            return 0.0;
        }
        let next = n.sqrt();
        v = aav.into_iter().map(|z| z / n).collect();
        if (next - est).abs() <= 1e-15 * next {
            return next;
        }
        est = next;
    }
    est
}

fn entry(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))
}

fn random_dense(rng: &mut ChaCha8Rng, d: usize) -> Dense {
    (0..d).map(|_| (0..d).map(|_| entry(rng)).collect()).collect()
}

fn separated(rng: &mut ChaCha8Rng, k: usize, radius: f64, gap: f64) -> Vec<C64> {
    loop {
        let mut pts: Vec<C64> = Vec::new();
        for _ in 0..10_000 {
            if pts.len() == k {
                break;
            }
            let z = C64::from_polar(
                radius * rng.gen::<f64>().sqrt(),
                rng.gen_range(0.0..std::f64::consts::TAU),
            );
            if pts.iter().all(|p| (p - z).norm() >= gap) {
                pts.push(z);
            }
        }
        if pts.len() == k {
            return pts;
        }
    }
}

/// `A = V D V⁻¹` with `V` unit upper triangular, so `D` is the exact spectrum.
struct Diagonalizable {
    a: Dense,
    v: Dense,
    eig: Vec<C64>,
}

fn diagonalizable(rng: &mut ChaCha8Rng, d: usize, gap: f64) -> Diagonalizable {
    let eig = separated(rng, d, 2.0, gap);
    let mut v = eye(d);
    for i in 0..d {
        for j in i + 1..d {
            v[i][j] = entry(rng);
        }
    }
    let mut dv = zero(d);
    for i in 0..d {
        dv[i][i] = eig[i];
    }
    let a = mm(&mm(&v, &dv), &unit_upper_inverse(&v));
    Diagonalizable { a, v, eig }
}

/// `x = V c` with `c` vanishing off a random nonempty subset; returns `x` and
/// the eigenvalues it touches.
fn supported(rng: &mut ChaCha8Rng, dg: &Diagonalizable) -> (CVector, Vec<C64>) {
    let d = dg.eig.len();
    loop {
        let keep: Vec<bool> = (0..d).map(|_| rng.gen_bool(0.5)).collect();
        if !keep.iter().any(|&k| k) {
            continue;
        }
        let c: Vec<C64> = keep
            .iter()
            .map(|&k| {
                if k {
                    C64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..std::f64::consts::TAU))
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        let x: Vec<C64> = (0..d).map(|i| (0..d).map(|j| dg.v[i][j] * c[j]).sum()).collect();
        let support = (0..d).filter(|&i| keep[i]).map(|i| dg.eig[i]).collect();
        return (CVector::new(x).unwrap(), support);
    }
}

/// `A = P(⊕ λ_i I)Pᵀ`, `N = P(⊕ U_i)Pᵀ` with strictly upper `U_i`.
struct NilpotentPair {
    a: Dense,
    n: Dense,
    eig: Vec<C64>,
    /// Coordinates of each block after the permutation.
    blocks: Vec<(C64, Vec<usize>)>,
}

fn nilpotent_pair(rng: &mut ChaCha8Rng, d: usize) -> NilpotentPair {
    let mut sizes = Vec::new();
    let mut left = d;
    while left > 0 {
        let s = rng.gen_range(1..=left.min(3));
        sizes.push(s);
        left -= s;
    }
    if sizes.iter().all(|&s| s == 1) {
        sizes = vec![2];
        sizes.extend(std::iter::repeat_n(1, d - 2));
    }
    let centers = separated(rng, sizes.len(), 2.0, 0.5);
    let mut perm: Vec<usize> = (0..d).collect();
    perm.shuffle(rng);
    let (mut a, mut n) = (zero(d), zero(d));
    let mut eig = Vec::new();
    let mut blocks = Vec::new();
    let mut start = 0;
    for (&s, &c) in sizes.iter().zip(&centers) {
        let idx: Vec<usize> = (start..start + s).map(|k| perm[k]).collect();
        for (p, &i) in idx.iter().enumerate() {
            a[i][i] = c;
            for &j in &idx[p + 1..] {
                n[i][j] = C64::new(rng.gen_range(0.2..0.8), rng.gen_range(-0.3..0.3));
            }
        }
        eig.extend(std::iter::repeat_n(c, s));
        blocks.push((c, idx));
        start += s;
    }
    NilpotentPair { a, n, eig, blocks }
}

impl NilpotentPair {
    fn vector(&self, rng: &mut ChaCha8Rng) -> (CVector, Vec<C64>) {
        let d = self.a.len();
        loop {
            let mut x = vec![C64::new(0.0, 0.0); d];
            let mut support = Vec::new();
            for (c, idx) in &self.blocks {
                if rng.gen_bool(0.5) {
                    for &i in idx {
                        x[i] = entry(rng);
                    }
                    support.push(*c);
                }
            }
            if !support.is_empty() {
                return (CVector::new(x).unwrap(), support);
            }
        }
    }
}

fn random_x(rng: &mut ChaCha8Rng, d: usize) -> CVector {
    CVector::new((0..d).map(|_| entry(rng)).collect()).unwrap()
}

fn same_points(a: &[C64], b: &[C64], tol: f64) -> bool {
    let cov = |x: &[C64], y: &[C64]| x.iter().all(|p| y.iter().any(|q| (p - q).norm() <= tol));
    cov(a, b) && cov(b, a)
}

fn sorted(mut v: Vec<C64>) -> Vec<C64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    v
}

/// Largest pointwise distance between two sorted multisets.
fn sorted_gap(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    sorted(a.to_vec())
        .iter()
        .zip(sorted(b.to_vec()))
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn cluster_multiset(a: &Dense) -> Vec<C64> {
    let dec = spectral_decomp(&to_lib(a), 1e-3).expect("separated clusters");
    dec.clusters
        .iter()
        .flat_map(|c| std::iter::repeat_n(c.center, c.multiplicity))
        .collect()
}

fn covering(radius: f64) -> Rect {
    Rect::centered(1.1 * radius + 0.25).unwrap()
}

fn cells_of(grid: &RegionGrid, pts: &[C64]) -> BTreeSet<usize> {
    pts.iter()
        .map(|&z| grid.cell_index(z).expect("inside the rectangle"))
        .collect()
}

fn spectrum_cells(grid: &RegionGrid) -> BTreeSet<usize> {
    grid.indices_of(PointClass::Spectrum).into_iter().collect()
}

fn random_region(rng: &mut ChaCha8Rng, half: f64) -> Region {
    let atom = |rng: &mut ChaCha8Rng| {
        let c = C64::new(rng.gen_range(-half..half), rng.gen_range(-half..half));
        if rng.gen_bool(0.5) {
            Region::disc(c, rng.gen_range(0.2..1.5))
        } else {
            let (w, h) = (rng.gen_range(0.2..1.5), rng.gen_range(0.2..1.5));
            Region::Rect(Rect::new(c.re - w, c.re + w, c.im - h, c.im + h).unwrap())
        }
    };
    match rng.gen_range(0..4) {
        0 | 1 => atom(rng),
        2 => Region::Union(vec![atom(rng), atom(rng)]),
        _ => Region::Inter(vec![atom(rng), atom(rng)]),
    }
}

fn solve_dense(f: &OperatorFamily, h: f64, lambda: C64, x: &CVector) -> CVector {
    let m = from_lib(&f.eval(h).shifted_from(lambda));
    let inv = gauss_inverse(&m);
    let d = x.dim();
    CVector::new((0..d).map(|i| (0..d).map(|j| inv[i][j] * x[j]).sum()).collect()).unwrap()
}

// ---------------------------------------------------------------- criteria

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(t: Instant, budget: Duration) -> bool {
    t.elapsed() <= budget
}

fn c1() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let t = random_dense(&mut rng, 4);
        let s = random_dense(&mut rng, 4);
        let (lt, ls) = (to_lib(&t), to_lib(&s));
        for n in 1..=12 {
            let rec = from_lib(&bracket(&lt, &ls, n).unwrap());
            let reference = binomial_bracket(&t, &s, n);
            let err = frob(&lin(&rec, C64::new(1.0, 0.0), &reference, C64::new(-1.0, 0.0))) / frob(&reference);
            worst = worst.max(err);
        }
    }
    let ok = worst <= 1e-8 && within(t0, Duration::from_secs(5));
    outcome(
        ok,
        format!(
            "max relative error {worst:.2e} over 200 pairs, n <= 12, {:.2?}",
            t0.elapsed()
        ),
    )
}

fn c2() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let qn = QnParams::default();
    let mut problems = Vec::new();
    let mut pairs: Vec<(String, Dense, Dense, Vec<C64>, Option<NilpotentPair>)> = Vec::new();
    let two = C64::new(2.0, 0.0);
    let mut jordan = zero(3);
    for i in 0..3 {
        jordan[i][i] = two;
        if i + 1 < 3 {
            jordan[i][i + 1] = C64::new(1.0, 0.0);
        }
    }
    pairs.push((
        "2I vs J3(2)".into(),
        lin(&eye(3), two, &eye(3), C64::new(0.0, 0.0)),
        jordan,
        vec![two; 3],
        None,
    ));
    for k in 0..20 {
        let d = 2 + k % 5;
        let p = nilpotent_pair(&mut rng, d);
        let s = lin(&p.a, C64::new(1.0, 0.0), &p.n, C64::new(1.0, 0.0));
        pairs.push((format!("pair#{k} d={d}"), p.a.clone(), s, p.eig.clone(), Some(p)));
    }
    let mut worst_eig: f64 = 0.0;
    for (label, t, s, eig, np) in &pairs {
        let rep = qn_equivalent(&to_lib(t), &to_lib(s), &qn).unwrap();
        if rep.verdict != Verdict::Equivalent {
            problems.push(format!("{label}: {}", rep.verdict));
        }
        for m in [t, s] {
            let gap = sorted_gap(&cluster_multiset(m), eig);
            worst_eig = worst_eig.max(gap);
            if gap > 1e-7 {
                problems.push(format!("{label}: eigenvalues off by {gap:.2e}"));
            }
        }
        for _ in 0..20 {
            let (x, oracle) = match np {
                Some(p) => p.vector(&mut rng),
                None => (random_x(&mut rng, 3), vec![two]),
            };
            let lt = local_spectrum_exact_with(&to_lib(t), &x, 1e-8, 1e-3).unwrap().points();
            let ls = local_spectrum_exact_with(&to_lib(s), &x, 1e-8, 1e-3).unwrap().points();
            if !same_points(&lt, &ls, 1e-7) || !same_points(&lt, &oracle, 1e-7) {
                problems.push(format!("{label}: local spectra differ"));
            }
        }
    }
    let ok = problems.is_empty() && within(t0, Duration::from_secs(30));
    outcome(
        ok,
        format!(
            "21 pairs x 20 vectors, max eigenvalue deviation {worst_eig:.2e}, {:.2?}{}",
            t0.elapsed(),
            problems.first().map(|p| format!("; {p}")).unwrap_or_default()
        ),
    )
}

fn c3() -> Outcome {
    let t = CMatrix::from_real_diag(&[0.0, 1.0]);
    let s = CMatrix::from_real_diag(&[0.0, 2.0]);
    let rep = qn_equivalent(&t, &s, &QnParams::default()).unwrap();
    let pair = bracket_seq(&t, &s, 40).unwrap();
    let roots: Vec<f64> = pair.forward.roots.iter().chain(&pair.backward.roots).copied().collect();
    let (lo, hi) = roots
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), &r| (l.min(r), h.max(r)));
    let ok = rep.verdict == Verdict::NotEquivalent && lo >= 0.999 && hi <= 1.001 && roots.len() == 80;
    outcome(
        ok,
        format!(
            "verdict {}, roots in [{lo:.6}, {hi:.6}] for n <= 40, both orders",
            rep.verdict
        ),
    )
}

fn c4() -> Outcome {
    let t0 = Instant::now();
    let g = HGrid::default();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut problems = Vec::new();
    for k in 0..50 {
        let d = 2 + k % 5;
        let dg = diagonalizable(&mut rng, d, 0.3);
        let f = OperatorFamily::constant(to_lib(&dg.a));
        let radius = dg.eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let grid = family_spectrum_grid(&f, &covering(radius), 64, 64, &g).unwrap();
        let eig_cells = cells_of(&grid, &dg.eig);
        let near = |c: usize| eig_cells.iter().any(|&e| grid.adjacent(c, e));
        let s = spectrum_cells(&grid);
        let stray = s.iter().filter(|&&c| !near(c)).count();
        let missed = eig_cells
            .iter()
            .filter(|&&e| !s.iter().any(|&c| grid.adjacent(c, e)))
            .count();
        let stray_u = grid
            .indices_of(PointClass::Undetermined)
            .into_iter()
            .filter(|&c| !near(c))
            .count();
        if stray + missed + stray_u > 0 {
            problems.push(format!(
                "instance#{k}: {stray} stray, {missed} missed, {stray_u} undetermined"
            ));
        }
    }
    let ok = problems.is_empty() && within(t0, Duration::from_secs(300));
    outcome(
        ok,
        format!(
            "50 instances, 64x64, spectrum cells within one cell of the eigenvalues, {:.2?}{}",
            t0.elapsed(),
            problems.first().map(|p| format!("; {p}")).unwrap_or_default()
        ),
    )
}

fn sqrt_family() -> OperatorFamily {
    OperatorFamily::constant(CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]))
        .with_term(
            CoeffFn::pow(1.0).unwrap(),
            CMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]),
        )
        .unwrap()
}

fn c5() -> Outcome {
    let t0 = Instant::now();
    let g = HGrid::default();
    let f = sqrt_family();
    let grid = family_spectrum_grid(&f, &Rect::centered(2.0).unwrap(), 128, 128, &g).unwrap();
    let s = spectrum_cells(&grid);
    let origin = cells_of(&grid, &[C64::new(0.0, 0.0)]);
    let h = g.smallest();
    let eig = eigenvalues(&f.eval(h)).unwrap();
    let root = h.sqrt();
    let eig_ok = sorted_gap(&eig, &[C64::new(root, 0.0), C64::new(-root, 0.0)]) <= 1e-10 && root > 0.0;
    let rb = spectral_radius_bound(&f, &g, 40).unwrap().value;
    let ok = s == origin && eig_ok && rb <= 1e-3 && within(t0, Duration::from_secs(30));
    outcome(
        ok,
        format!(
            "spectrum cells {:?} (cell of 0: {:?}), eigenvalues at h={h:.2e} are +-{root:.2e}, radius bound {rb:.2e}, {:.2?}",
            s,
            origin,
            t0.elapsed()
        ),
    )
}

fn c6() -> Outcome {
    let g = HGrid::default();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut problems = Vec::new();
    let coeffs = [
        CoeffFn::pow(0.5).unwrap(),
        CoeffFn::pow(1.0).unwrap(),
        CoeffFn::pow(2.0).unwrap(),
        CoeffFn::exp_inv(1.0).unwrap(),
    ];
    let mut worst_const: f64 = 0.0;
    for k in 0..100 {
        let d = 2 + k % 7;
        let a = random_dense(&mut rng, d);
        let f = if k % 2 == 0 {
            OperatorFamily::constant(to_lib(&a))
        } else {
            let c = coeffs[k / 2 % coeffs.len()].clone();
            OperatorFamily::constant(to_lib(&a))
                .with_term(c, to_lib(&random_dense(&mut rng, d)))
                .unwrap()
        };
        let b = quotient_norm_bounds(&f, &g);
        if b.lower > b.upper {
            problems.push(format!("family#{k}: lower > upper"));
        }
        if k % 2 == 0 {
            let exact = power_norm(&a);
            let dev = (b.upper - b.lower)
                .abs()
                .max((b.upper - exact).abs())
                .max((b.lower - exact).abs());
            worst_const = worst_const.max(dev);
            if dev > 1e-7 {
                problems.push(format!("constant family#{k}: deviation {dev:.2e}"));
            }
        }
    }
    let ex = OperatorFamily::identity(2)
        .with_term(CoeffFn::exp_inv(1.0).unwrap(), CMatrix::identity(2))
        .unwrap();
    let b = quotient_norm_bounds(&ex, &g);
    let ex_ok = (b.lower - 1.0).abs() <= 1e-12 && (b.upper - 1.0).abs() <= 1e-12;
    if !ex_ok {
        problems.push(format!("(1+exp(-1/h))I: ({}, {})", b.lower, b.upper));
    }
    outcome(
        problems.is_empty(),
        format!(
            "100 families, constant deviation {worst_const:.2e}, (1+exp(-1/h))I -> ({}, {}){}",
            b.lower,
            b.upper,
            problems.first().map(|p| format!("; {p}")).unwrap_or_default()
        ),
    )
}

fn c7() -> Outcome {
    let g = HGrid::default();
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut problems = Vec::new();
    let (mut worst, mut worst_u) = (0.0f64, 0.0f64);
    let mut triples = 0;
    while triples < 50 {
        let d = 2 + triples % 5;
        let f = OperatorFamily::constant(to_lib(&random_dense(&mut rng, d)))
            .with_term(CoeffFn::pow(1.0).unwrap(), to_lib(&random_dense(&mut rng, d)))
            .unwrap();
        let pick = |rng: &mut ChaCha8Rng| loop {
            let z = C64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            if probe_resolvent(&f, z, &g).unwrap().classification == PointClass::Resolvent {
                return z;
            }
        };
        let (l, m) = (pick(&mut rng), pick(&mut rng));
        triples += 1;
        let s = resolvent_identity_residual(&f, l, m, &g).unwrap();
        worst = worst.max(s.tail_max);
        if !s.to_zero() || s.tail_max > 1e-8 {
            problems.push(format!(
                "triple#{triples}: identity {} {:.2e}",
                s.limit_verdict, s.tail_max
            ));
        }
        let w = random_dense(&mut rng, d);
        let (f1, f2) = (f.clone(), f.clone());
        let r1 = FnFamily::new(d, move |h| {
            to_lib(&gauss_inverse(&from_lib(&f1.eval(h).shifted_from(l))))
        });
        let r2 = FnFamily::new(d, move |h| {
            let inv = gauss_inverse(&from_lib(&f2.eval(h).shifted_from(l)));
            to_lib(&lin(&inv, C64::new(1.0, 0.0), &w, C64::new(h, 0.0)))
        });
        let u = resolvent_uniqueness_residual(&f, l, &r1, &r2, &g).unwrap();
        worst_u = worst_u.max(u.stats.tail_max);
        if !u.precondition_ok || !u.stats.to_zero() || u.stats.tail_max > 1e-8 {
            problems.push(format!("triple#{triples}: uniqueness {}", u.stats.limit_verdict));
        }
    }
    outcome(
        problems.is_empty(),
        format!(
            "50 triples, identity tail max {worst:.2e}, uniqueness tail max {worst_u:.2e}{}",
            problems.first().map(|p| format!("; {p}")).unwrap_or_default()
        ),
    )
}

/// `F = A + h^p B` and `G = F + exp(−1/h) C`.
fn null_pair(rng: &mut ChaCha8Rng, d: usize) -> (OperatorFamily, OperatorFamily) {
    let f = OperatorFamily::constant(to_lib(&random_dense(rng, d)))
        .with_term(
            CoeffFn::pow(rng.gen_range(0.5..2.0)).unwrap(),
            to_lib(&random_dense(rng, d)),
        )
        .unwrap();
    let g = f
        .clone()
        .with_term(CoeffFn::exp_inv(1.0).unwrap(), to_lib(&random_dense(rng, d)))
        .unwrap();
    (f, g)
}

fn c8() -> Outcome {
    let g = HGrid::default();
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let (mut differ, mut undetermined, mut cells) = (0, 0, 0);
    let mut worst_frac: f64 = 0.0;
    for k in 0..30 {
        let (f, gg) = null_pair(&mut rng, 2 + k % 5);
        let radius = spectral_radius_bound(&f, &g, 32).unwrap().value;
        let rep = class_invariance_check(&f, &gg, &covering(radius), 64, 64, &g).unwrap();
        differ += rep.disagreements.len();
        undetermined += rep.undetermined;
        cells += rep.grid_f.cells.len();
        worst_frac = worst_frac.max(rep.undetermined_fraction());
    }
    outcome(
        differ == 0 && worst_frac < 0.01,
        format!("30 pairs, {differ} differing cells, undetermined {undetermined}/{cells} (worst pair {worst_frac:.4})"),
    )
}

fn c9() -> Outcome {
    let g = HGrid::default();
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut problems = Vec::new();
    for k in 0..100 {
        let d = 2 + k % 5;
        let dg = diagonalizable(&mut rng, d, 0.5);
        let (x, oracle) = supported(&mut rng, &dg);
        let a = to_lib(&dg.a);
        let exact = local_spectrum_exact_with(&a, &x, 1e-8, 1e-3).unwrap().points();
        let f = OperatorFamily::constant(a);
        let radius = dg.eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let lctx = LocalGridContext::new(&f, &covering(radius), 64, 64, &g, &LocalParams::default()).unwrap();
        let grid = lctx.local_grid(&x).unwrap();
        let want = cells_of(&grid, &oracle);
        if !same_points(&exact, &oracle, 1e-7) || spectrum_cells(&grid) != want || cells_of(&grid, &exact) != want {
            problems.push(format!("instance#{k}"));
        }
    }
    outcome(
        problems.is_empty(),
        format!(
            "100 instances at 64x64, {} mismatches{}",
            problems.len(),
            problems.first().map(|p| format!(" (first {p})")).unwrap_or_default()
        ),
    )
}

fn shifted_family(m: &Dense) -> OperatorFamily {
    OperatorFamily::constant(to_lib(m))
        .with_term(CoeffFn::pow(1.0).unwrap(), to_lib(&mm(m, m)))
        .unwrap()
}

fn c10() -> Outcome {
    let t0 = Instant::now();
    let g = HGrid::default();
    let tp = TailParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut problems = Vec::new();
    let (mut queries, mut skipped) = (0, 0);
    for k in 0..20 {
        let d = 2 + k % 5;
        let p = nilpotent_pair(&mut rng, d);
        let b = lin(&p.a, C64::new(1.0, 0.0), &p.n, C64::new(1.0, 0.0));
        let (f, gf) = (shifted_family(&p.a), shifted_family(&b));
        let comm = commute_in_limit(&f, &gf, &g, &tp).unwrap();
        let qn = asym_qn_equivalent(&f, &gf, &g, &QnParams::default(), &tp).unwrap();
        if !comm.to_zero() || qn.verdict != Verdict::Equivalent {
            problems.push(format!("pair#{k}: not a commuting equivalent pair"));
            continue;
        }
        let radius = p.eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let rect = covering(radius);
        let lp = LocalParams::default();
        let cf = LocalGridContext::new(&f, &rect, 32, 32, &g, &lp).unwrap();
        let cg = LocalGridContext::new(&gf, &rect, 32, 32, &g, &lp).unwrap();
        let regions: Vec<Region> = (0..10).map(|_| random_region(&mut rng, rect.re_max)).collect();
        for j in 0..20 {
            let (x, oracle) = if j % 2 == 0 {
                p.vector(&mut rng)
            } else {
                (random_x(&mut rng, d), p.blocks.iter().map(|b| b.0).collect())
            };
            let (gx, gy) = (cf.local_grid(&x).unwrap(), cg.local_grid(&x).unwrap());
            let differ = gx
                .cells
                .iter()
                .zip(&gy.cells)
                .filter(|(a, b)| {
                    a.class != b.class && a.class != PointClass::Undetermined && b.class != PointClass::Undetermined
                })
                .count();
            if differ > 0 || spectrum_cells(&gx) != cells_of(&gx, &oracle) {
                problems.push(format!(
                    "pair#{k} x#{j}: grids differ from each other or from the block support"
                ));
            }
            for a in &regions {
                let (mf, mg) = (member_from_grid(&gx, a), member_from_grid(&gy, a));
                queries += 1;
                if mf.inconclusive || mg.inconclusive {
                    skipped += 1;
                } else if mf.member != mg.member {
                    problems.push(format!("pair#{k} x#{j}: membership in {a} differs"));
                }
            }
        }
    }
    let ok = problems.is_empty() && skipped == 0 && within(t0, Duration::from_secs(600));
    outcome(
        ok,
        format!(
            "20 pairs x 20 vectors, {queries} membership queries ({skipped} inconclusive), {:.2?}{}",
            t0.elapsed(),
            problems.first().map(|p| format!("; {p}")).unwrap_or_default()
        ),
    )
}

fn c11() -> Outcome {
    let g = HGrid::default();
    let lp = LocalParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    let (mut fails, mut undetermined, mut probes) = (Vec::new(), 0usize, 0usize);
    let mut counts = [0usize; 4];
    for k in 0..12 {
        let d = 2 + k % 5;
        let (f, f_null) = match k % 3 {
            0 => null_pair(&mut rng, d),
            1 => {
                let dg = diagonalizable(&mut rng, d, 0.5);
                let f = OperatorFamily::constant(to_lib(&dg.a));
                let e = f
                    .clone()
                    .with_term(CoeffFn::exp_inv(1.0).unwrap(), to_lib(&random_dense(&mut rng, d)))
                    .unwrap();
                (f, e)
            }
            _ => {
                let p = nilpotent_pair(&mut rng, d);
                let b = lin(&p.a, C64::new(1.0, 0.0), &p.n, C64::new(1.0, 0.0));
                let f = shifted_family(&b);
                let e = f
                    .clone()
                    .with_term(CoeffFn::exp_inv(2.0).unwrap(), to_lib(&random_dense(&mut rng, d)))
                    .unwrap();
                (f, e)
            }
        };
        let radius = spectral_radius_bound(&f, &g, 32).unwrap().value;
        let rect = covering(radius);
        let cf = LocalGridContext::new(&f, &rect, 32, 32, &g, &lp).unwrap();
        let ce = LocalGridContext::new(&f_null, &rect, 32, 32, &g, &lp).unwrap();
        for j in 0..5 {
            let x = random_x(&mut rng, d);
            let (gx, ge) = (cf.local_grid(&x).unwrap(), ce.local_grid(&x).unwrap());
            for grid in [&gx, &ge] {
                undetermined += grid.count(PointClass::Undetermined);
                probes += grid.cells.len();
            }
            // (i) local spectrum cells are spectrum cells
            let viol = gx
                .indices_of(PointClass::Spectrum)
                .into_iter()
                .filter(|&c| cf.family_grid.cells[c].class == PointClass::Resolvent)
                .count();
            counts[0] += 1;
            if viol > 0 {
                fails.push(format!("(i) family#{k} x#{j}"));
            }
            // (ii) truncation to the spectral disc
            for _ in 0..5 {
                let a = random_region(&mut rng, rect.re_max);
                let t = a
                    .clone()
                    .intersect(Region::disc(C64::new(0.0, 0.0), radius + gx.cell_diag()));
                counts[1] += 1;
                if member_from_grid(&gx, &a).member != member_from_grid(&gx, &t).member {
                    fails.push(format!("(ii) family#{k} x#{j}: {a}"));
                }
            }
            // (iii) two local solutions agree in the limit
            let mesh: Vec<C64> = (0..8)
                .map(|q| C64::from_polar(radius + 0.5 + 0.1 * q as f64, q as f64 * 0.785))
                .collect();
            let w = random_x(&mut rng, d);
            let (f1, f2, x1, x2) = (f.clone(), f.clone(), x.clone(), x.clone());
            let xs = FnWitness::new("x_h", d, move |h, l| solve_dense(&f1, h, l, &x1));
            let ys = FnWitness::new("x_h + h w", d, move |h, l| {
                &solve_dense(&f2, h, l, &x2) + &w.scale(C64::new(h, 0.0))
            });
            counts[2] += 1;
            match local_extension_uniqueness_check(&f, &x, &xs, &ys, &mesh, &g) {
                Ok(s) if s.to_zero() => {}
                _ => fails.push(format!("(iii) family#{k} x#{j}")),
            }
            // (iv) equal under asymptotic equivalence
            counts[3] += 1;
            let differ = gx
                .cells
                .iter()
                .zip(&ge.cells)
                .filter(|(a, b)| {
                    a.class != b.class && a.class != PointClass::Undetermined && b.class != PointClass::Undetermined
                })
                .count();
            if differ > 0 {
                fails.push(format!("(iv) family#{k} x#{j}: {differ} cells"));
            }
        }
    }
    let frac = undetermined as f64 / probes as f64;
    outcome(
        fails.is_empty() && frac < 0.02,
        format!(
            "checks (i) {} (ii) {} (iii) {} (iv) {}, {} failures, undetermined {undetermined}/{probes} = {frac:.4}{}",
            counts[0],
            counts[1],
            counts[2],
            counts[3],
            fails.len(),
            fails.first().map(|p| format!(" (first {p})")).unwrap_or_default()
        ),
    )
}

fn c12() -> Outcome {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_opfam"))
            .args(["verify", "--seed", "42", "--machine", "--threads", threads])
            .output()
            .expect("runs the binary")
    };
    let a = run("1");
    let b = run("1");
    let c = run("4");
    let identical = a.stdout == b.stdout && a.stdout == c.stdout && !a.stdout.is_empty();
    let summary = String::from_utf8_lossy(&a.stdout)
        .lines()
        .last()
        .unwrap_or_default()
        .replace('\t', " ");
    outcome(
        identical && a.status.success(),
        format!(
            "three runs (1, 1, 4 threads) {}, exit {:?}; {summary}",
            if identical { "byte-identical" } else { "differ" },
            a.status.code()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("bracket recurrence vs binomial sum", c1),
        ("equivalent pairs share spectra and local spectra", c2),
        ("non-equivalence control", c3),
        ("constant family spectrum vs eigenvalues", c4),
        ("asymptotic pseudospectrum of [[0,1],[h,0]]", c5),
        ("quotient norm sandwich", c6),
        ("resolvent identity and uniqueness", c7),
        ("spectrum invariance under null differences", c8),
        ("local spectrum vs projection oracle", c9),
        ("commuting qn-equivalent families: local spectra and spaces", c10),
        ("local spectrum inclusion, truncation, uniqueness, invariance", c11),
        ("deterministic verification report", c12),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let out = run();
        if !out.pass {
            failed += 1;
        }
        println!(
            "{} C{:<2} {name}: {}",
            if out.pass { "PASS" } else { "FAIL" },
            k + 1,
            out.detail
        );
    }
    println!("acceptance: {} of 12 criteria pass", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
