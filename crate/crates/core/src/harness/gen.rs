//! Seeded instance generators.
//!
//! Matrix entries are drawn uniformly from the complex square
//! `[−0.5, 0.5] × [−0.5, 0.5]i`. Constructions that need a known spectrum
//! are built from their eigen-decomposition, so eigenvalues and spectral
//! projections are known by construction.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::family::{CoeffFn, OperatorFamily};
use crate::linalg::{op_norm, sigma_min, CMatrix, CVector, Lu, C64};

use super::HarnessError;

/// Largest condition number accepted for a random similarity.
pub const MAX_COND: f64 = 10.0;

/// Deterministic generator for `(seed, stream)`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn random_entry(rng: &mut impl Rng) -> C64 {
    C64::new(rng.gen_range(-0.5..=0.5), rng.gen_range(-0.5..=0.5))
}

pub fn random_matrix(rng: &mut impl Rng, d: usize) -> CMatrix {
    CMatrix::from_fn(d, |_, _| random_entry(rng))
}

pub fn random_vector(rng: &mut impl Rng, d: usize) -> CVector {
    CVector::new((0..d).map(|_| random_entry(rng)).collect()).expect("finite entries")
}

/// `I + M` with random `M`, redrawn until its condition number is at most
/// [`MAX_COND`].
pub fn random_similarity(rng: &mut impl Rng, d: usize) -> (CMatrix, CMatrix) {
    loop {
        let v = &CMatrix::identity(d) + &random_matrix(rng, d);
        if matches!((op_norm(&v), sigma_min(&v)), (Ok(n), Ok(m)) if n <= MAX_COND * m) {
            if let Ok(lu) = Lu::factor(&v) {
                let inv = lu.inverse();
                return (v, inv);
            }
        }
    }
}

/// `k` points in the disc `|z| ≤ radius`, pairwise at least `gap` apart.
pub fn separated_points(rng: &mut impl Rng, k: usize, radius: f64, gap: f64) -> Vec<C64> {
    let mut pts: Vec<C64> = Vec::with_capacity(k);
    let mut attempts = 0usize;
    while pts.len() < k {
        attempts += 1;
        if attempts > 10_000 {
            pts.clear();
            attempts = 0;
        }
        let z = C64::from_polar(
            radius * rng.gen::<f64>().sqrt(),
            rng.gen_range(0.0..std::f64::consts::TAU),
        );
        if pts.iter().all(|p| (p - z).norm() >= gap) {
            pts.push(z);
        }
    }
    pts
}

/// Diagonalizable matrix with a known spectrum.
#[derive(Clone, Debug)]
pub struct KnownSpectrum {
    pub matrix: CMatrix,
    pub eigenvalues: Vec<C64>,
    /// Eigenvector basis: column `i` belongs to `eigenvalues[i]`.
    pub basis: CMatrix,
    pub basis_inv: CMatrix,
}

impl KnownSpectrum {
    /// Vector `Σ_i c_i v_i`.
    pub fn combine(&self, coeffs: &[C64]) -> CVector {
        self.basis.mul_vec(&CVector::new(coeffs.to_vec()).expect("finite"))
    }

    /// Exact support of `x`: eigenvalues whose eigen-coordinate exceeds
    /// `tol·‖x‖`.
    pub fn support(&self, x: &CVector, tol: f64) -> Vec<C64> {
        let coords = self.basis_inv.mul_vec(x);
        let xn = x.norm();
        let mut out: Vec<C64> = Vec::new();
        for (i, c) in coords.as_slice().iter().enumerate() {
            let col = self.basis.column(i).norm();
            let lambda = self.eigenvalues[i];
            if c.norm() * col > tol * xn && !out.contains(&lambda) {
                out.push(lambda);
            }
        }
        out
    }
}

/// Random diagonalizable `d × d` matrix with distinct eigenvalues in the
/// disc of radius 2, pairwise at least `gap` apart.
pub fn random_diagonalizable(rng: &mut impl Rng, d: usize, gap: f64) -> KnownSpectrum {
    let eigenvalues = separated_points(rng, d, 2.0, gap);
    let (v, vinv) = random_similarity(rng, d);
    let matrix = &(&v * &CMatrix::from_diag(&eigenvalues)) * &vinv;
    KnownSpectrum {
        matrix,
        eigenvalues,
        basis: v,
        basis_inv: vinv,
    }
}

/// Vector whose eigen-coordinates are either zero or of modulus in
/// `[0.5, 1]`, with at least one nonzero.
pub fn random_supported_vector(rng: &mut impl Rng, ks: &KnownSpectrum) -> CVector {
    let d = ks.eigenvalues.len();
    loop {
        let coeffs: Vec<C64> = (0..d)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    C64::from_polar(rng.gen_range(0.5..=1.0), rng.gen_range(0.0..std::f64::consts::TAU))
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        if coeffs.iter().any(|c| c.norm() > 0.0) {
            return ks.combine(&coeffs);
        }
    }
}

/// Commuting pair `A = P diag(λ_i I_{k_i}) Pᵀ` and `N = P blockdiag(U_i) Pᵀ`
/// with strictly upper triangular `U_i` and a random permutation `P`.
///
/// Only exact similarities are used: with a general similarity the rounding
/// in entries coupling different eigenvalues grows like `|λ_i − λ_j|^n`
/// under the bracket recurrence, and the computed `(A − (A+N))^[n]` no
/// longer vanishes.
#[derive(Clone, Debug)]
pub struct CommutingNilpotent {
    pub a: CMatrix,
    pub n: CMatrix,
    /// Eigenvalues of `A` (and of `A + N`) with multiplicity.
    pub eigenvalues: Vec<C64>,
    /// Distinct eigenvalues and the coordinates spanning their blocks.
    pub blocks: Vec<(C64, Vec<usize>)>,
}

impl CommutingNilpotent {
    /// Exact support of `x`: blocks on which `x` has a nonzero coordinate.
    pub fn support(&self, x: &CVector) -> Vec<C64> {
        self.blocks
            .iter()
            .filter(|(_, idx)| idx.iter().any(|&i| x.as_slice()[i].norm() > 0.0))
            .map(|(l, _)| *l)
            .collect()
    }

    /// Random vector supported on a random nonempty subset of the blocks.
    pub fn random_vector(&self, rng: &mut impl Rng) -> CVector {
        let d = self.eigenvalues.len();
        loop {
            let mut v = vec![C64::new(0.0, 0.0); d];
            for (_, idx) in &self.blocks {
                if rng.gen_bool(0.5) {
                    for &i in idx {
                        v[i] = random_entry(rng);
                    }
                }
            }
            if v.iter().any(|z| z.norm() > 0.0) {
                return CVector::new(v).expect("finite");
            }
        }
    }
}

pub fn commuting_nilpotent(rng: &mut impl Rng, d: usize) -> CommutingNilpotent {
    let mut sizes = Vec::new();
    let mut left = d;
    while left > 0 {
        let s = rng.gen_range(1..=left.min(3));
        sizes.push(s);
        left -= s;
    }
    if sizes.iter().all(|&s| s == 1) && d >= 2 {
        sizes = vec![2];
        sizes.extend(std::iter::repeat_n(1, d - 2));
    }
    sizes.shuffle(rng);
    let centers = separated_points(rng, sizes.len(), 2.0, 0.5);
    let mut perm: Vec<usize> = (0..d).collect();
    perm.shuffle(rng);
    let mut a = CMatrix::zeros(d);
    let mut n = CMatrix::zeros(d);
    let mut eigenvalues = vec![C64::new(0.0, 0.0); d];
    let mut blocks = Vec::new();
    let mut start = 0;
    for (&s, &lambda) in sizes.iter().zip(&centers) {
        for i in start..start + s {
            a[(perm[i], perm[i])] = lambda;
            eigenvalues[perm[i]] = lambda;
            for j in i + 1..start + s {
                n[(perm[i], perm[j])] = random_entry(rng);
            }
        }
        blocks.push((lambda, (start..start + s).map(|i| perm[i]).collect()));
        start += s;
    }
    CommutingNilpotent {
        a,
        n,
        eigenvalues,
        blocks,
    }
}

/// Catalog coefficient that tends to zero, chosen at random.
pub fn random_decaying_coeff(rng: &mut impl Rng) -> CoeffFn {
    match rng.gen_range(0..5) {
        0 => CoeffFn::pow(0.5),
        1 => CoeffFn::pow(1.0),
        2 => CoeffFn::pow(2.0),
        3 => CoeffFn::exp_inv(rng.gen_range(0.5..2.0)),
        _ => CoeffFn::pow_exp(1.0, 1.0),
    }
    .expect("valid catalog parameters")
}

/// `A₀ + Σ_k c_k(h) A_k` with `terms` decaying catalog terms.
pub fn random_catalog_family(rng: &mut impl Rng, d: usize, terms: usize) -> OperatorFamily {
    let mut f = OperatorFamily::constant(random_matrix(rng, d));
    for _ in 0..terms {
        let c = random_decaying_coeff(rng);
        f = f.with_term(c, random_matrix(rng, d)).expect("matching dimensions");
    }
    f
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairKind {
    NullDifference,
    HPerturbation,
    CommutingNilpotent,
    ScalarVsJordan,
    NonEquivalent,
    ExpNull,
    LocalShift,
}

impl PairKind {
    pub const ALL: [PairKind; 7] = [
        PairKind::NullDifference,
        PairKind::HPerturbation,
        PairKind::CommutingNilpotent,
        PairKind::ScalarVsJordan,
        PairKind::NonEquivalent,
        PairKind::ExpNull,
        PairKind::LocalShift,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PairKind::NullDifference => "null-difference",
            PairKind::HPerturbation => "h-perturbation",
            PairKind::CommutingNilpotent => "commuting-nilpotent",
            PairKind::ScalarVsJordan => "scalar-vs-jordan",
            PairKind::NonEquivalent => "non-equivalent",
            PairKind::ExpNull => "exp-null",
            PairKind::LocalShift => "local-shift",
        }
    }

    fn stream(self) -> u64 {
        1000 + self as u64
    }
}

impl fmt::Display for PairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PairKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PairKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| HarnessError::UnknownKind(s.to_string()))
    }
}

/// Relation a generated pair has by construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `F − G` is a certified null family.
    AsymptoticallyEquivalent,
    /// Constant pair with commuting difference that is nilpotent.
    QuasinilpotentEquivalent,
    /// Limits commute and their difference is nilpotent.
    CommutingAsymQnEquivalent,
    /// Constant pair with `‖(T−S)^[n]‖^{1/n} ≡ 1`.
    NotEquivalent,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::AsymptoticallyEquivalent => "asymptotically-equivalent",
            Relation::QuasinilpotentEquivalent => "quasinilpotent-equivalent",
            Relation::CommutingAsymQnEquivalent => "commuting-asymptotically-qn-equivalent",
            Relation::NotEquivalent => "not-equivalent",
        })
    }
}

#[derive(Clone, Debug)]
pub struct GeneratedPair {
    pub kind: PairKind,
    pub f: OperatorFamily,
    pub g: OperatorFamily,
    pub relation: Relation,
}

/// Deterministic pair of the given kind:
///
/// - `null-difference`: `(F, F + e^{−1/h}B)` with random catalog `F`
/// - `h-perturbation`: `(A, A + hB)`
/// - `commuting-nilpotent`: `(A, A + N)` with `AN = NA`, `N` nilpotent
/// - `scalar-vs-jordan`: `(2I, J_d(2))`
/// - `non-equivalent`: `(diag(0,1,0,…), diag(0,2,0,…))`
/// - `exp-null`: `((1 + e^{−1/h})A, A)`
/// - `local-shift`: `(A + hA², (A+N) + h(A+N)²)` with `A`, `N` as above
pub fn generate_pair(kind: PairKind, seed: u64, dim: usize) -> Result<GeneratedPair, HarnessError> {
    if !(2..=8).contains(&dim) {
        return Err(HarnessError::InvalidConfig(format!(
            "dimension must be in 2..=8, got {dim}"
        )));
    }
    let mut rng = rng_for(seed, kind.stream());
    let d = dim;
    let exp1 = || CoeffFn::exp_inv(1.0).expect("valid");
    let lin = || CoeffFn::pow(1.0).expect("valid");
    let (f, g, relation) = match kind {
        PairKind::NullDifference => {
            let f = random_catalog_family(&mut rng, d, 1);
            let g = f.clone().with_term(exp1(), random_matrix(&mut rng, d))?;
            (f, g, Relation::AsymptoticallyEquivalent)
        }
        PairKind::HPerturbation => {
            let a = random_matrix(&mut rng, d);
            let f = OperatorFamily::constant(a.clone());
            let g = OperatorFamily::constant(a).with_term(lin(), random_matrix(&mut rng, d))?;
            (f, g, Relation::AsymptoticallyEquivalent)
        }
        PairKind::CommutingNilpotent => {
            let cn = commuting_nilpotent(&mut rng, d);
            (
                OperatorFamily::constant(cn.a.clone()),
                OperatorFamily::constant(&cn.a + &cn.n),
                Relation::QuasinilpotentEquivalent,
            )
        }
        PairKind::ScalarVsJordan => {
            let two = C64::new(2.0, 0.0);
            (
                OperatorFamily::constant(CMatrix::scalar(d, two)),
                OperatorFamily::constant(CMatrix::jordan(two, d)),
                Relation::QuasinilpotentEquivalent,
            )
        }
        PairKind::NonEquivalent => {
            let mut t = vec![0.0; d];
            let mut s = vec![0.0; d];
            t[1] = 1.0;
            s[1] = 2.0;
            (
                OperatorFamily::constant(CMatrix::from_real_diag(&t)),
                OperatorFamily::constant(CMatrix::from_real_diag(&s)),
                Relation::NotEquivalent,
            )
        }
        PairKind::ExpNull => {
            let a = random_matrix(&mut rng, d);
            let f = OperatorFamily::constant(a.clone()).with_term(exp1(), a.clone())?;
            (f, OperatorFamily::constant(a), Relation::AsymptoticallyEquivalent)
        }
        PairKind::LocalShift => {
            let cn = commuting_nilpotent(&mut rng, d);
            let b = &cn.a + &cn.n;
            let f = OperatorFamily::constant(cn.a.clone()).with_term(lin(), &cn.a * &cn.a)?;
            let g = OperatorFamily::constant(b.clone()).with_term(lin(), &b * &b)?;
            (f, g, Relation::CommutingAsymQnEquivalent)
        }
    };
    Ok(GeneratedPair { kind, f, g, relation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn kinds_round_trip() {
        for k in PairKind::ALL {
            assert_eq!(k.name().parse::<PairKind>().unwrap(), k);
        }
        assert!(matches!("bogus".parse::<PairKind>(), Err(HarnessError::UnknownKind(_))));
    }

    #[test]
    fn generation_is_deterministic() {
        for k in PairKind::ALL {
            let a = generate_pair(k, 7, 4).unwrap();
            let b = generate_pair(k, 7, 4).unwrap();
            assert_eq!(a.f.eval(0.3), b.f.eval(0.3));
            assert_eq!(a.g.eval(0.3), b.g.eval(0.3));
        }
    }

    #[test]
    fn spec_shaped_pairs() {
        let p = generate_pair(PairKind::ScalarVsJordan, 1, 3).unwrap();
        assert_eq!(p.f.eval(0.1), CMatrix::scalar(3, c(2.0, 0.0)));
        assert_eq!(p.g.eval(0.1), CMatrix::jordan(c(2.0, 0.0), 3));
        let p = generate_pair(PairKind::NonEquivalent, 1, 2).unwrap();
        assert_eq!(p.f.eval(0.1), CMatrix::from_real_diag(&[0.0, 1.0]));
        assert_eq!(p.g.eval(0.1), CMatrix::from_real_diag(&[0.0, 2.0]));
        assert!(generate_pair(PairKind::NullDifference, 1, 9).is_err());
    }

    #[test]
    fn commuting_nilpotent_commutes() {
        let mut rng = rng_for(3, 0);
        for d in 2..=6 {
            let cn = commuting_nilpotent(&mut rng, d);
            let scale = cn.a.norm() * cn.n.norm();
            assert!(cn.a.commutator(&cn.n).norm() <= 1e-12 * scale.max(1.0));
            assert!(cn.n.pow(3).is_zero());
        }
    }

    #[test]
    fn known_spectrum_support() {
        let mut rng = rng_for(5, 0);
        let ks = random_diagonalizable(&mut rng, 4, 0.5);
        let x = ks.combine(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.5), c(0.0, 0.0)]);
        assert_eq!(ks.support(&x, 1e-8), vec![ks.eigenvalues[0], ks.eigenvalues[2]]);
    }
}
