//! Riesz projections and nilpotent parts of eigenvalue clusters.
//!
//! `P_i = (2πi)^{-1} ∮ (zI − A)^{-1} dz` over a circle around cluster `i`,
//! evaluated with the trapezoid rule. For a circle of radius `ρ` centred at
//! `c` the rule reduces to `P ≈ M^{-1} Σ_k ρ e^{iθ_k} (z_k I − A)^{-1}`.

use std::f64::consts::PI;

use super::{eigenvalues, CMatrix, LinalgError, Lu, Result, C64};

/// Quadrature nodes per contour.
pub const M_QUAD: usize = 64;
/// Tolerance for the projection identities.
pub const TOL_PROJ: f64 = 1e-7;
const MAX_RADIUS: f64 = 0.5;

#[derive(Clone, Debug)]
pub struct Cluster {
    pub center: C64,
    pub multiplicity: usize,
    pub projection: CMatrix,
    /// `(A − λ_i I) P_i`.
    pub nilpotent: CMatrix,
}

#[derive(Clone, Debug)]
pub struct SpectralDecomp {
    pub clusters: Vec<Cluster>,
    /// Minimum distance between cluster centres (`+∞` for one cluster).
    pub gap: f64,
    /// Radius of the quadrature circles.
    pub radius: f64,
}

impl SpectralDecomp {
    /// Largest violation of `ΣP = I`, `P² = P`, `P_iP_j = 0`, `N^m = 0`, in
    /// Frobenius norm.
    pub fn max_defect(&self) -> f64 {
        let d = self.clusters[0].projection.dim();
        let mut sum = CMatrix::zeros(d);
        let mut worst: f64 = 0.0;
        for (i, ci) in self.clusters.iter().enumerate() {
            sum = &sum + &ci.projection;
            let p2 = &ci.projection * &ci.projection;
            worst = worst.max((&p2 - &ci.projection).frobenius_norm());
            worst = worst.max(ci.nilpotent.pow(ci.multiplicity as u32).frobenius_norm());
            for cj in self.clusters.iter().skip(i + 1) {
                worst = worst.max((&ci.projection * &cj.projection).frobenius_norm());
            }
        }
        worst.max((&sum - &CMatrix::identity(d)).frobenius_norm())
    }

    pub fn centers(&self) -> Vec<C64> {
        self.clusters.iter().map(|c| c.center).collect()
    }
}

/// Groups eigenvalues by single linkage at distance `cluster_tol`.
fn cluster_eigenvalues(eigs: &[C64], cluster_tol: f64) -> Vec<Vec<C64>> {
    let n = eigs.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (eigs[i] - eigs[j]).norm() <= cluster_tol {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<C64>)> = Vec::new();
    for i in 0..n {
        let root = find(&mut label, i);
        match groups.iter_mut().find(|(r, _)| *r == root) {
            Some((_, g)) => g.push(eigs[i]),
            None => groups.push((root, vec![eigs[i]])),
        }
    }
    groups.into_iter().map(|(_, g)| g).collect()
}

/// Spectral decomposition with clusters merged at `cluster_tol`.
pub fn spectral_decomp(a: &CMatrix, cluster_tol: f64) -> Result<SpectralDecomp> {
    let eigs = eigenvalues(a)?;
    let groups = cluster_eigenvalues(&eigs, cluster_tol);
    let centers: Vec<C64> = groups.iter().map(|g| g.iter().sum::<C64>() / g.len() as f64).collect();
    let mut gap = f64::INFINITY;
    for i in 0..centers.len() {
        for j in (i + 1)..centers.len() {
            gap = gap.min((centers[i] - centers[j]).norm());
        }
    }
    if gap <= 4.0 * cluster_tol {
        return Err(LinalgError::DegenerateSpectrum { cluster_tol, gap });
    }
    let radius = (gap / 2.0).min(MAX_RADIUS);
    for (g, &c) in groups.iter().zip(&centers) {
        let spread = g.iter().map(|z| (z - c).norm()).fold(0.0, f64::max);
        if spread >= radius / 2.0 {
            return Err(LinalgError::DegenerateSpectrum { cluster_tol, gap });
        }
    }

    let d = a.dim();
    let mut clusters = Vec::with_capacity(groups.len());
    for &center in &centers {
        let mut p = CMatrix::zeros(d);
        for k in 0..M_QUAD {
            let theta = 2.0 * PI * (k as f64 + 0.5) / M_QUAD as f64;
            let w = C64::from_polar(radius, theta);
            let resolvent = Lu::factor(&a.shifted_from(center + w))?.inverse();
            p = &p + &resolvent.scale(w);
        }
        let projection = p.scale_real(1.0 / M_QUAD as f64);
        let multiplicity = projection.trace().re.round().max(0.0) as usize;
        let nilpotent = &a.shifted_from(center).scale_real(-1.0) * &projection;
        clusters.push(Cluster {
            center,
            multiplicity,
            projection,
            nilpotent,
        });
    }
    let total: usize = clusters.iter().map(|c| c.multiplicity).sum();
    if total != d {
        return Err(LinalgError::DegenerateSpectrum { cluster_tol, gap });
    }
    Ok(SpectralDecomp { clusters, gap, radius })
}
