//! Family local resolvent probes.
//!
//! At a probe point `λ` the least-residual solutions `x_h(λ)` of
//! `(λI − F(h))y = x` are computed by pseudoinverse on the tail. A point is
//! good when the residual tends to zero and `‖x_h(λ)‖` stays bounded and
//! does not grow. `λ0` is locally resolvent when `λ0` and 8 points on a
//! circle around it are good and the solutions are analytic inside the
//! circle, which is tested with the discrete Cauchy residue
//! `(1/8) Σ_k x_h(λ_k)(λ_k − λ0)`: it vanishes for analytic solutions and
//! equals the spectral projection of `x` for a pole inside.

use std::f64::consts::PI;

use crate::family::{HGrid, LimitVerdict, OperatorFamily, TailParams, TailStats};
use crate::linalg::{svd, CVector, C64};
use crate::par;
use crate::spectra::{
    cell_center, scan, spectral_radius_bound, spectrum_grid_with, PointClass, ProbeContext, Rect, RegionGrid,
    SpectraParams,
};

use super::{LocalError, Region};

const CIRCLE_POINTS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalParams {
    /// Probe radius as a fraction of the smaller cell side.
    pub radius_frac: f64,
    /// `B_max = b_max_factor·‖x‖/scale`.
    pub b_max_factor: f64,
    /// Largest residue ratio still counted as analytic.
    pub residue_tol: f64,
    /// Singular values below `pinv_cutoff·σ_max` are treated as zero.
    pub pinv_cutoff: f64,
    pub tail: TailParams,
    pub spectra: SpectraParams,
}

impl Default for LocalParams {
    fn default() -> Self {
        Self {
            radius_frac: 0.125,
            b_max_factor: 1e8,
            residue_tol: 1e-2,
            pinv_cutoff: 1e-13,
            tail: TailParams::default(),
            spectra: SpectraParams::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PointEval {
    pub lambda: C64,
    /// `‖(λI − F(h))y − x‖ / (‖λI − F(h)‖‖y‖ + ‖x‖)`.
    pub residual: TailStats,
    pub norms: TailStats,
    pub solutions: Vec<CVector>,
    pub good: bool,
    /// Residual bounded away from zero or solutions unbounded.
    pub clearly_bad: bool,
}

#[derive(Clone, Debug)]
pub struct LocalProbe {
    pub lambda0: C64,
    pub radius: f64,
    pub class: PointClass,
    pub center: Option<PointEval>,
    pub circle: Vec<PointEval>,
    /// Largest residue ratio over the tail (0 when not evaluated).
    pub residue_ratio: f64,
    /// Decided from `σ_min` alone: no eigenvalue of any tail sample within
    /// three radii, so every solution is an exact bounded inverse.
    pub shortcut: bool,
}

fn eval_point(ctx: &ProbeContext, x: &CVector, lambda: C64, p: &LocalParams) -> PointEval {
    let xn = x.norm();
    let b_max = p.b_max_factor * xn / ctx.scale;
    let mut resid: Vec<f64> = Vec::with_capacity(ctx.mats.len());
    let mut norms: Vec<f64> = Vec::with_capacity(ctx.mats.len());
    let mut solutions: Vec<CVector> = Vec::with_capacity(ctx.mats.len());
    for (k, m) in ctx.mats.iter().enumerate() {
        if k > 0 && ctx.mats[k - 1] == *m {
            resid.push(resid[k - 1]);
            norms.push(norms[k - 1]);
            solutions.push(solutions[k - 1].clone());
            continue;
        }
        let a = m.shifted_from(lambda);
        let s = svd(&a);
        let y = s.pseudo_solve(x, p.pinv_cutoff * s.s[0]);
        let r = (&a.mul_vec(&y) - x).norm();
        let yn = y.norm();
        resid.push(r / (s.s[0] * yn + xn));
        norms.push(yn);
        solutions.push(y);
    }
    let residual = TailStats::analyze(&ctx.hs, resid, ctx.hs.len(), &p.tail);
    let norm_params = p.tail.scaled(xn / ctx.scale);
    let norms = TailStats::analyze(&ctx.hs, norms, ctx.hs.len(), &norm_params);
    let bounded = norms.tail_max <= b_max;
    let good = residual.to_zero() && bounded && norms.tail_trend <= p.tail.flat_tol;
    let clearly_bad = matches!(
        residual.limit_verdict,
        LimitVerdict::BoundedPositive | LimitVerdict::Unbounded
    ) || !bounded
        || norms.limit_verdict == LimitVerdict::Unbounded;
    PointEval {
        lambda,
        residual,
        norms,
        solutions,
        good,
        clearly_bad,
    }
}

fn residue_ratio(lambda0: C64, radius: f64, circle: &[PointEval]) -> f64 {
    let tail_len = circle[0].solutions.len();
    let mut worst: f64 = 0.0;
    for t in 0..tail_len {
        let dim = circle[0].solutions[t].dim();
        let mut moment = CVector::zeros(dim);
        let mut biggest: f64 = 0.0;
        for pe in circle {
            let y = &pe.solutions[t];
            moment = &moment + &y.scale((pe.lambda - lambda0) / CIRCLE_POINTS as f64);
            biggest = biggest.max(y.norm());
        }
        if biggest > 0.0 {
            worst = worst.max(moment.norm() / (radius * biggest));
        }
    }
    worst
}

/// Probe at `λ0` with a prepared context; `sigma0` is the tail minimum of
/// `σ_min(λ0I − F(h))` if already known.
pub(crate) fn probe_with(
    ctx: &ProbeContext,
    x: &CVector,
    lambda0: C64,
    radius: f64,
    sigma0: Option<f64>,
    p: &LocalParams,
) -> LocalProbe {
    let shortcut = |class| LocalProbe {
        lambda0,
        radius,
        class,
        center: None,
        circle: Vec::new(),
        residue_ratio: 0.0,
        shortcut: true,
    };
    if x.is_zero() {
        return shortcut(PointClass::Resolvent);
    }
    let sigma = sigma0.unwrap_or_else(|| ctx.tail_sigmas(lambda0).into_iter().fold(f64::INFINITY, f64::min));
    if sigma >= 3.0 * radius + p.spectra.delta_res * ctx.scale {
        return shortcut(PointClass::Resolvent);
    }
    let center = eval_point(ctx, x, lambda0, p);
    let circle: Vec<PointEval> = (0..CIRCLE_POINTS)
        .map(|k| {
            let z = lambda0 + C64::from_polar(radius, 2.0 * PI * k as f64 / CIRCLE_POINTS as f64);
            eval_point(ctx, x, z, p)
        })
        .collect();
    let circle_good = circle.iter().all(|pe| pe.good);
    let ratio = residue_ratio(lambda0, radius, &circle);
    let class = if center.clearly_bad || (circle_good && ratio > p.residue_tol) {
        PointClass::Spectrum
    } else if center.good && circle_good {
        PointClass::Resolvent
    } else {
        PointClass::Undetermined
    };
    LocalProbe {
        lambda0,
        radius,
        class,
        center: Some(center),
        circle,
        residue_ratio: ratio,
        shortcut: false,
    }
}

/// Classifies `λ0` for `x`: `Resolvent` (locally resolvent), `Spectrum`
/// (in the local spectrum) or `Undetermined`.
pub fn family_local_probe(
    f: &OperatorFamily,
    x: &CVector,
    lambda0: C64,
    nbhd_r: f64,
    g: &HGrid,
) -> Result<LocalProbe, LocalError> {
    if !(nbhd_r > 0.0) {
        return Err(LocalError::Precondition(format!(
            "probe radius must be > 0, got {nbhd_r}"
        )));
    }
    if x.dim() != f.dim() {
        return Err(LocalError::DimensionMismatch(f.dim(), x.dim()));
    }
    let p = LocalParams::default();
    let ctx = ProbeContext::new(f, g, &p.spectra)?;
    Ok(probe_with(&ctx, x, lambda0, nbhd_r, None, &p))
}

/// Per-family data shared by local grids for many vectors: tail samples,
/// the family spectrum grid and `σ_min` at every cell centre.
#[derive(Clone, Debug)]
pub struct LocalGridContext {
    pub ctx: ProbeContext,
    pub rect: Rect,
    pub nx: usize,
    pub ny: usize,
    pub radius: f64,
    pub center_sigma: Vec<f64>,
    pub family_grid: RegionGrid,
    pub params: LocalParams,
}

impl LocalGridContext {
    pub fn new(
        f: &OperatorFamily,
        rect: &Rect,
        nx: usize,
        ny: usize,
        g: &HGrid,
        params: &LocalParams,
    ) -> Result<Self, LocalError> {
        if nx < 8 || ny < 8 {
            return Err(LocalError::Precondition(format!(
                "resolution must be at least 8x8, got {nx}x{ny}"
            )));
        }
        let ctx = ProbeContext::new(f, g, &params.spectra)?;
        let family_grid = spectrum_grid_with(&ctx, rect, nx, ny)?;
        let radius = family_grid.dx().min(family_grid.dy()) * params.radius_frac;
        let center_sigma = par::map((0..nx * ny).collect(), |k: usize| {
            let z = cell_center(rect, nx, ny, k % nx, k / nx);
            let cell = &family_grid.cells[k];
            if cell.witness == z {
                cell.min_tail_sigma
            } else {
                ctx.tail_sigmas(z).into_iter().fold(f64::INFINITY, f64::min)
            }
        });
        Ok(Self {
            ctx,
            rect: *rect,
            nx,
            ny,
            radius,
            center_sigma,
            family_grid,
            params: *params,
        })
    }

    pub fn local_grid(&self, x: &CVector) -> Result<RegionGrid, LocalError> {
        if x.dim() != self.ctx.dim() {
            return Err(LocalError::DimensionMismatch(self.ctx.dim(), x.dim()));
        }
        let (rect, nx, ny) = (&self.rect, self.nx, self.ny);
        let cells = scan(rect, nx, ny, &self.ctx.candidates, |z| {
            let cached = crate::spectra::cell_index(rect, nx, ny, z)
                .filter(|&k| cell_center(rect, nx, ny, k % nx, k / nx) == z)
                .map(|k| self.center_sigma[k]);
            let probe = probe_with(&self.ctx, x, z, self.radius, cached, &self.params);
            let sigma = cached.unwrap_or_else(|| self.ctx.tail_sigmas(z).into_iter().fold(f64::INFINITY, f64::min));
            (probe.class, sigma)
        });
        Ok(RegionGrid {
            rect: *rect,
            nx,
            ny,
            cells,
            scale: self.ctx.scale,
            compactness_downgrades: 0,
        })
    }

    /// Local spectrum cells whose family class is Resolvent.
    pub fn inclusion_violations(&self, local: &RegionGrid) -> Vec<usize> {
        local
            .indices_of(PointClass::Spectrum)
            .into_iter()
            .filter(|&k| self.family_grid.cells[k].class == PointClass::Resolvent)
            .collect()
    }
}

/// Grid of family local classifications for `x` over `rect`.
pub fn family_local_spectrum_grid(
    f: &OperatorFamily,
    x: &CVector,
    rect: &Rect,
    nx: usize,
    ny: usize,
    g: &HGrid,
) -> Result<RegionGrid, LocalError> {
    LocalGridContext::new(f, rect, nx, ny, g, &LocalParams::default())?.local_grid(x)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MembershipReport {
    pub member: bool,
    /// Some Undetermined cell lies outside the region.
    pub inconclusive: bool,
    /// Local spectrum cells whose witness lies outside the region.
    pub outside: Vec<usize>,
}

/// Membership of `x` in the local spectral space of `a`, read off a local
/// grid: every local spectrum cell's witness point must lie in `a`.
pub fn member_from_grid(grid: &RegionGrid, a: &Region) -> MembershipReport {
    let outside: Vec<usize> = grid
        .indices_of(PointClass::Spectrum)
        .into_iter()
        .filter(|&k| !a.contains(grid.cells[k].witness))
        .collect();
    let inconclusive = grid
        .cells
        .iter()
        .any(|c| c.class == PointClass::Undetermined && !a.contains(c.witness));
    MembershipReport {
        member: outside.is_empty(),
        inconclusive,
        outside,
    }
}

/// Order used for the radius bound guarding membership queries.
pub const MEMBER_RADIUS_ORDER: usize = 32;

pub fn local_spectral_space_member(
    f: &OperatorFamily,
    x: &CVector,
    a: &Region,
    rect: &Rect,
    nx: usize,
    ny: usize,
    g: &HGrid,
) -> Result<MembershipReport, LocalError> {
    let radius = spectral_radius_bound(f, g, MEMBER_RADIUS_ORDER)?.value;
    if !rect.covers_disc(radius) {
        return Err(LocalError::RectTooSmall { radius });
    }
    let grid = family_local_spectrum_grid(f, x, rect, nx, ny, g)?;
    Ok(member_from_grid(&grid, a))
}
