//! Rectangular `λ`-grids with one classification per cell.
//!
//! Cells are half-open `[re, re+dx) × [im, im+dy)` and stored row-major with
//! the imaginary index outer. A cell containing a candidate point (an
//! eigenvalue of the limit operator, or of the last sample) is probed at the
//! candidate as well as at its centre, so isolated spectral points are not
//! missed between centres.

use std::str::FromStr;

use crate::family::{HGrid, OperatorFamily};
use crate::linalg::C64;
use crate::par;

use super::{PointClass, ProbeContext, SpectraError, SpectraParams};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self, SpectraError> {
        let all_finite = [re_min, re_max, im_min, im_max].iter().all(|x| x.is_finite());
        if !all_finite || re_min >= re_max || im_min >= im_max {
            return Err(SpectraError::InvalidRect(format!(
                "need finite re_min < re_max and im_min < im_max, got {re_min}:{re_max}:{im_min}:{im_max}"
            )));
        }
        Ok(Self {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    /// Square `[−r, r]²`.
    pub fn centered(r: f64) -> Result<Self, SpectraError> {
        Self::new(-r, r, -r, r)
    }

    pub fn contains(&self, z: C64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    /// Whether the closed disc `|z| ≤ r` lies inside.
    pub fn covers_disc(&self, r: f64) -> bool {
        self.re_min <= -r && self.re_max >= r && self.im_min <= -r && self.im_max >= r
    }
}

impl FromStr for Rect {
    type Err = SpectraError;

    /// Parses `re_min:re_max:im_min:im_max`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(':')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| SpectraError::InvalidRect(format!("expected re_min:re_max:im_min:im_max, got `{s}`")))?;
        if parts.len() != 4 {
            return Err(SpectraError::InvalidRect(format!(
                "expected re_min:re_max:im_min:im_max, got `{s}`"
            )));
        }
        Self::new(parts[0], parts[1], parts[2], parts[3])
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridCell {
    pub class: PointClass,
    /// Smallest tail `σ_min` seen by the deciding probe.
    pub min_tail_sigma: f64,
    /// Point whose probe decided the class (centre or candidate).
    pub witness: C64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionGrid {
    pub rect: Rect,
    pub nx: usize,
    pub ny: usize,
    pub cells: Vec<GridCell>,
    pub scale: f64,
    /// Spectrum cells outside the norm disc, downgraded to Undetermined.
    pub compactness_downgrades: usize,
}

impl RegionGrid {
    pub fn dx(&self) -> f64 {
        (self.rect.re_max - self.rect.re_min) / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        (self.rect.im_max - self.rect.im_min) / self.ny as f64
    }

    pub fn cell_diag(&self) -> f64 {
        self.dx().hypot(self.dy())
    }

    pub fn center(&self, i: usize, j: usize) -> C64 {
        cell_center(&self.rect, self.nx, self.ny, i, j)
    }

    pub fn center_of(&self, k: usize) -> C64 {
        self.center(k % self.nx, k / self.nx)
    }

    pub fn cell_index(&self, z: C64) -> Option<usize> {
        cell_index(&self.rect, self.nx, self.ny, z)
    }

    pub fn count(&self, class: PointClass) -> usize {
        self.cells.iter().filter(|c| c.class == class).count()
    }

    pub fn indices_of(&self, class: PointClass) -> Vec<usize> {
        (0..self.cells.len())
            .filter(|&k| self.cells[k].class == class)
            .collect()
    }

    /// Whether cells `a` and `b` touch (including diagonally) or coincide.
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        let (ia, ja) = ((a % self.nx) as i64, (a / self.nx) as i64);
        let (ib, jb) = ((b % self.nx) as i64, (b / self.nx) as i64);
        (ia - ib).abs() <= 1 && (ja - jb).abs() <= 1
    }
}

pub(crate) fn cell_center(rect: &Rect, nx: usize, ny: usize, i: usize, j: usize) -> C64 {
    let dx = (rect.re_max - rect.re_min) / nx as f64;
    let dy = (rect.im_max - rect.im_min) / ny as f64;
    C64::new(rect.re_min + (i as f64 + 0.5) * dx, rect.im_min + (j as f64 + 0.5) * dy)
}

pub(crate) fn cell_index(rect: &Rect, nx: usize, ny: usize, z: C64) -> Option<usize> {
    let dx = (rect.re_max - rect.re_min) / nx as f64;
    let dy = (rect.im_max - rect.im_min) / ny as f64;
    let fi = ((z.re - rect.re_min) / dx).floor();
    let fj = ((z.im - rect.im_min) / dy).floor();
    if !(fi >= 0.0 && fj >= 0.0 && fi < nx as f64 && fj < ny as f64) {
        return None;
    }
    Some(fj as usize * nx + fi as usize)
}

/// Classifies every cell with `probe`, visiting candidate points in their
/// cells first: a candidate classified Spectrum (or Undetermined) decides
/// the cell, otherwise the centre probe does.
pub(crate) fn scan<P>(rect: &Rect, nx: usize, ny: usize, candidates: &[C64], probe: P) -> Vec<GridCell>
where
    P: Fn(C64) -> (PointClass, f64) + Sync + Send,
{
    let mut per_cell: Vec<Vec<C64>> = vec![Vec::new(); nx * ny];
    for &z in candidates {
        if let Some(k) = cell_index(rect, nx, ny, z) {
            if !per_cell[k].contains(&z) {
                per_cell[k].push(z);
            }
        }
    }
    let jobs: Vec<(usize, Vec<C64>)> = per_cell.into_iter().enumerate().collect();
    par::map(jobs, |(k, cands)| {
        let mut undetermined = None;
        for z in cands {
            let (class, sigma) = probe(z);
            match class {
                PointClass::Spectrum => {
                    return GridCell {
                        class,
                        min_tail_sigma: sigma,
                        witness: z,
                    }
                }
                PointClass::Undetermined if undetermined.is_none() => undetermined = Some((z, sigma)),
                _ => {}
            }
        }
        if let Some((z, sigma)) = undetermined {
            return GridCell {
                class: PointClass::Undetermined,
                min_tail_sigma: sigma,
                witness: z,
            };
        }
        let z = cell_center(rect, nx, ny, k % nx, k / nx);
        let (class, sigma) = probe(z);
        GridCell {
            class,
            min_tail_sigma: sigma,
            witness: z,
        }
    })
}

/// Spectrum grid from a prepared context.
pub fn spectrum_grid_with(ctx: &ProbeContext, rect: &Rect, nx: usize, ny: usize) -> Result<RegionGrid, SpectraError> {
    if nx < 1 || ny < 1 {
        return Err(SpectraError::InvalidRect(format!("resolution {nx}x{ny} is empty")));
    }
    let mut cells = scan(rect, nx, ny, &ctx.candidates, |z| {
        let p = ctx.probe(z);
        (p.classification, p.min_tail_sigma())
    });
    let mut grid = RegionGrid {
        rect: *rect,
        nx,
        ny,
        cells: Vec::new(),
        scale: ctx.scale,
        compactness_downgrades: 0,
    };
    let limit = ctx.norm_max + grid.cell_diag();
    let mut downgraded = 0;
    for cell in &mut cells {
        if cell.class == PointClass::Spectrum && cell.witness.norm() > limit {
            cell.class = PointClass::Undetermined;
            downgraded += 1;
        }
    }
    grid.cells = cells;
    grid.compactness_downgrades = downgraded;
    Ok(grid)
}

/// Classifies each cell of `rect` at `nx × ny` resolution; resolutions below
/// 8 are rejected.
pub fn family_spectrum_grid(
    f: &OperatorFamily,
    rect: &Rect,
    nx: usize,
    ny: usize,
    g: &HGrid,
) -> Result<RegionGrid, SpectraError> {
    if nx < 8 || ny < 8 {
        return Err(SpectraError::InvalidRect(format!(
            "resolution must be at least 8x8, got {nx}x{ny}"
        )));
    }
    let ctx = ProbeContext::new(f, g, &SpectraParams::default())?;
    spectrum_grid_with(&ctx, rect, nx, ny)
}
