//! Browser bindings: family spectrum grids, local spectrum grids and bracket
//! roots. Inputs use the same text formats as the command line tool.

use wasm_bindgen::prelude::*;

use opfam::bracket::{bracket_seq_checked, root_test, QnParams};
use opfam::family::{io::read_family, HGrid, OperatorFamily};
use opfam::linalg::io::{read_matrix, read_vector};
use opfam::local::{family_local_spectrum_grid, MEMBER_RADIUS_ORDER};
use opfam::spectra::{family_spectrum_grid, spectral_radius_bound, PointClass, Rect, RegionGrid};

pub const MAX_RES: usize = 256;

/// A classified grid. Cell `k` has real index `k % nx` and imaginary index
/// `k / nx`, counted from `re_min` and `im_min`.
#[wasm_bindgen]
#[derive(Clone, Debug)]
pub struct GridView {
    nx: usize,
    ny: usize,
    rect: [f64; 4],
    classes: String,
}

#[wasm_bindgen]
impl GridView {
    #[wasm_bindgen(getter)]
    pub fn nx(&self) -> usize {
        self.nx
    }

    #[wasm_bindgen(getter)]
    pub fn ny(&self) -> usize {
        self.ny
    }

    /// `[re_min, re_max, im_min, im_max]`.
    #[wasm_bindgen(getter)]
    pub fn rect(&self) -> Vec<f64> {
        self.rect.to_vec()
    }

    /// One character per cell: `S`, `U` or `R`.
    #[wasm_bindgen(getter)]
    pub fn classes(&self) -> String {
        self.classes.clone()
    }

    pub fn count(&self, code: char) -> usize {
        self.classes.chars().filter(|&c| c == code).count()
    }
}

impl From<&RegionGrid> for GridView {
    fn from(g: &RegionGrid) -> Self {
        GridView {
            nx: g.nx,
            ny: g.ny,
            rect: [g.rect.re_min, g.rect.re_max, g.rect.im_min, g.rect.im_max],
            classes: g.cells.iter().map(|c| c.class.code()).collect(),
        }
    }
}

/// Bracket norms and roots in both orders with the root-test verdict.
#[wasm_bindgen]
#[derive(Clone, Debug)]
pub struct BracketView {
    forward: Vec<f64>,
    backward: Vec<f64>,
    verdict: String,
    final_root: f64,
}

#[wasm_bindgen]
impl BracketView {
    /// `ρ_n(T, S)` for `n = 1..=n_max`.
    #[wasm_bindgen(getter)]
    pub fn forward(&self) -> Vec<f64> {
        self.forward.clone()
    }

    /// `ρ_n(S, T)` for `n = 1..=n_max`.
    #[wasm_bindgen(getter)]
    pub fn backward(&self) -> Vec<f64> {
        self.backward.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn verdict(&self) -> String {
        self.verdict.clone()
    }

    #[wasm_bindgen(getter, js_name = finalRoot)]
    pub fn final_root(&self) -> f64 {
        self.final_root
    }
}

fn parse_grid(text: &str) -> Result<HGrid, String> {
    if text.trim().is_empty() {
        return Ok(HGrid::default());
    }
    text.parse().map_err(|e| format!("h grid: {e}"))
}

fn check_res(res: usize) -> Result<usize, String> {
    if (8..=MAX_RES).contains(&res) {
        Ok(res)
    } else {
        Err(format!("resolution must be in 8..={MAX_RES}, got {res}"))
    }
}

fn pick_rect(f: &OperatorFamily, g: &HGrid, text: &str) -> Result<Rect, String> {
    if !text.trim().is_empty() {
        return text.parse().map_err(|e| format!("rectangle: {e}"));
    }
    let r = spectral_radius_bound(f, g, MEMBER_RADIUS_ORDER)
        .map_err(|e| e.to_string())?
        .value;
    if !r.is_finite() {
        return Err("spectral radius bound is not finite; give a rectangle".into());
    }
    Rect::centered(1.1 * r + 0.25).map_err(|e| e.to_string())
}

/// Spectrum grid of the family in `family_text`. Empty `rect` covers the
/// spectral radius bound; empty `grid` uses the default h grid.
pub fn spectrum_grid(family_text: &str, res: usize, rect: &str, grid: &str) -> Result<GridView, String> {
    let f = read_family(family_text).map_err(|e| format!("family: {e}"))?;
    let g = parse_grid(grid)?;
    let res = check_res(res)?;
    let rect = pick_rect(&f, &g, rect)?;
    let out = family_spectrum_grid(&f, &rect, res, res, &g).map_err(|e| e.to_string())?;
    Ok(GridView::from(&out))
}

/// Local spectrum grid of `x` under the family in `family_text`.
pub fn local_grid(family_text: &str, x_text: &str, res: usize, rect: &str, grid: &str) -> Result<GridView, String> {
    let f = read_family(family_text).map_err(|e| format!("family: {e}"))?;
    let x = read_vector(x_text).map_err(|e| format!("vector: {e}"))?;
    let g = parse_grid(grid)?;
    let res = check_res(res)?;
    let rect = pick_rect(&f, &g, rect)?;
    let out = family_local_spectrum_grid(&f, &x, &rect, res, res, &g).map_err(|e| e.to_string())?;
    Ok(GridView::from(&out))
}

/// Bracket roots of two matrices up to order `n_max`.
pub fn roots(t_text: &str, s_text: &str, n_max: usize) -> Result<BracketView, String> {
    let t = read_matrix(t_text).map_err(|e| format!("T: {e}"))?;
    let s = read_matrix(s_text).map_err(|e| format!("S: {e}"))?;
    let pair = bracket_seq_checked(&t, &s, n_max).map_err(|e| e.to_string())?;
    let qn = QnParams {
        n_max,
        ..QnParams::default()
    };
    let rep = root_test(&pair.forward, &pair.backward, &qn);
    Ok(BracketView {
        forward: pair.forward.roots,
        backward: pair.backward.roots,
        verdict: rep.verdict.to_string(),
        final_root: rep.final_root,
    })
}

#[wasm_bindgen(js_name = familySpectrum)]
pub fn family_spectrum_js(family_text: &str, res: usize, rect: &str, grid: &str) -> Result<GridView, JsError> {
    spectrum_grid(family_text, res, rect, grid).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = localSpectrum)]
pub fn local_spectrum_js(
    family_text: &str,
    x_text: &str,
    res: usize,
    rect: &str,
    grid: &str,
) -> Result<GridView, JsError> {
    local_grid(family_text, x_text, res, rect, grid).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = bracketRoots)]
pub fn bracket_roots_js(t_text: &str, s_text: &str, n_max: usize) -> Result<BracketView, JsError> {
    roots(t_text, s_text, n_max).map_err(|e| JsError::new(&e))
}

/// Number of cells of `code` in a grid, for tests and summaries.
pub fn class_count(view: &GridView, class: PointClass) -> usize {
    view.count(class.code())
}
