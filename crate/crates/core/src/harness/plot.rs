//! Region-grid emitters.
//!
//! - CSV: header `re,im,class,min_tail_sigma`, one row per cell in storage
//!   order, coordinates of the cell centre.
//! - PGM: binary `P5`, one pixel per cell, top row = largest imaginary part;
//!   0 = Spectrum, 128 = Undetermined, 255 = Resolvent.
//! - SVG: one filled rect per cell plus a three-entry legend.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::linalg::C64;
use crate::spectra::{GridCell, PointClass, Rect, RegionGrid};

use super::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotFormat {
    Csv,
    Pgm,
    Svg,
}

impl PlotFormat {
    pub fn extension(self) -> &'static str {
        match self {
            PlotFormat::Csv => "csv",
            PlotFormat::Pgm => "pgm",
            PlotFormat::Svg => "svg",
        }
    }
}

impl FromStr for PlotFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(PlotFormat::Csv),
            "pgm" => Ok(PlotFormat::Pgm),
            "svg" => Ok(PlotFormat::Svg),
            other => Err(HarnessError::InvalidConfig(format!(
                "unknown plot format `{other}` (expected csv, pgm or svg)"
            ))),
        }
    }
}

pub fn pgm_level(class: PointClass) -> u8 {
    match class {
        PointClass::Spectrum => 0,
        PointClass::Undetermined => 128,
        PointClass::Resolvent => 255,
    }
}

fn svg_color(class: PointClass) -> &'static str {
    match class {
        PointClass::Spectrum => "#c0392b",
        PointClass::Undetermined => "#f1c40f",
        PointClass::Resolvent => "#ecf0f1",
    }
}

pub fn render_csv(grid: &RegionGrid) -> String {
    let mut out = String::from("re,im,class,min_tail_sigma\n");
    for (k, cell) in grid.cells.iter().enumerate() {
        let z = grid.center_of(k);
        let _ = writeln!(
            out,
            "{:.12e},{:.12e},{},{:.6e}",
            z.re,
            z.im,
            cell.class.code(),
            cell.min_tail_sigma
        );
    }
    out
}

pub fn render_pgm(grid: &RegionGrid) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", grid.nx, grid.ny).into_bytes();
    for j in (0..grid.ny).rev() {
        for i in 0..grid.nx {
            out.push(pgm_level(grid.cells[j * grid.nx + i].class));
        }
    }
    out
}

pub fn render_svg(grid: &RegionGrid) -> String {
    const CELL: usize = 8;
    const LEGEND: usize = 24;
    let (w, h) = (grid.nx * CELL, grid.ny * CELL);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{}" viewBox="0 0 {w} {}">"#,
        h + LEGEND,
        h + LEGEND
    );
    let r = &grid.rect;
    let _ = writeln!(
        out,
        "<title>re [{}, {}] x im [{}, {}], {}x{} cells</title>",
        r.re_min, r.re_max, r.im_min, r.im_max, grid.nx, grid.ny
    );
    let _ = writeln!(out, r#"<g shape-rendering="crispEdges">"#);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let class = grid.cells[j * grid.nx + i].class;
            let y = (grid.ny - 1 - j) * CELL;
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{y}" width="{CELL}" height="{CELL}" fill="{}"/>"#,
                i * CELL,
                svg_color(class)
            );
        }
    }
    let _ = writeln!(out, "</g>");
    let entries = [
        (PointClass::Spectrum, "spectrum"),
        (PointClass::Undetermined, "undetermined"),
        (PointClass::Resolvent, "resolvent"),
    ];
    for (k, (class, label)) in entries.iter().enumerate() {
        let x = 4 + k * 110;
        let _ = writeln!(
            out,
            r##"<rect x="{x}" y="{}" width="12" height="12" fill="{}" stroke="#333"/><text x="{}" y="{}" font-family="sans-serif" font-size="12">{label}</text>"##,
            h + 6,
            svg_color(*class),
            x + 16,
            h + 17
        );
    }
    out.push_str("</svg>\n");
    out
}

fn class_from_code(code: &str) -> Option<PointClass> {
    match code {
        "R" => Some(PointClass::Resolvent),
        "S" => Some(PointClass::Spectrum),
        "U" => Some(PointClass::Undetermined),
        _ => None,
    }
}

/// Reads a grid written by [`render_csv`]. The rectangle is rebuilt from the
/// cell centres, so both sides need at least two cells.
pub fn parse_csv(text: &str) -> Result<RegionGrid, HarnessError> {
    let bad = |line: usize, msg: String| HarnessError::InvalidConfig(format!("grid csv line {line}: {msg}"));
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "re,im,class,min_tail_sigma")) => {}
        _ => return Err(bad(1, "expected header `re,im,class,min_tail_sigma`".into())),
    }
    let mut centers = Vec::new();
    let mut cells = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let [re, im, class, sigma] = fields[..] else {
            return Err(bad(idx + 1, format!("expected 4 fields, found {}", fields.len())));
        };
        let num = |tok: &str| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| bad(idx + 1, format!("invalid number `{tok}`")))
        };
        let class = class_from_code(class.trim()).ok_or_else(|| bad(idx + 1, format!("invalid class `{class}`")))?;
        centers.push(C64::new(num(re)?, num(im)?));
        cells.push(GridCell {
            class,
            min_tail_sigma: num(sigma)?,
            witness: *centers.last().expect("just pushed"),
        });
    }
    let nx = centers.iter().take_while(|z| z.im == centers[0].im).count();
    if nx < 2 || cells.len() % nx != 0 || cells.len() / nx < 2 {
        return Err(bad(
            1,
            format!("{} cells do not form a grid with at least 2x2 cells", cells.len()),
        ));
    }
    let ny = cells.len() / nx;
    let (first, last) = (centers[0], centers[cells.len() - 1]);
    let dx = (last.re - first.re) / (nx - 1) as f64;
    let dy = (last.im - first.im) / (ny - 1) as f64;
    let rect = Rect::new(
        first.re - dx / 2.0,
        last.re + dx / 2.0,
        first.im - dy / 2.0,
        last.im + dy / 2.0,
    )
    .map_err(|e| bad(1, e.to_string()))?;
    Ok(RegionGrid {
        rect,
        nx,
        ny,
        cells,
        scale: 1.0,
        compactness_downgrades: 0,
    })
}

pub fn render_plot(grid: &RegionGrid, format: PlotFormat) -> Vec<u8> {
    match format {
        PlotFormat::Csv => render_csv(grid).into_bytes(),
        PlotFormat::Pgm => render_pgm(grid),
        PlotFormat::Svg => render_svg(grid).into_bytes(),
    }
}

pub fn emit_plot(grid: &RegionGrid, format: PlotFormat, path: &Path) -> Result<(), HarnessError> {
    std::fs::write(path, render_plot(grid, format)).map_err(|e| HarnessError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
