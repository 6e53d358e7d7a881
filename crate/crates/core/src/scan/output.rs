//! CSV tables and binary PPM (P6) rasters for scan grids.
//!
//! Floats are written with 17 significant digits (`{:.16e}`); columns that
//! do not apply to a cell are left empty. Raster rows run from the largest
//! imaginary part at the top to the smallest at the bottom.

use std::fmt::Write as _;
use std::io::{self, Write};

use super::{DeltaCell, ScanGrid, SliceCell, SliceVerdict};
use crate::perturbation::OutcomeVerdict;

pub const CSV_HEADER: &str =
    "re,im,verdict,escape_iter_plus,escape_iter_minus,min_multiplier_modulus,im_sigma";

/// `{:.16e}`, i.e. 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_u64(x: Option<u64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn opt_f64(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

/// Verdict label used in CSV output. Undetermined cells flagged as
/// Misiurewicz-like are labelled `MisiurewiczLike`.
pub fn delta_label(cell: &DeltaCell) -> &'static str {
    if cell.misiurewicz_like {
        "MisiurewiczLike"
    } else {
        cell.verdict.as_str()
    }
}

pub fn delta_csv(grid: &ScanGrid<DeltaCell>) -> String {
    let mut s = String::with_capacity(128 * (grid.cells.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for (_, _, p, c) in grid.iter() {
        let modulus = if c.min_multiplier_modulus.is_finite() {
            fmt_float(c.min_multiplier_modulus)
        } else {
            String::new()
        };
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            fmt_float(p.re),
            fmt_float(p.im),
            delta_label(c),
            opt_u64(c.escape_plus),
            opt_u64(c.escape_minus),
            modulus,
            opt_f64(c.im_sigma),
        );
    }
    s
}

pub fn slice_csv(grid: &ScanGrid<SliceCell>) -> String {
    let mut s = String::with_capacity(96 * (grid.cells.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for (_, _, p, c) in grid.iter() {
        let _ = writeln!(
            s,
            "{},{},{},{},{},,",
            fmt_float(p.re),
            fmt_float(p.im),
            c.verdict.as_str(),
            opt_u64(c.escape_plus),
            opt_u64(c.escape_minus),
        );
    }
    s
}

pub type Rgb = [u8; 3];

pub const ATTRACTING_RGB: Rgb = [40, 80, 220];
pub const PARABOLIC_RGB: Rgb = [40, 180, 60];
pub const MISIUREWICZ_RGB: Rgb = [220, 30, 30];
pub const UNDETERMINED_RGB: Rgb = [128, 128, 128];
pub const BOUNDED_RGB: Rgb = [0, 0, 0];

/// White for fast escape, fading towards light gray for slow escape.
pub fn escape_rgb(iterations: u64) -> Rgb {
    let fade = (12.0 * (iterations as f64).ln_1p()).min(100.0) as u8;
    let v = 255 - fade;
    [v, v, v]
}

pub fn delta_rgb(cell: &DeltaCell) -> Rgb {
    if cell.misiurewicz_like {
        return MISIUREWICZ_RGB;
    }
    match cell.verdict {
        OutcomeVerdict::BothCriticalEscape => {
            escape_rgb(cell.escape_plus.max(cell.escape_minus).unwrap_or(0))
        }
        OutcomeVerdict::OneCriticalEscapes => {
            let [v, _, _] = escape_rgb(cell.escape_plus.or(cell.escape_minus).unwrap_or(0));
            [v, v, v / 2 + 64]
        }
        OutcomeVerdict::AttractingFixedPoint => ATTRACTING_RGB,
        OutcomeVerdict::ParabolicFixedPoint => PARABOLIC_RGB,
        OutcomeVerdict::Undetermined => UNDETERMINED_RGB,
    }
}

pub fn slice_rgb(cell: &SliceCell) -> Rgb {
    match cell.verdict {
        SliceVerdict::BothEscape => {
            escape_rgb(cell.escape_plus.max(cell.escape_minus).unwrap_or(0))
        }
        SliceVerdict::OneEscapes => [230, 140, 40],
        SliceVerdict::BothBounded => BOUNDED_RGB,
    }
}

/// Encodes the grid as a binary P6 image, one pixel per cell.
pub fn ppm<T>(grid: &ScanGrid<T>, color: impl Fn(&T) -> Rgb) -> Vec<u8> {
    let n = grid.n;
    let mut out = format!("P6\n{n} {n}\n255\n").into_bytes();
    out.reserve(3 * n * n);
    for i in (0..n).rev() {
        for j in 0..n {
            out.extend_from_slice(&color(grid.get(i, j)));
        }
    }
    out
}

pub fn write_all(path: &std::path::Path, bytes: &[u8]) -> io::Result<()> {
    let mut f = io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(bytes)?;
    f.flush()
}
