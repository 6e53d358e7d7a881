//! Parameter sweeps: perturbation disks `f_a + delta` and the complex
//! `a`-plane of the slice.
//!
//! Cell `(i, j)` of an `n x n` grid (row `i`, column `j`) sits at
//!
//! ```text
//! center + (hw_re * (2j + 1 - n) / n) + i * (hw_im * (2i + 1 - n) / n)
//! ```
//!
//! which is `center + half_width * ((2j+1)/n - 1, (2i+1)/n - 1)` written so
//! that mirrored rows are exact negatives of each other. Rows are computed in
//! parallel and reassembled in order, so results do not depend on the number
//! of workers.

pub mod output;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{classify_orbit, GenericCubic, OrbitClassification};
use crate::error::{Error, Result};
use crate::perturbation::{
    classify_perturbation, perturb, Budget, OutcomeVerdict, PhaseEstimator, EGGBEATER_BOUND,
};
use crate::dynamics::Per1Param;

#[derive(Clone, Debug, PartialEq)]
pub struct ScanGrid<T> {
    pub center: Complex64,
    pub half_width_re: f64,
    pub half_width_im: f64,
    pub n: usize,
    /// Row-major, `cells[i * n + j]`.
    pub cells: Vec<T>,
}

/// Offset of index `k` in `[-half_width, half_width]`.
#[inline]
fn offset(k: usize, n: usize, half_width: f64) -> f64 {
    half_width * ((2 * k + 1) as f64 - n as f64) / n as f64
}

pub fn cell_point(center: Complex64, hw_re: f64, hw_im: f64, n: usize, i: usize, j: usize) -> Complex64 {
    center + Complex64::new(offset(j, n, hw_re), offset(i, n, hw_im))
}

impl<T> ScanGrid<T> {
    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        cell_point(self.center, self.half_width_re, self.half_width_im, self.n, i, j)
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.cells[i * self.n + j]
    }

    /// `(i, j, point, cell)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64, &T)> {
        self.cells.iter().enumerate().map(move |(k, c)| {
            let (i, j) = (k / self.n, k % self.n);
            (i, j, self.point(i, j), c)
        })
    }
}

/// Which cells of a perturbation scan get a lifted-phase estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PhasePolicy {
    #[default]
    Never,
    /// Cells whose critical orbits both stay bounded.
    NonEscaping,
    Always,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanOptions {
    pub budget: Budget,
    /// Worker cap; `None` uses the global pool.
    pub jobs: Option<usize>,
    pub phase: PhasePolicy,
    /// Tolerance for the Fatou coordinates used in phase estimates.
    pub tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            budget: Budget::default(),
            jobs: None,
            phase: PhasePolicy::Never,
            tol: 1e-8,
        }
    }
}

/// One cell of a perturbation scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaCell {
    pub verdict: OutcomeVerdict,
    pub misiurewicz_like: bool,
    pub escape_plus: Option<u64>,
    pub escape_minus: Option<u64>,
    pub min_multiplier_modulus: f64,
    pub im_sigma: Option<f64>,
    /// Spread of the phase samples, when `im_sigma` is present.
    pub phase_stability: Option<f64>,
}

/// Outcome of the two critical orbits of `f_a` for complex `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SliceVerdict {
    BothBounded,
    OneEscapes,
    BothEscape,
}

impl SliceVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            SliceVerdict::BothBounded => "BothBounded",
            SliceVerdict::OneEscapes => "OneEscapes",
            SliceVerdict::BothEscape => "BothEscape",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SliceCell {
    pub verdict: SliceVerdict,
    pub escape_plus: Option<u64>,
    pub escape_minus: Option<u64>,
}

fn run_rows<T, F>(n: usize, jobs: Option<usize>, row: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Vec<T> + Sync + Send,
{
    let compute = || -> Vec<T> { (0..n).into_par_iter().flat_map_iter(&row).collect() };
    match jobs {
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j.max(1))
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            Ok(pool.install(compute))
        }
        None => Ok(compute()),
    }
}

/// Classifies `f_a + delta` for `delta` on the `n x n` grid covering the
/// square `[-radius, radius]^2`.
pub fn scan_delta_disk(
    a: Per1Param,
    radius: f64,
    n: usize,
    opts: &ScanOptions,
) -> Result<ScanGrid<DeltaCell>> {
    if n == 0 {
        return Err(Error::InvalidParameter("grid resolution must be positive".into()));
    }
    if !(radius > 0.0) || radius > EGGBEATER_BOUND {
        return Err(Error::InvalidParameter(format!(
            "radius {radius} must lie in (0, {EGGBEATER_BOUND}]"
        )));
    }
    let estimator = match opts.phase {
        PhasePolicy::Never => None,
        _ => Some(PhaseEstimator::new(a)?),
    };
    let center = Complex64::new(0.0, 0.0);
    let cells = run_rows(n, opts.jobs, |i| {
        (0..n)
            .map(|j| {
                let delta = cell_point(center, radius, radius, n, i, j);
                delta_cell(a, delta, opts, estimator.as_ref())
            })
            .collect()
    })?;
    Ok(ScanGrid {
        center,
        half_width_re: radius,
        half_width_im: radius,
        n,
        cells,
    })
}

fn delta_cell(
    a: Per1Param,
    delta: Complex64,
    opts: &ScanOptions,
    estimator: Option<&PhaseEstimator>,
) -> DeltaCell {
    let map = perturb(a, delta).expect("cell inside the perturbation bound");
    let out = classify_perturbation(&map, opts.budget);
    let bounded = !out.critical_plus.escaped() && !out.critical_minus.escaped();
    let wants_phase = match opts.phase {
        PhasePolicy::Never => false,
        PhasePolicy::NonEscaping => bounded,
        PhasePolicy::Always => true,
    };
    let phase = estimator
        .filter(|_| wants_phase && delta.norm_sqr() > 0.0)
        .and_then(|e| e.estimate(delta, opts.tol).ok());
    DeltaCell {
        verdict: out.verdict,
        misiurewicz_like: out.misiurewicz_like,
        escape_plus: out.critical_plus.escape_iterate,
        escape_minus: out.critical_minus.escape_iterate,
        min_multiplier_modulus: out.min_multiplier_modulus(),
        im_sigma: phase.as_ref().map(|p| p.im_sigma),
        phase_stability: phase.as_ref().map(|p| p.stability),
    }
}

/// Classifies both critical orbits of `f_a` over a rectangle of complex `a`.
pub fn scan_slice_a(
    re_range: (f64, f64),
    im_range: (f64, f64),
    n: usize,
    opts: &ScanOptions,
) -> Result<ScanGrid<SliceCell>> {
    if n == 0 {
        return Err(Error::InvalidParameter("grid resolution must be positive".into()));
    }
    if !(re_range.1 > re_range.0) || !(im_range.1 > im_range.0) {
        return Err(Error::InvalidParameter("empty parameter range".into()));
    }
    let center = Complex64::new(
        0.5 * (re_range.0 + re_range.1),
        0.5 * (im_range.0 + im_range.1),
    );
    let hw_re = 0.5 * (re_range.1 - re_range.0);
    let hw_im = 0.5 * (im_range.1 - im_range.0);
    let budget = opts.budget;
    let cells = run_rows(n, opts.jobs, |i| {
        (0..n)
            .map(|j| slice_cell(cell_point(center, hw_re, hw_im, n, i, j), budget))
            .collect()
    })?;
    Ok(ScanGrid {
        center,
        half_width_re: hw_re,
        half_width_im: hw_im,
        n,
        cells,
    })
}

/// Critical-orbit classification of `f_a` for complex `a`.
pub fn slice_cell(a: Complex64, budget: Budget) -> SliceCell {
    let map = GenericCubic::new(a, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    let (c_plus, c_minus) = map.critical_points();
    let run = |c| -> OrbitClassification {
        classify_orbit(&map, c, budget.escape_radius, budget.max_iter)
    };
    let plus = run(c_plus);
    let minus = run(c_minus);
    let verdict = match (plus.escaped(), minus.escaped()) {
        (false, false) => SliceVerdict::BothBounded,
        (true, true) => SliceVerdict::BothEscape,
        _ => SliceVerdict::OneEscapes,
    };
    SliceCell {
        verdict,
        escape_plus: plus.escape_iterate,
        escape_minus: minus.escape_iterate,
    }
}
