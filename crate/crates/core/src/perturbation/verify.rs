//! Numerical verification procedures: the shift-locus perturbations on the
//! parabolic-repelling side, the phase/multiplier cross-check, containment
//! of the round cylinder in the basin, and the disk verification of the
//! main theorem.
//!
//! Every report carries all of its rows, a `passed()` verdict and a
//! line-oriented `Display`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use super::{
    classify_perturbation, perturb, split_fixed_points, Budget, OutcomeVerdict, PhaseEstimator,
    PHASE_STABILITY_THRESHOLD,
};
use crate::dynamics::{classify_orbit, resit, Per1Param};
use crate::error::{Error, Result};
use crate::fatou::{find_parameter_for_height, FatouCoordinates};
use crate::scan::{scan_delta_disk, PhasePolicy, ScanOptions};

pub const DEFAULT_EPSILON: f64 = 0.005;

/// `m = pi / ln 3 - 1/2`.
pub fn m_constant() -> f64 {
    PI / 3f64.ln() - 0.5
}

/// `(4 pi / 3 - m + 2 eps, m - 2 eps)`.
pub fn theorem_interval(epsilon: f64) -> (f64, f64) {
    let m = m_constant();
    (4.0 * PI / 3.0 - m + 2.0 * epsilon, m - 2.0 * epsilon)
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.16e}")).unwrap_or_else(|| "-".into())
}

// ---------------------------------------------------------------------------
// Round cylinder

pub const CYLINDER_ESCAPE_HEIGHTS: [f64; 7] = [0.0, 0.5, -0.5, 1.0, -1.0, 1.17, -1.17];
pub const CYLINDER_BOUNDED_HEIGHTS: [f64; 2] = [3.0, -3.0];
pub const CYLINDER_BUDGET: u64 = 1_000_000;
pub const CYLINDER_ESCAPE_RADIUS: f64 = 10.0;
/// Real parts sampled per height: one full period `x0 + k / 8`.
pub const CYLINDER_X0: f64 = -3.0;
pub const CYLINDER_X_SAMPLES: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct CylinderRow {
    pub height: f64,
    pub x: f64,
    pub point: Complex64,
    pub expect_escape: bool,
    pub escape_iterate: Option<u64>,
}

impl CylinderRow {
    pub fn agrees(&self) -> bool {
        self.expect_escape == self.escape_iterate.is_some()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CylinderReport {
    pub a: f64,
    pub rows: Vec<CylinderRow>,
}

impl CylinderReport {
    /// Disagreements among points expected to escape (fatal).
    pub fn escape_failures(&self) -> Vec<&CylinderRow> {
        self.rows.iter().filter(|r| r.expect_escape && !r.agrees()).collect()
    }

    /// Disagreements among points expected to stay bounded (reported only).
    pub fn bounded_mismatches(&self) -> Vec<&CylinderRow> {
        self.rows.iter().filter(|r| !r.expect_escape && !r.agrees()).collect()
    }

    pub fn passed(&self) -> bool {
        self.escape_failures().is_empty()
    }
}

impl fmt::Display for CylinderReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cylinder a={:.16e}", self.a)?;
        for r in &self.rows {
            writeln!(
                f,
                "  height={:+.3} x={:+.4} z={:.16e}{:+.16e}i expect={} escape_iter={} {}",
                r.height,
                r.x,
                r.point.re,
                r.point.im,
                if r.expect_escape { "escape" } else { "bounded" },
                r.escape_iterate.map(|n| n.to_string()).unwrap_or_else(|| "-".into()),
                if r.agrees() { "ok" } else if r.expect_escape { "VIOLATION" } else { "mismatch" },
            )?;
        }
        writeln!(
            f,
            "  escape-half failures={} bounded-half mismatches={} (non-fatal)",
            self.escape_failures().len(),
            self.bounded_mismatches().len()
        )?;
        writeln!(f, "cylinder {}", mark(self.passed()))
    }
}

/// Pulls the horizontal lines `Im zeta = height` of the repelling
/// coordinate back to the dynamical plane and follows each point under
/// `f_a`.
pub fn round_cylinder(a: Per1Param, budget: u64) -> Result<CylinderReport> {
    let coords = FatouCoordinates::new(a)?;
    let map = a.cubic();
    let mut rows = Vec::new();
    let heights = CYLINDER_ESCAPE_HEIGHTS
        .iter()
        .map(|&h| (h, true))
        .chain(CYLINDER_BOUNDED_HEIGHTS.iter().map(|&h| (h, false)));
    for (height, expect_escape) in heights {
        for k in 0..CYLINDER_X_SAMPLES {
            let x = CYLINDER_X0 + k as f64 / CYLINDER_X_SAMPLES as f64;
            let point = coords.repelling_inverse(Complex64::new(x, height))?;
            let orbit = classify_orbit(&map, point, CYLINDER_ESCAPE_RADIUS, budget);
            rows.push(CylinderRow {
                height,
                x,
                point,
                expect_escape,
                escape_iterate: orbit.escape_iterate,
            });
        }
    }
    Ok(CylinderReport { a: a.value(), rows })
}

// ---------------------------------------------------------------------------
// Shift-locus perturbations along the real axis

pub const LEMMA41_HEIGHTS: [f64; 4] = [0.5, 1.0, 2.0, 2.3];
pub const LEMMA41_DELTAS: [f64; 3] = [1e-4, 1e-5, 1e-6];
/// Extra parameters whose multiplier slope is fitted, one on each side of 1.
pub const SLOPE_EXTRA_PARAMS: [f64; 2] = [0.5, 1.3];
pub const SLOPE_DELTA_RANGE: (f64, f64) = (1e-8, 1e-5);
pub const SLOPE_POINTS: usize = 13;
pub const SLOPE_REL_TOL: f64 = 0.05;

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma41Row {
    pub t: f64,
    pub a: f64,
    pub delta: f64,
    pub verdict: OutcomeVerdict,
    /// `|lambda_+|^2 - 1`, `|lambda_-|^2 - 1`.
    pub excess: (f64, f64),
}

impl Lemma41Row {
    pub fn passed(&self) -> bool {
        self.verdict == OutcomeVerdict::BothCriticalEscape && self.excess.0 > 0.0 && self.excess.1 > 0.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SlopeFit {
    pub a: f64,
    pub fitted: f64,
    pub expected: f64,
}

impl SlopeFit {
    pub fn relative_error(&self) -> f64 {
        ((self.fitted - self.expected) / self.expected).abs()
    }

    pub fn passed(&self) -> bool {
        self.relative_error() < SLOPE_REL_TOL
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma41Report {
    pub rows: Vec<Lemma41Row>,
    pub slopes: Vec<SlopeFit>,
}

impl Lemma41Report {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(Lemma41Row::passed) && self.slopes.iter().all(SlopeFit::passed)
    }
}

impl fmt::Display for Lemma41Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lemma41")?;
        for r in &self.rows {
            writeln!(
                f,
                "  t={} a={:.16e} delta={:e} verdict={} |l+|^2-1={:.16e} |l-|^2-1={:.16e} {}",
                r.t,
                r.a,
                r.delta,
                r.verdict,
                r.excess.0,
                r.excess.1,
                if r.passed() { "ok" } else { "VIOLATION" }
            )?;
        }
        for s in &self.slopes {
            writeln!(
                f,
                "  slope a={:.16e} fitted={:.16e} expected={:.16e} rel_err={:.3e} {}",
                s.a,
                s.fitted,
                s.expected,
                s.relative_error(),
                if s.passed() { "ok" } else { "VIOLATION" }
            )?;
        }
        writeln!(f, "lemma41 {}", mark(self.passed()))
    }
}

/// Least-squares slope through the origin of `|lambda_+|^2 - 1` against
/// real `delta` on a logarithmic grid.
pub fn multiplier_slope(a: Per1Param) -> Result<SlopeFit> {
    let (lo, hi) = SLOPE_DELTA_RANGE;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for k in 0..SLOPE_POINTS {
        let s = k as f64 / (SLOPE_POINTS - 1) as f64;
        let delta = lo * (hi / lo).powf(s);
        let (p, _) = split_fixed_points(&perturb(a, Complex64::new(delta, 0.0))?)?;
        sxy += delta * p.modulus_sqr_minus_one();
        sxx += delta * delta;
    }
    let av = a.value();
    Ok(SlopeFit {
        a: av,
        fitted: sxy / sxx,
        expected: 4.0 * (av - 1.0 / av),
    })
}

pub fn lemma41(heights: &[f64], deltas: &[f64], budget: Budget, tol: f64) -> Result<Lemma41Report> {
    let mut rows = Vec::new();
    let mut slope_params = Vec::new();
    for &t in heights {
        let a = find_parameter_for_height(t, tol)?;
        slope_params.push(a);
        for &d in deltas {
            let map = perturb(a, Complex64::new(d, 0.0))?;
            let out = classify_perturbation(&map, budget);
            let (p, q) = split_fixed_points(&map)?;
            rows.push(Lemma41Row {
                t,
                a: a.value(),
                delta: d,
                verdict: out.verdict,
                excess: (p.modulus_sqr_minus_one(), q.modulus_sqr_minus_one()),
            });
        }
    }
    for &a in &SLOPE_EXTRA_PARAMS {
        slope_params.push(Per1Param::in_interval(a)?);
    }
    let slopes = slope_params
        .into_iter()
        .map(multiplier_slope)
        .collect::<Result<Vec<_>>>()?;
    Ok(Lemma41Report { rows, slopes })
}

// ---------------------------------------------------------------------------
// Phase versus multiplier

pub const LEMMA42_MODULUS: f64 = 1e-5;
pub const LEMMA42_HEIGHT: f64 = 2.0;
/// Arguments spread over the sector where the base orbit transits.
pub const LEMMA42_FAN: usize = 16;
/// Arguments spread over the rest of `(0, pi)`.
pub const LEMMA42_WIDE: usize = 8;
/// Largest phase targeted by the transit sector.
pub const LEMMA42_MAX_PHASE: f64 = 4.0;
/// Margin around `pi resit` inside which no consistency is required.
pub const LEMMA42_MARGIN: f64 = 0.1;
pub const REAL_PHASE_BOUND: f64 = 0.05;

/// Argument of `delta` with predicted `Im sigma = phase`: for small
/// `|delta|` the phase grows like `pi arg(delta) / (2 sqrt(a |delta|))`.
pub fn argument_for_phase(a: f64, modulus: f64, phase: f64) -> f64 {
    2.0 * phase * (a * modulus).sqrt() / PI
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma42Row {
    pub argument: f64,
    pub delta: Complex64,
    pub im_sigma: Option<f64>,
    pub stability: Option<f64>,
    /// Why no estimate was produced.
    pub failure: Option<String>,
    pub min_split_modulus: f64,
    pub verdict: OutcomeVerdict,
}

/// Consistency status of one row against the threshold `pi resit`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Consistency {
    /// No reliable estimate, or inside the margin.
    Unresolved,
    Consistent,
    Violation,
}

impl Lemma42Row {
    pub fn reliable(&self) -> bool {
        self.stability.is_some_and(|s| s < PHASE_STABILITY_THRESHOLD)
    }

    pub fn attracting(&self) -> bool {
        self.min_split_modulus < 1.0
    }

    pub fn consistency(&self, threshold: f64) -> Consistency {
        let Some(s) = self.im_sigma.filter(|_| self.reliable()) else {
            return Consistency::Unresolved;
        };
        if s - threshold > LEMMA42_MARGIN {
            if self.attracting() {
                Consistency::Consistent
            } else {
                Consistency::Violation
            }
        } else if s - threshold < -LEMMA42_MARGIN {
            if self.attracting() {
                Consistency::Violation
            } else {
                Consistency::Consistent
            }
        } else {
            Consistency::Unresolved
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma42Report {
    pub a: f64,
    pub threshold: f64,
    pub rows: Vec<Lemma42Row>,
    pub real_rows: Vec<Lemma42Row>,
}

impl Lemma42Report {
    fn count(&self, c: Consistency, above: bool) -> usize {
        self.rows
            .iter()
            .filter(|r| r.consistency(self.threshold) == c)
            .filter(|r| r.im_sigma.is_some_and(|s| (s > self.threshold) == above))
            .count()
    }

    pub fn violations(&self) -> usize {
        self.count(Consistency::Violation, true) + self.count(Consistency::Violation, false)
    }

    pub fn real_ok(&self) -> bool {
        self.real_rows.iter().all(|r| {
            r.reliable() && r.im_sigma.is_some_and(|s| s.abs() < REAL_PHASE_BOUND)
        })
    }

    /// No violations, real estimates near zero, and at least one resolved
    /// row on each side of the threshold.
    pub fn passed(&self) -> bool {
        self.violations() == 0
            && self.real_ok()
            && self.count(Consistency::Consistent, true) > 0
            && self.count(Consistency::Consistent, false) > 0
    }
}

impl fmt::Display for Lemma42Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lemma42 a={:.16e} pi*resit={:.16e}", self.a, self.threshold)?;
        for r in self.real_rows.iter().chain(&self.rows) {
            let status = match r.consistency(self.threshold) {
                Consistency::Unresolved => "unresolved",
                Consistency::Consistent => "ok",
                Consistency::Violation => "VIOLATION",
            };
            writeln!(
                f,
                "  arg={:.16e} im_sigma={} stability={} min|lambda|={:.16e} verdict={} {}{}",
                r.argument,
                fmt_opt(r.im_sigma),
                fmt_opt(r.stability),
                r.min_split_modulus,
                r.verdict,
                status,
                r.failure.as_ref().map(|e| format!(" ({e})")).unwrap_or_default(),
            )?;
        }
        writeln!(
            f,
            "  consistent above={} below={} violations={} real_ok={}",
            self.count(Consistency::Consistent, true),
            self.count(Consistency::Consistent, false),
            self.violations(),
            self.real_ok()
        )?;
        writeln!(f, "lemma42 {}", mark(self.passed()))
    }
}

fn lemma42_row(
    est: &PhaseEstimator,
    a: Per1Param,
    delta: Complex64,
    budget: Budget,
    tol: f64,
) -> Result<Lemma42Row> {
    let map = perturb(a, delta)?;
    let (p, q) = split_fixed_points(&map)?;
    let verdict = classify_perturbation(&map, budget).verdict;
    let (im_sigma, stability, failure) = match est.estimate(delta, tol) {
        Ok(e) => (Some(e.im_sigma), Some(e.stability), None),
        Err(e) if e.is_numerical() => (None, None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    Ok(Lemma42Row {
        argument: delta.arg(),
        delta,
        im_sigma,
        stability,
        failure,
        min_split_modulus: p.modulus().min(q.modulus()),
        verdict,
    })
}

/// Phase estimates over a fan of arguments at fixed `|delta|`, compared
/// with the split multipliers. `fan` arguments cover the transit sector up
/// to the predicted phase [`LEMMA42_MAX_PHASE`]; `wide` more cover the rest
/// of `(0, pi)`. Real `delta` of each modulus in `real_deltas` is checked
/// separately.
pub fn lemma42(
    a: Per1Param,
    modulus: f64,
    fan: usize,
    wide: usize,
    real_deltas: &[f64],
    budget: Budget,
    tol: f64,
) -> Result<Lemma42Report> {
    let est = PhaseEstimator::new(a)?;
    let threshold = PI * resit(a)?;
    let sector = argument_for_phase(a.value(), modulus, LEMMA42_MAX_PHASE).min(PI / 2.0);
    let mut args: Vec<f64> = (1..=fan).map(|k| sector * k as f64 / fan as f64).collect();
    args.extend((1..=wide).map(|k| sector + (PI - sector) * k as f64 / (wide + 1) as f64));
    let rows = args
        .into_iter()
        .map(|th| lemma42_row(&est, a, Complex64::from_polar(modulus, th), budget, tol))
        .collect::<Result<Vec<_>>>()?;
    let real_rows = real_deltas
        .iter()
        .map(|&d| lemma42_row(&est, a, Complex64::new(d, 0.0), budget, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(Lemma42Report {
        a: a.value(),
        threshold,
        rows,
        real_rows,
    })
}

// ---------------------------------------------------------------------------
// Disk verification

#[derive(Clone, Debug, PartialEq)]
pub struct ArithmeticGate {
    /// `m/2 + t/2 - eps`.
    pub lower_phase: f64,
    pub two_pi_thirds: f64,
    pub pi_resit: f64,
}

impl ArithmeticGate {
    pub fn passed(&self) -> bool {
        self.lower_phase > self.two_pi_thirds && self.two_pi_thirds > self.pi_resit
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SigmaBound {
    pub bound: f64,
    /// Non-escaping cells with a reliable phase estimate.
    pub checked: usize,
    /// Those with `|Im sigma|` below the bound.
    pub below: Vec<(Complex64, f64)>,
    /// Non-escaping cells without a reliable estimate.
    pub unresolved: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiskReport {
    pub a: f64,
    pub t: Option<f64>,
    pub epsilon: f64,
    pub radius: f64,
    pub n: usize,
    /// Cells inside the closed disk `|delta| <= radius`.
    pub cells: usize,
    pub counts: BTreeMap<OutcomeVerdict, usize>,
    pub misiurewicz: Vec<Complex64>,
    pub gate: Option<ArithmeticGate>,
    pub sigma: Option<SigmaBound>,
}

impl DiskReport {
    pub fn passed(&self) -> bool {
        self.misiurewicz.is_empty() && self.gate.as_ref().is_none_or(ArithmeticGate::passed)
    }
}

impl fmt::Display for DiskReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "disk a={:.16e}", self.a)?;
        if let Some(t) = self.t {
            write!(f, " t={t} epsilon={}", self.epsilon)?;
        }
        writeln!(f, " radius={:e} n={} cells_in_disk={}", self.radius, self.n, self.cells)?;
        for (v, c) in &self.counts {
            writeln!(f, "  {v}={c}")?;
        }
        writeln!(f, "  misiurewicz_like={}", self.misiurewicz.len())?;
        for d in &self.misiurewicz {
            writeln!(f, "  VIOLATION misiurewicz-like delta={:.16e}{:+.16e}i", d.re, d.im)?;
        }
        if let Some(g) = &self.gate {
            writeln!(
                f,
                "  gate m/2+t/2-eps={:.16e} 2pi/3={:.16e} pi*resit={:.16e} {}",
                g.lower_phase,
                g.two_pi_thirds,
                g.pi_resit,
                if g.passed() { "ok" } else { "VIOLATION" }
            )?;
        }
        if let Some(s) = &self.sigma {
            writeln!(
                f,
                "  sigma bound={:.16e} checked={} below={} unresolved={} (report only)",
                s.bound,
                s.checked,
                s.below.len(),
                s.unresolved
            )?;
            for (d, v) in &s.below {
                writeln!(f, "    below delta={:.16e}{:+.16e}i im_sigma={v:.16e}", d.re, d.im)?;
            }
        }
        writeln!(f, "disk {}", mark(self.passed()))
    }
}

/// Classifies the `n x n` grid over `[-radius, radius]^2` and tallies the
/// cells inside the disk. With `sigma_bound`, non-escaping cells also get a
/// phase estimate compared against the bound.
pub fn verify_disk(
    a: Per1Param,
    radius: f64,
    n: usize,
    sigma_bound: Option<f64>,
    opts: &ScanOptions,
) -> Result<DiskReport> {
    let mut scan_opts = *opts;
    scan_opts.phase = if sigma_bound.is_some() {
        PhasePolicy::NonEscaping
    } else {
        PhasePolicy::Never
    };
    let grid = scan_delta_disk(a, radius, n, &scan_opts)?;
    let mut counts = BTreeMap::new();
    let mut misiurewicz = Vec::new();
    let mut sigma = sigma_bound.map(|bound| SigmaBound {
        bound,
        ..SigmaBound::default()
    });
    let mut cells = 0;
    for (_, _, delta, c) in grid.iter() {
        if delta.norm() > radius {
            continue;
        }
        cells += 1;
        *counts.entry(c.verdict).or_insert(0) += 1;
        if c.misiurewicz_like {
            misiurewicz.push(delta);
        }
        let bounded = c.escape_plus.is_none() && c.escape_minus.is_none();
        if let (Some(s), true) = (sigma.as_mut(), bounded) {
            match (c.im_sigma, c.phase_stability) {
                (Some(v), Some(st)) if st < PHASE_STABILITY_THRESHOLD => {
                    s.checked += 1;
                    if v.abs() < s.bound {
                        s.below.push((delta, v));
                    }
                }
                _ => s.unresolved += 1,
            }
        }
    }
    Ok(DiskReport {
        a: a.value(),
        t: None,
        epsilon: 0.0,
        radius,
        n,
        cells,
        counts,
        misiurewicz,
        gate: None,
        sigma,
    })
}

/// Disk verification at `a(t)` for `t` inside the theorem interval, with
/// the arithmetic gate and the phase lower bound.
pub fn verify_theorem_disk(
    t: f64,
    radius: f64,
    n: usize,
    epsilon: f64,
    opts: &ScanOptions,
) -> Result<DiskReport> {
    let (lo, hi) = theorem_interval(epsilon);
    if !(t > lo && t < hi) {
        return Err(Error::InvalidParameter(format!(
            "t = {t} outside the admissible interval ({lo}, {hi}) for epsilon = {epsilon}"
        )));
    }
    let a = find_parameter_for_height(t, opts.tol)?;
    let gate = ArithmeticGate {
        lower_phase: m_constant() / 2.0 + t / 2.0 - epsilon,
        two_pi_thirds: 2.0 * PI / 3.0,
        pi_resit: PI * resit(a)?,
    };
    let mut report = verify_disk(a, radius, n, Some(gate.lower_phase), opts)?;
    report.t = Some(t);
    report.epsilon = epsilon;
    report.gate = Some(gate);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        let m = m_constant();
        assert!((m - 2.3596).abs() < 5e-5);
        assert!((4.0 * PI / 3.0 - m - 1.8292).abs() < 5e-5);
        let (lo, hi) = theorem_interval(DEFAULT_EPSILON);
        assert!(lo < hi);
        assert!((lo - 1.8392).abs() < 1e-4 && (hi - 2.3496).abs() < 1e-4);
    }

    #[test]
    fn theorem_rejects_t_outside_interval() {
        let r = verify_theorem_disk(1.0, 1e-4, 4, DEFAULT_EPSILON, &ScanOptions::default());
        assert!(matches!(r, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn slope_matches_expansion() {
        for a in [0.5, 1.3] {
            let fit = multiplier_slope(Per1Param::new(a).unwrap()).unwrap();
            assert!(fit.passed(), "{fit:?}");
        }
    }

    #[test]
    fn argument_for_phase_is_linear() {
        let th = argument_for_phase(1.3, 1e-5, 1.0);
        assert!((argument_for_phase(1.3, 1e-5, 2.0) - 2.0 * th).abs() < 1e-18);
    }
}
