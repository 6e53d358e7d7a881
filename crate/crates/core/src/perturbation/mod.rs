//! Perturbations `g_delta = f_a + delta` of the parabolic map.
//!
//! For small `delta` off the slice the parabolic point splits into two
//! simple fixed points and orbits transit from the attracting petal to the
//! repelling one through the gate between them. This module locates the
//! split fixed points, estimates the imaginary part of the lifted phase
//! using the unperturbed Fatou coordinates of `f_a` as proxies for the
//! persistent ones, and classifies perturbed maps.

pub mod verify;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dynamics::{
    classify_orbit, fixed_points, resit, FixedPointData, GenericCubic, OrbitClassification,
    Per1Param, Verdict, DEFAULT_ESCAPE_RADIUS, DEFAULT_MAX_ITER,
};
use crate::error::{Error, Result};
use crate::fatou::FatouCoordinates;

/// Largest `|delta|` accepted by [`perturb`].
pub const EGGBEATER_BOUND: f64 = 1e-3;
/// A fixed point is attracting when `|lambda| < 1 - ATTRACTING_MARGIN`.
pub const ATTRACTING_MARGIN: f64 = 1e-6;
/// A fixed point is (near-)parabolic when `||lambda| - 1| < PARABOLIC_MARGIN`.
pub const PARABOLIC_MARGIN: f64 = 1e-4;
/// Misiurewicz-like cells need every fixed point with `|lambda| > 1 + margin`.
pub const MISIUREWICZ_MARGIN: f64 = 1e-3;

/// Attracting Fatou coordinate of the base point used for phase estimates.
pub const PHASE_BASE_COORDINATE: f64 = 5.0;
/// Reference annulus `r1 <= |z| <= r2`, `Re z > 0`, on the repelling side.
pub const PHASE_ANNULUS: (f64, f64) = (0.03, 0.3);
/// Longest transit followed before giving up.
pub const MAX_TRANSIT: u64 = 10_000_000;
/// Number of orbit points in the annulus used for one estimate.
pub const PHASE_SAMPLES: usize = 8;
/// Estimates whose spread across samples reaches this are unreliable.
pub const PHASE_STABILITY_THRESHOLD: f64 = 0.05;

/// `g_delta(z) = f_a(z) + delta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbedMap {
    pub base: Per1Param,
    pub delta: Complex64,
}

impl PerturbedMap {
    pub fn cubic(&self) -> GenericCubic {
        GenericCubic::new(
            Complex64::new(self.base.value(), 0.0),
            Complex64::new(1.0, 0.0),
            self.delta,
        )
    }
}

/// The perturbation `f_a + delta`, `|delta| <= EGGBEATER_BOUND`.
pub fn perturb(a: Per1Param, delta: Complex64) -> Result<PerturbedMap> {
    if !(delta.re.is_finite() && delta.im.is_finite()) || delta.norm() > EGGBEATER_BOUND {
        return Err(Error::InvalidParameter(format!(
            "|delta| = {} exceeds the perturbation bound {EGGBEATER_BOUND}",
            delta.norm()
        )));
    }
    Ok(PerturbedMap { base: a, delta })
}

/// The two fixed points near 0, ordered by decreasing imaginary part
/// (then decreasing real part).
pub fn split_fixed_points(map: &PerturbedMap) -> Result<(FixedPointData, FixedPointData)> {
    if map.delta.norm_sqr() == 0.0 {
        return Err(Error::Clustering(map.delta));
    }
    let a = map.base.value().abs();
    let radius = 3.0 * (map.delta.norm() * (1.0 / a).max(1.0)).sqrt();
    let mut near: Vec<FixedPointData> = fixed_points(&map.cubic())
        .into_iter()
        .filter(|p| p.location.norm() < radius)
        .collect();
    if near.len() != 2 || near.iter().any(|p| p.multiplicity != 1) {
        return Err(Error::Clustering(map.delta));
    }
    near.sort_by(|x, y| {
        y.location
            .im
            .total_cmp(&x.location.im)
            .then(y.location.re.total_cmp(&x.location.re))
    });
    Ok((near[0], near[1]))
}

/// `exp(-2 pi (Im sigma - pi resit))`: modulus of the multiplier of the
/// upper return germ at 0.
pub fn return_multiplier_modulus(a: Per1Param, im_sigma: f64) -> Result<f64> {
    let r = resit(a)?;
    Ok((-2.0 * PI * (im_sigma - PI * r)).exp())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseSample {
    /// Index of the point along the perturbed orbit of the base point.
    pub index: u64,
    pub point: Complex64,
    /// Unperturbed repelling coordinate of `point`.
    pub coordinate: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseEstimate {
    pub im_sigma: f64,
    /// Iterates from the base point to the first point in the annulus.
    pub transit_length: u64,
    pub samples: Vec<PhaseSample>,
    /// `max - min` of the per-sample estimates.
    pub stability: f64,
}

impl PhaseEstimate {
    pub fn is_reliable(&self) -> bool {
        self.stability < PHASE_STABILITY_THRESHOLD
    }
}

/// Lifted-phase estimator for perturbations of one `f_a`. Holds the
/// unperturbed coordinates and the base point so scans reuse them.
#[derive(Clone, Debug)]
pub struct PhaseEstimator {
    coords: FatouCoordinates,
    base_point: Complex64,
    base_im: f64,
    escape_radius: f64,
}

impl PhaseEstimator {
    pub fn new(a: Per1Param) -> Result<Self> {
        let coords = FatouCoordinates::new(a)?;
        let base_point = coords.attracting_inverse(Complex64::new(PHASE_BASE_COORDINATE, 0.0))?;
        let base_im = coords.attracting(base_point, 1e-9)?.value.im;
        Ok(Self {
            coords,
            base_point,
            base_im,
            escape_radius: DEFAULT_ESCAPE_RADIUS,
        })
    }

    pub fn base_point(&self) -> Complex64 {
        self.base_point
    }

    pub fn coordinates(&self) -> &FatouCoordinates {
        &self.coords
    }

    /// `Im sigma` for `f_a + delta`. Fails with [`Error::NoTransit`] when the
    /// base orbit escapes first and [`Error::Captured`] when it settles on an
    /// attracting fixed point or exhausts [`MAX_TRANSIT`].
    pub fn estimate(&self, delta: Complex64, tol: f64) -> Result<PhaseEstimate> {
        let map = perturb(self.coords.param(), delta)?;
        let g = map.cubic();
        let traps = attracting_traps(&g, &fixed_points(&g));
        let (r1, r2) = PHASE_ANNULUS;
        let in_annulus = |z: Complex64| z.re > 0.0 && (r1..=r2).contains(&z.norm());
        let r2_escape = self.escape_radius * self.escape_radius;

        let mut z = self.base_point;
        let mut n: u64 = 0;
        while !in_annulus(z) {
            z = g.eval(z);
            n += 1;
            if !(z.re.is_finite() && z.im.is_finite()) || z.norm_sqr() > r2_escape {
                return Err(Error::NoTransit(n));
            }
            if n >= MAX_TRANSIT || (n.is_multiple_of(64) && trapped(z, &traps)) {
                return Err(Error::Captured(n));
            }
        }
        let transit_length = n;
        let mut visit = vec![(n, z)];
        loop {
            z = g.eval(z);
            n += 1;
            if !in_annulus(z) {
                break;
            }
            visit.push((n, z));
        }
        let count = PHASE_SAMPLES.min(visit.len());
        let picks: Vec<(u64, Complex64)> = (0..count)
            .map(|k| {
                let idx = if count == 1 { 0 } else { k * (visit.len() - 1) / (count - 1) };
                visit[idx]
            })
            .collect();
        let mut samples = Vec::with_capacity(count);
        for (index, point) in picks {
            let coordinate = self.coords.repelling(point, tol)?.value;
            samples.push(PhaseSample {
                index,
                point,
                coordinate,
            });
        }
        let values: Vec<f64> = samples.iter().map(|s| s.coordinate.im - self.base_im).collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(PhaseEstimate {
            im_sigma: mean,
            transit_length,
            samples,
            stability: max - min,
        })
    }
}

/// Estimate of `Im sigma` for a perturbed map.
pub fn estimate_lifted_phase_im(map: &PerturbedMap, tol: f64) -> Result<PhaseEstimate> {
    PhaseEstimator::new(map.base)?.estimate(map.delta, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OutcomeVerdict {
    BothCriticalEscape,
    OneCriticalEscapes,
    AttractingFixedPoint,
    ParabolicFixedPoint,
    Undetermined,
}

impl OutcomeVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeVerdict::BothCriticalEscape => "BothCriticalEscape",
            OutcomeVerdict::OneCriticalEscapes => "OneCriticalEscapes",
            OutcomeVerdict::AttractingFixedPoint => "AttractingFixedPoint",
            OutcomeVerdict::ParabolicFixedPoint => "ParabolicFixedPoint",
            OutcomeVerdict::Undetermined => "Undetermined",
        }
    }
}

impl std::fmt::Display for OutcomeVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Budget {
    pub escape_radius: f64,
    pub max_iter: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            escape_radius: DEFAULT_ESCAPE_RADIUS,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationOutcome {
    pub verdict: OutcomeVerdict,
    pub critical_plus: OrbitClassification,
    pub critical_minus: OrbitClassification,
    pub fixed_points: Vec<FixedPointData>,
    /// The non-repelling fixed point witnessing the verdict, if any.
    pub witness: Option<FixedPointData>,
    /// Both critical orbits bounded and every fixed point repelling by
    /// [`MISIUREWICZ_MARGIN`].
    pub misiurewicz_like: bool,
}

impl PerturbationOutcome {
    pub fn min_multiplier_modulus(&self) -> f64 {
        self.fixed_points
            .iter()
            .map(FixedPointData::modulus)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Certified trap around an attracting fixed point `p`: inside the disk of
/// this radius `|g(z) - p| < |z - p|`, since
/// `g(z) - p = (z - p)(lambda + (3p + A)(z - p) + (z - p)^2)`.
fn trap_radius(map: &GenericCubic, p: &FixedPointData) -> f64 {
    let curvature = (p.location * 3.0 + map.a2).norm();
    (1.0 - p.modulus()) / (2.0 * (curvature + 1.0))
}

fn attracting_traps(map: &GenericCubic, fps: &[FixedPointData]) -> Vec<(Complex64, f64)> {
    fps.iter()
        .filter(|p| p.modulus() < 1.0 - ATTRACTING_MARGIN)
        .map(|p| (p.location, trap_radius(map, p)))
        .collect()
}

#[inline]
fn trapped(z: Complex64, traps: &[(Complex64, f64)]) -> bool {
    traps.iter().any(|&(p, r)| (z - p).norm_sqr() < r * r)
}

/// Escape-time classification that stops early once the orbit enters a
/// certified trap of an attracting fixed point (reported as bounded).
fn critical_orbit(
    map: &GenericCubic,
    c: Complex64,
    budget: Budget,
    traps: &[(Complex64, f64)],
) -> OrbitClassification {
    if traps.is_empty() {
        return classify_orbit(map, c, budget.escape_radius, budget.max_iter);
    }
    let r2 = budget.escape_radius * budget.escape_radius;
    let mut z = c;
    for n in 1..=budget.max_iter {
        z = map.eval(z);
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm_sqr() > r2 {
            return OrbitClassification {
                verdict: Verdict::Escaped,
                escape_iterate: Some(n),
                last_point: z,
            };
        }
        if trapped(z, traps) {
            break;
        }
    }
    OrbitClassification {
        verdict: Verdict::Bounded,
        escape_iterate: None,
        last_point: z,
    }
}

/// Classifies `f_a + delta` by its critical orbits and fixed points.
///
/// Verdicts in order of precedence: both critical points escape; an
/// attracting fixed point; a near-parabolic fixed point; exactly one
/// critical point escapes; otherwise undetermined.
pub fn classify_perturbation(map: &PerturbedMap, budget: Budget) -> PerturbationOutcome {
    classify_cubic(&map.cubic(), budget)
}

pub(crate) fn classify_cubic(g: &GenericCubic, budget: Budget) -> PerturbationOutcome {
    let fps = fixed_points(g);
    let traps = attracting_traps(g, &fps);
    let (c_plus, c_minus) = g.critical_points();
    let plus = critical_orbit(g, c_plus, budget, &traps);
    // real maps: the lower critical orbit is the conjugate of the upper one
    let minus = if g.is_real() && c_minus == c_plus.conj() {
        OrbitClassification {
            last_point: plus.last_point.conj(),
            ..plus
        }
    } else {
        critical_orbit(g, c_minus, budget, &traps)
    };

    let attracting = fps
        .iter()
        .filter(|p| p.modulus() < 1.0 - ATTRACTING_MARGIN)
        .min_by(|x, y| x.modulus().total_cmp(&y.modulus()))
        .copied();
    let parabolic = fps
        .iter()
        .filter(|p| (p.modulus() - 1.0).abs() < PARABOLIC_MARGIN)
        .min_by(|x, y| {
            (x.modulus() - 1.0)
                .abs()
                .total_cmp(&(y.modulus() - 1.0).abs())
        })
        .copied();
    let escapes = usize::from(plus.escaped()) + usize::from(minus.escaped());

    let (verdict, witness) = if escapes == 2 {
        (OutcomeVerdict::BothCriticalEscape, None)
    } else if let Some(p) = attracting {
        (OutcomeVerdict::AttractingFixedPoint, Some(p))
    } else if let Some(p) = parabolic {
        (OutcomeVerdict::ParabolicFixedPoint, Some(p))
    } else if escapes == 1 {
        (OutcomeVerdict::OneCriticalEscapes, None)
    } else {
        (OutcomeVerdict::Undetermined, None)
    };
    let misiurewicz_like =
        escapes == 0 && fps.iter().all(|p| p.modulus() > 1.0 + MISIUREWICZ_MARGIN);
    PerturbationOutcome {
        verdict,
        critical_plus: plus,
        critical_minus: minus,
        fixed_points: fps,
        witness,
        misiurewicz_like,
    }
}
