//! Cubic maps, orbits, fixed points and residue indices.
//!
//! The slice of interest is `f_a(z) = z + a z^2 + z^3` with real `a`; its
//! perturbations live in the space of all monic cubics
//! `p(z) = z^3 + A z^2 + B z + C`.

pub mod roots;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use roots::cubic_roots;

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Default escape radius for orbit classification.
pub const DEFAULT_ESCAPE_RADIUS: f64 = 10.0;
/// Default iteration budget for orbit classification.
pub const DEFAULT_MAX_ITER: u64 = 100_000;
/// `|lambda - 1|` at or below this leaves the fixed-point index undefined.
pub const INDEX_DEGENERACY: f64 = 1e-9;
/// Radius of the circle used by the quadrature version of the residue index.
pub const CONTOUR_RADIUS: f64 = 1e-2;
/// Default number of trapezoid nodes for the contour integral.
pub const CONTOUR_NODES: usize = 1024;

/// The real parameter `a` of `f_a(z) = z + a z^2 + z^3`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Per1Param(f64);

impl Per1Param {
    /// Any finite `a`.
    pub fn new(a: f64) -> Result<Self> {
        if a.is_finite() {
            Ok(Self(a))
        } else {
            Err(Error::InvalidParameter(format!("a = {a} is not finite")))
        }
    }

    /// `a` restricted to the open interval `(0, sqrt 3)`.
    pub fn in_interval(a: f64) -> Result<Self> {
        let p = Self::new(a)?;
        p.require_interval()?;
        Ok(p)
    }

    pub fn require_interval(self) -> Result<()> {
        if self.0 > 0.0 && self.0 < SQRT3 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "a = {} lies outside the interval (0, sqrt 3)",
                self.0
            )))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// The map `f_a` as a generic cubic.
    pub fn cubic(self) -> GenericCubic {
        GenericCubic::new(
            Complex64::new(self.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        )
    }

    /// Critical points are non-degenerate iff `a^2 != 3`.
    pub fn has_simple_critical_points(self) -> bool {
        self.0 * self.0 != 3.0
    }
}

/// Monic cubic `z^3 + A z^2 + B z + C`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenericCubic {
    pub a2: Complex64,
    pub a1: Complex64,
    pub a0: Complex64,
}

impl GenericCubic {
    pub fn new(a2: Complex64, a1: Complex64, a0: Complex64) -> Self {
        Self { a2, a1, a0 }
    }

    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        ((z + self.a2) * z + self.a1) * z + self.a0
    }

    #[inline]
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        (z * 3.0 + self.a2 * 2.0) * z + self.a1
    }

    /// `true` when all coefficients are real, so the map commutes with
    /// complex conjugation.
    pub fn is_real(&self) -> bool {
        self.a2.im == 0.0 && self.a1.im == 0.0 && self.a0.im == 0.0
    }

    /// Critical points, ordered by decreasing imaginary part.
    pub fn critical_points(&self) -> (Complex64, Complex64) {
        // 3z^2 + 2A z + B = 0
        let disc = (self.a2 * self.a2 - self.a1 * 3.0).sqrt();
        let r1 = (-self.a2 + disc) / 3.0;
        let r2 = (-self.a2 - disc) / 3.0;
        if r1.im >= r2.im {
            (r1, r2)
        } else {
            (r2, r1)
        }
    }
}

/// `p(z)` for a monic cubic.
#[inline]
pub fn eval(map: &GenericCubic, z: Complex64) -> Complex64 {
    map.eval(z)
}

/// Critical points of `f_a`, the roots of `3z^2 + 2az + 1`.
///
/// `c_plus` has non-negative imaginary part. For `|a| < sqrt 3` the pair is
/// an exact conjugate pair; at `a = +-sqrt 3` both equal the double critical
/// point `-a/3`.
pub fn critical_points(a: Per1Param) -> (Complex64, Complex64) {
    let a = a.value();
    let disc = a * a - 3.0;
    if disc < 0.0 {
        let c = Complex64::new(-a / 3.0, (-disc).sqrt() / 3.0);
        (c, c.conj())
    } else {
        let s = disc.sqrt();
        (
            Complex64::new((-a + s) / 3.0, 0.0),
            Complex64::new((-a - s) / 3.0, 0.0),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Bounded,
    Escaped,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitClassification {
    pub verdict: Verdict,
    /// Iterate at which `|z|` first exceeded the escape radius.
    pub escape_iterate: Option<u64>,
    pub last_point: Complex64,
}

impl OrbitClassification {
    pub fn escaped(&self) -> bool {
        self.verdict == Verdict::Escaped
    }
}

#[inline]
fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Escape-time classification of the orbit of `z0`.
///
/// Non-finite intermediates count as escape at that iterate.
pub fn classify_orbit(
    map: &GenericCubic,
    z0: Complex64,
    escape_radius: f64,
    max_iter: u64,
) -> OrbitClassification {
    let r2 = escape_radius * escape_radius;
    let mut z = z0;
    if !finite(z) || z.norm_sqr() > r2 {
        return OrbitClassification {
            verdict: Verdict::Escaped,
            escape_iterate: Some(0),
            last_point: z,
        };
    }
    for n in 1..=max_iter {
        z = map.eval(z);
        if !finite(z) || z.norm_sqr() > r2 {
            return OrbitClassification {
                verdict: Verdict::Escaped,
                escape_iterate: Some(n),
                last_point: z,
            };
        }
    }
    OrbitClassification {
        verdict: Verdict::Bounded,
        escape_iterate: None,
        last_point: z,
    }
}

/// A fixed point of a cubic with its multiplier and holomorphic index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedPointData {
    pub location: Complex64,
    pub multiplier: Complex64,
    /// `1 / (1 - multiplier)`; `None` when the multiplier is within
    /// [`INDEX_DEGENERACY`] of 1.
    pub index: Option<Complex64>,
    pub multiplicity: u8,
}

impl FixedPointData {
    pub fn at(map: &GenericCubic, location: Complex64, multiplicity: u8) -> Self {
        let multiplier = map.derivative(location);
        Self {
            location,
            multiplier,
            index: index_of(multiplier),
            multiplicity,
        }
    }

    pub fn modulus(&self) -> f64 {
        self.multiplier.norm()
    }

    /// `|lambda|^2 - 1`, computed without cancellation against 1.
    pub fn modulus_sqr_minus_one(&self) -> f64 {
        let mu = self.multiplier - 1.0;
        2.0 * mu.re + mu.norm_sqr()
    }
}

/// Holomorphic fixed-point index from the multiplier.
pub fn index_of(multiplier: Complex64) -> Option<Complex64> {
    let mu = Complex64::new(1.0, 0.0) - multiplier;
    if mu.norm() <= INDEX_DEGENERACY {
        None
    } else {
        Some(mu.inv())
    }
}

/// All fixed points of `map`, i.e. roots of `p(z) - z`, with multiplicity.
pub fn fixed_points(map: &GenericCubic) -> Vec<FixedPointData> {
    let shifted = [map.a2, map.a1 - 1.0, map.a0];
    cubic_roots(shifted)
        .into_iter()
        .map(|r| FixedPointData::at(map, r.value, r.multiplicity))
        .collect()
}

/// Residue fixed-point index of the parabolic point 0 of `f_a`: `1/a^2`.
pub fn residue_index(a: Per1Param) -> Result<f64> {
    let a = a.value();
    if a == 0.0 {
        return Err(Error::InvalidParameter(
            "a = 0: the origin is a double parabolic point".into(),
        ));
    }
    Ok(1.0 / (a * a))
}

/// Résidu itératif `1 - 1/a^2`.
pub fn resit(a: Per1Param) -> Result<f64> {
    Ok(1.0 - residue_index(a)?)
}

/// `(1/2 pi i) * integral of dz / (z - f_a(z))` on the circle `|z| = radius`
/// by the trapezoid rule with `nodes` equally spaced points.
pub fn residue_index_contour(a: Per1Param, radius: f64, nodes: usize) -> Result<Complex64> {
    if a.value() == 0.0 {
        return Err(Error::InvalidParameter(
            "a = 0: the origin is a double parabolic point".into(),
        ));
    }
    if nodes == 0 || !(radius > 0.0) {
        return Err(Error::InvalidParameter(
            "contour needs a positive radius and at least one node".into(),
        ));
    }
    let map = a.cubic();
    let n = nodes as f64;
    // dz = i z dtheta, so the integral is the mean of z / (z - f(z)).
    let sum: Complex64 = (0..nodes)
        .map(|k| {
            let z = Complex64::from_polar(radius, 2.0 * PI * k as f64 / n);
            z / (z - map.eval(z))
        })
        .sum();
    Ok(sum / n)
}

/// The centered chart `z^3 - 3c^2 z + 2c^3 + v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CenteredForm {
    pub c: Complex64,
    pub v: Complex64,
    /// Translation `z -> z + shift` conjugating the input to the centered map.
    pub shift: Complex64,
}

/// Conjugates `map` by `z -> z + A/3` and reads off `(c, v)` with
/// `Im c >= 0` (and `Re c >= 0` when `c` is real).
pub fn to_monic_centered(map: &GenericCubic) -> CenteredForm {
    let shift = map.a2 / 3.0;
    let linear = map.a1 - map.a2 * shift;
    // h(y) = p(y - shift) + shift
    let constant = map.eval(-shift) + shift;
    let mut c = (-linear / 3.0).sqrt();
    if c.im < 0.0 || (c.im == 0.0 && c.re < 0.0) {
        c = -c;
    }
    let v = constant - c * c * c * 2.0;
    CenteredForm { c, v, shift }
}

/// Inverse of [`to_monic_centered`].
pub fn from_monic_centered(form: &CenteredForm) -> GenericCubic {
    let CenteredForm { c, v, shift: s } = *form;
    let linear = -c * c * 3.0;
    let constant = c * c * c * 2.0 + v;
    // p(z) = h(z + s) - s
    GenericCubic::new(
        s * 3.0,
        s * s * 3.0 + linear,
        s * s * s + linear * s + constant - s,
    )
}
