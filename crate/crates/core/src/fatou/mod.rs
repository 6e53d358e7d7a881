//! Attracting and repelling Fatou coordinates of `f_a` at the parabolic
//! point 0.
//!
//! Both coordinates are evaluated in `w = -1/(a z)`: an orbit is pushed into
//! the petal (forward for the attracting side, along the inverse branch
//! fixing 0 for the repelling side) and the asymptotic expansion of
//! [`series::AbelSeries`] is evaluated there, minus (plus) the number of
//! steps taken. The expansion uses the principal logarithm of `w`
//! (attracting) or `-w` (repelling), so both coordinates are real on the
//! corresponding real half-axis and commute with complex conjugation. The
//! real part carries no extra additive constant; only the imaginary part is
//! canonical.

pub mod height;
pub mod series;

use num_complex::Complex64;

use crate::dynamics::{resit, GenericCubic, Per1Param};
use crate::error::{Error, Result};
use series::{AbelSeries, DEFAULT_ORDER};

pub use height::{critical_ecalle_height, find_parameter_for_height, EcalleHeight};

/// Base petal threshold: a point is inside the attracting petal when
/// `Re w >= W0` (inside the repelling one when `Re w <= -W0`) and
/// `|Im w| <= PETAL_CONE * |Re w|`. `W0` is scaled by `max(1, 1/a^2)`.
pub const PETAL_RADIUS: f64 = 20.0;
pub const PETAL_CONE: f64 = 4.0;
/// Default tolerance on the Abel residual.
pub const DEFAULT_TOL: f64 = 1e-6;
const MAX_STEPS: u64 = 2_000_000;
const BASIN_ESCAPE_RADIUS: f64 = 10.0;
/// Smallest `|w|` at which the inverse branch fixing 0 is followed.
const MIN_BRANCH_MODULUS: f64 = 1.5;

/// Successive estimates must agree to `tol / 2`, but never to better than
/// the rounding noise of evaluating the expansion at `w`.
fn noise_floor(tol: f64, w: Complex64) -> f64 {
    (tol / 2.0).max(256.0 * f64::EPSILON * w.norm())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Attracting,
    Repelling,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FatouValue {
    pub value: Complex64,
    pub direction: Direction,
    pub iterations_used: u64,
    /// `|psi(f_a(z)) - psi(z) - 1|` measured a posteriori.
    pub residual: f64,
}

/// Fatou coordinates of one map `f_a`, `a` in `(0, sqrt 3)`.
#[derive(Clone, Debug)]
pub struct FatouCoordinates {
    param: Per1Param,
    a: f64,
    q: f64,
    series: AbelSeries,
    petal_radius: f64,
}

impl FatouCoordinates {
    pub fn new(param: Per1Param) -> Result<Self> {
        param.require_interval()?;
        let a = param.value();
        let q = 1.0 / (a * a);
        Ok(Self {
            param,
            a,
            q,
            series: AbelSeries::new(q, DEFAULT_ORDER),
            petal_radius: PETAL_RADIUS * q.max(1.0),
        })
    }

    /// Same coordinates with a different petal threshold `W0`. Changes only
    /// where the expansion is evaluated, not the normalization.
    pub fn with_petal_radius(mut self, radius: f64) -> Self {
        self.petal_radius = radius;
        self
    }

    pub fn param(&self) -> Per1Param {
        self.param
    }

    pub fn map(&self) -> GenericCubic {
        self.param.cubic()
    }

    pub fn resit(&self) -> f64 {
        self.series.rho()
    }

    pub fn petal_radius(&self) -> f64 {
        self.petal_radius
    }

    #[inline]
    pub fn to_w(&self, z: Complex64) -> Complex64 {
        -(z * self.a).inv()
    }

    #[inline]
    pub fn to_z(&self, w: Complex64) -> Complex64 {
        -(w * self.a).inv()
    }

    #[inline]
    fn forward_w(&self, w: Complex64) -> Complex64 {
        w * w * w / (w * w - w + self.q)
    }

    fn in_attracting_petal(&self, w: Complex64) -> bool {
        w.re >= self.petal_radius && w.im.abs() <= PETAL_CONE * w.re
    }

    fn in_repelling_petal(&self, w: Complex64) -> bool {
        -w.re >= self.petal_radius && w.im.abs() <= -PETAL_CONE * w.re
    }

    /// The preimage of `w` under `F` on the inverse branch fixing 0, i.e.
    /// the root of `u^3 - w (u^2 - u + q)` near `w - 1`.
    fn backward_w(&self, w: Complex64) -> Option<Complex64> {
        if w.norm() < MIN_BRANCH_MODULUS {
            return None;
        }
        let mut u = w - 1.0 - w.inv() * self.series.rho();
        for _ in 0..50 {
            let g = u * u * u - w * (u * u - u + self.q);
            let dg = u * u * 3.0 - w * (u * 2.0 - 1.0);
            let step = g / dg;
            if !step.re.is_finite() || !step.im.is_finite() {
                return None;
            }
            u -= step;
            if step.norm() <= 1e-15 * u.norm().max(1.0) {
                // the accepted root must stay on the branch through w - 1
                if (u - (w - 1.0)).norm() > 0.5 * w.norm() {
                    return None;
                }
                return Some(u);
            }
        }
        None
    }

    /// Raw attracting coordinate without the a-posteriori residual.
    fn attracting_raw(&self, z: Complex64, tol: f64) -> Result<(Complex64, u64)> {
        let map = self.map();
        let r2 = BASIN_ESCAPE_RADIUS * BASIN_ESCAPE_RADIUS;
        let mut z = z;
        let mut n: u64 = 0;
        loop {
            if !(z.re.is_finite() && z.im.is_finite()) || z.norm_sqr() > r2 {
                return Err(Error::NotInBasin(z, n));
            }
            if z.norm_sqr() != 0.0 && self.in_attracting_petal(self.to_w(z)) {
                break;
            }
            if z.norm_sqr() == 0.0 || n >= MAX_STEPS {
                return Err(Error::NoConvergence {
                    best: Complex64::new(f64::NAN, f64::NAN),
                    residual: f64::INFINITY,
                    iterations: n,
                });
            }
            z = map.eval(z);
            n += 1;
        }
        let mut w = self.to_w(z);
        let mut estimate = self.series.attracting(w) - n as f64;
        // push deeper (roughly doubling |w|) until successive values agree
        let stride = self.petal_radius.ceil() as u64;
        loop {
            for _ in 0..stride {
                w = self.forward_w(w);
            }
            n += stride;
            let next = self.series.attracting(w) - n as f64;
            let diff = (next - estimate).norm();
            estimate = next;
            if diff < noise_floor(tol, w) {
                return Ok((estimate, n));
            }
            if n >= MAX_STEPS {
                return Err(Error::NoConvergence {
                    best: estimate,
                    residual: diff,
                    iterations: n,
                });
            }
        }
    }

    /// Raw repelling coordinate without the a-posteriori residual.
    fn repelling_raw(&self, z: Complex64, tol: f64) -> Result<(Complex64, u64)> {
        if z.norm_sqr() == 0.0 {
            return Err(Error::BackwardOrbit(z));
        }
        let mut w = self.to_w(z);
        let mut n: u64 = 0;
        while !self.in_repelling_petal(w) {
            w = self.backward_w(w).ok_or(Error::BackwardOrbit(z))?;
            n += 1;
            if n >= MAX_STEPS {
                return Err(Error::BackwardOrbit(z));
            }
        }
        let mut estimate = self.series.repelling(w) + n as f64;
        let stride = self.petal_radius.ceil() as u64;
        loop {
            for _ in 0..stride {
                w = self.backward_w(w).ok_or(Error::BackwardOrbit(z))?;
            }
            n += stride;
            let next = self.series.repelling(w) + n as f64;
            let diff = (next - estimate).norm();
            estimate = next;
            if diff < noise_floor(tol, w) {
                return Ok((estimate, n));
            }
            if n >= MAX_STEPS {
                return Err(Error::NoConvergence {
                    best: estimate,
                    residual: diff,
                    iterations: n,
                });
            }
        }
    }

    /// Attracting Fatou coordinate `psi_att(z)`.
    ///
    /// Fails with [`Error::NotInBasin`] if the orbit escapes, and with
    /// [`Error::NoConvergence`] if the Abel residual exceeds `tol`.
    pub fn attracting(&self, z: Complex64, tol: f64) -> Result<FatouValue> {
        let inner = tol * 1e-2;
        let (value, iterations_used) = self.attracting_raw(z, inner)?;
        let (next, _) = self.attracting_raw(self.map().eval(z), inner)?;
        let residual = (next - value - 1.0).norm();
        if residual >= tol {
            return Err(Error::NoConvergence {
                best: value,
                residual,
                iterations: iterations_used,
            });
        }
        Ok(FatouValue {
            value,
            direction: Direction::Attracting,
            iterations_used,
            residual,
        })
    }

    /// Repelling Fatou coordinate `psi_rep(z)` along the backward orbit
    /// converging to 0.
    pub fn repelling(&self, z: Complex64, tol: f64) -> Result<FatouValue> {
        let inner = tol * 1e-2;
        let (value, iterations_used) = self.repelling_raw(z, inner)?;
        let (next, _) = self.repelling_raw(self.map().eval(z), inner)?;
        let residual = (next - value - 1.0).norm();
        if residual >= tol {
            return Err(Error::NoConvergence {
                best: value,
                residual,
                iterations: iterations_used,
            });
        }
        Ok(FatouValue {
            value,
            direction: Direction::Repelling,
            iterations_used,
            residual,
        })
    }

    /// Solves `expansion(u) = target` by Newton's method from `seed`.
    fn invert_series(
        &self,
        target: Complex64,
        seed: Complex64,
        repelling: bool,
    ) -> Result<Complex64> {
        let mut u = seed;
        for _ in 0..100 {
            let (value, deriv) = if repelling {
                (self.series.repelling(u), self.series.repelling_derivative(u))
            } else {
                (self.series.attracting(u), self.series.attracting_derivative(u))
            };
            let step = (value - target) / deriv;
            if !step.re.is_finite() || !step.im.is_finite() {
                return Err(Error::InverseDivergence(u));
            }
            // damp steps that would jump across the branch cut
            let step = if step.norm() > 0.25 * u.norm() {
                step * (0.25 * u.norm() / step.norm())
            } else {
                step
            };
            u -= step;
            if step.norm() <= 1e-15 * u.norm() {
                return Ok(u);
            }
        }
        Err(Error::InverseDivergence(u))
    }

    /// A point `z` with `psi_rep(z) = zeta`.
    ///
    /// The inverse is entire: `zeta - n` is pulled into the petal, inverted
    /// through the expansion, and pushed forward `n` times by `f_a`.
    pub fn repelling_inverse(&self, zeta: Complex64) -> Result<Complex64> {
        let shift = (zeta.re + self.petal_radius + 4.0).ceil().max(0.0);
        let n = shift as u64;
        let target = zeta - shift;
        let seed = target + (-target).ln() * self.series.rho();
        let w = self.invert_series(target, seed, true)?;
        let map = self.map();
        let mut z = self.to_z(w);
        for _ in 0..n {
            z = map.eval(z);
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::InverseDivergence(z));
            }
        }
        Ok(z)
    }

    /// A point `z` with `psi_att(z) = zeta`, obtained along the backward
    /// orbit from deep inside the attracting petal.
    pub fn attracting_inverse(&self, zeta: Complex64) -> Result<Complex64> {
        let shift = (self.petal_radius + 4.0 - zeta.re).ceil().max(0.0);
        let n = shift as u64;
        let target = zeta + shift;
        let seed = target + target.ln() * self.series.rho();
        let mut w = self.invert_series(target, seed, false)?;
        for _ in 0..n {
            w = self.backward_w(w).ok_or(Error::InverseDivergence(self.to_z(w)))?;
        }
        Ok(self.to_z(w))
    }
}

/// `psi_att(z)` for `f_a`.
pub fn attracting_coordinate(a: Per1Param, z: Complex64, tol: f64) -> Result<FatouValue> {
    FatouCoordinates::new(a)?.attracting(z, tol)
}

/// `psi_rep(z)` for `f_a`.
pub fn repelling_coordinate(a: Per1Param, z: Complex64, tol: f64) -> Result<FatouValue> {
    FatouCoordinates::new(a)?.repelling(z, tol)
}

/// `(psi_rep)^{-1}(zeta)` for `f_a`.
pub fn repelling_coordinate_inverse(a: Per1Param, zeta: Complex64) -> Result<Complex64> {
    FatouCoordinates::new(a)?.repelling_inverse(zeta)
}

/// Derivative of the upper horn map at 0: `exp(2 pi^2 resit)`.
pub fn horn_multiplier(a: Per1Param) -> Result<f64> {
    a.require_interval()?;
    let r = resit(a)?;
    Ok((2.0 * std::f64::consts::PI.powi(2) * r).exp())
}

/// Measured `Im(psi_att - psi_rep)` at one point of the overlap of the
/// petals, against the asymptotic value `-+ pi resit`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HornOffset {
    /// Imaginary part of `w = -1/(a z)` at the sample point.
    pub height: f64,
    pub measured: f64,
    pub expected: f64,
}

impl HornOffset {
    pub fn drift(&self) -> f64 {
        (self.measured - self.expected).abs()
    }
}

/// Samples `psi_att - psi_rep` at `w = i * height` for each height. Positive
/// heights probe the upper end (expected `-pi resit`), negative heights the
/// lower end (expected `+pi resit`).
pub fn horn_offset_diagnostic(a: Per1Param, heights: &[f64], tol: f64) -> Result<Vec<HornOffset>> {
    let coords = FatouCoordinates::new(a)?;
    let pi_resit = std::f64::consts::PI * coords.resit();
    heights
        .iter()
        .map(|&h| {
            let z = coords.to_z(Complex64::new(0.0, h));
            let att = coords.attracting(z, tol)?.value;
            let rep = coords.repelling(z, tol)?.value;
            Ok(HornOffset {
                height: h,
                measured: (att - rep).im,
                expected: if h > 0.0 { -pi_resit } else { pi_resit },
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: f64) -> Per1Param {
        Per1Param::new(a).unwrap()
    }

    #[test]
    fn attracting_is_real_on_negative_axis() {
        let v = attracting_coordinate(p(1.0), Complex64::new(-0.1, 0.0), 1e-8).unwrap();
        assert_eq!(v.value.im, 0.0);
        assert!(v.residual < 1e-8);
    }

    #[test]
    fn attracting_rejects_escaping_point() {
        let err = attracting_coordinate(p(1.0), Complex64::new(1.0, 0.0), 1e-6).unwrap_err();
        assert!(matches!(err, Error::NotInBasin(..)));
    }

    #[test]
    fn interval_is_enforced() {
        assert!(FatouCoordinates::new(p(0.0)).is_err());
        assert!(FatouCoordinates::new(p(1.8)).is_err());
    }

    #[test]
    fn repelling_is_real_on_positive_axis() {
        let v = repelling_coordinate(p(1.2), Complex64::new(0.1, 0.0), 1e-8).unwrap();
        assert_eq!(v.value.im, 0.0);
    }

    #[test]
    fn repelling_conjugation() {
        let coords = FatouCoordinates::new(p(1.2)).unwrap();
        let z = Complex64::new(0.08, 0.03);
        let v = coords.repelling(z, 1e-8).unwrap().value;
        let vc = coords.repelling(z.conj(), 1e-8).unwrap().value;
        assert!((v.conj() - vc).norm() < 2e-8);
    }

    #[test]
    fn repelling_inverse_round_trip() {
        let coords = FatouCoordinates::new(p(1.2)).unwrap();
        for zeta in [
            Complex64::new(-5.0, 0.0),
            Complex64::new(-3.0, 0.7),
            Complex64::new(-10.0, -2.0),
        ] {
            let z = coords.repelling_inverse(zeta).unwrap();
            let back = coords.repelling(z, 1e-9).unwrap().value;
            assert!((back - zeta).norm() < 1e-6, "{zeta} -> {z} -> {back}");
        }
        let z = coords.repelling_inverse(Complex64::new(-5.0, 0.0)).unwrap();
        assert_eq!(z.im, 0.0);
        assert!(z.re > 0.0);
    }

    #[test]
    fn attracting_inverse_round_trip() {
        let coords = FatouCoordinates::new(p(1.3)).unwrap();
        let z = coords.attracting_inverse(Complex64::new(5.0, 0.0)).unwrap();
        assert!(z.re < 0.0 && z.im == 0.0);
        let back = coords.attracting(z, 1e-9).unwrap().value;
        assert!((back - 5.0).norm() < 1e-8);
    }

    #[test]
    fn horn_multiplier_examples() {
        assert_eq!(horn_multiplier(p(1.0)).unwrap(), 1.0);
        let r = 1.0 - 1.0 / 1.69;
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((horn_multiplier(p(1.3)).unwrap() - (2.0 * pi2 * r).exp()).abs() < 1e-9);
        assert!((2.0 * pi2 * r - 8.059_203_6).abs() < 1e-6);
        let low = horn_multiplier(p(0.5)).unwrap();
        assert!((low - (-6.0 * pi2).exp()).abs() < 1e-30 && low < 1.0);
    }

    #[test]
    fn horn_offsets_approach_pi_resit() {
        let offsets = horn_offset_diagnostic(p(1.3), &[3.0, -3.0, 6.0], 1e-8).unwrap();
        for o in offsets {
            assert!(o.drift() < 1e-3, "{o:?}");
        }
    }
}
