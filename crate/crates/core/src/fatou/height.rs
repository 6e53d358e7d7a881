//! Critical Ecalle height `h_a` and its inverse `t -> a(t)`.

use num_complex::Complex64;

use super::FatouCoordinates;
use crate::dynamics::{critical_points, Per1Param, SQRT3};
use crate::error::{Error, Result};

/// Bracket searched by [`find_parameter_for_height`].
pub const HEIGHT_BRACKET: (f64, f64) = (0.05, SQRT3 - 0.001);

/// Tolerance used for the Fatou-coordinate evaluations inside the height
/// map, tighter than any tolerance callers ask of the height itself.
const INNER_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EcalleHeight {
    /// `Im psi_att(c_+) - Im psi_att(c_-)`.
    pub h: f64,
    pub psi_plus: Complex64,
    pub psi_minus: Complex64,
}

impl EcalleHeight {
    /// `|Re psi_att(c_+) - Re psi_att(c_-)|`.
    pub fn real_mismatch(&self) -> f64 {
        (self.psi_plus.re - self.psi_minus.re).abs()
    }
}

/// Critical Ecalle height of `f_a`.
pub fn critical_ecalle_height(a: Per1Param, tol: f64) -> Result<EcalleHeight> {
    let coords = FatouCoordinates::new(a)?;
    height_with(&coords, tol)
}

pub(crate) fn height_with(coords: &FatouCoordinates, tol: f64) -> Result<EcalleHeight> {
    let (c_plus, c_minus) = critical_points(coords.param());
    let inner = tol.min(INNER_TOL);
    let psi_plus = coords.attracting(c_plus, inner)?.value;
    let psi_minus = coords.attracting(c_minus, inner)?.value;
    let height = EcalleHeight {
        h: psi_plus.im - psi_minus.im,
        psi_plus,
        psi_minus,
    };
    if height.real_mismatch() >= tol {
        return Err(Error::NoConvergence {
            best: psi_plus,
            residual: height.real_mismatch(),
            iterations: 0,
        });
    }
    Ok(height)
}

fn h_of(a: f64) -> Result<f64> {
    Ok(critical_ecalle_height(Per1Param::in_interval(a)?, INNER_TOL)?.h)
}

/// The parameter `a(t)` in `(0, sqrt 3)` with critical Ecalle height `t`,
/// found by bisection on [`HEIGHT_BRACKET`], where the height decreases
/// in `a`. The bracket is narrowed until it is shorter than `tol`, or until
/// the height at the midpoint matches `t` to `tol * 1e-3`.
pub fn find_parameter_for_height(t: f64, tol: f64) -> Result<Per1Param> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("height t = {t} must be positive")));
    }
    let (mut lo, mut hi) = HEIGHT_BRACKET;
    let h_lo = h_of(lo)?;
    let h_hi = h_of(hi)?;
    if !(t < h_lo && t > h_hi) {
        return Err(Error::HeightOutOfRange(t, h_hi, h_lo));
    }
    let a_tol = tol * 1e-3;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= a_tol.max(4.0 * f64::EPSILON * mid) {
            break;
        }
        let h = h_of(mid)?;
        if (h - t).abs() <= tol * 1e-3 {
            return Per1Param::in_interval(mid);
        }
        if h > t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Per1Param::in_interval(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn height_is_positive_and_symmetric() {
        for a in [0.3, 0.8, 1.0, 1.3, 1.7] {
            let h = critical_ecalle_height(Per1Param::new(a).unwrap(), 1e-8).unwrap();
            assert!(h.h > 0.0, "a = {a}: {h:?}");
            assert!(h.real_mismatch() < 1e-12);
            assert!((h.psi_plus.im + h.psi_minus.im).abs() < 1e-12);
        }
    }

    #[test]
    fn height_decreases_in_a() {
        let grid: Vec<f64> = (1..=12).map(|k| 0.14 * k as f64).collect();
        let hs: Vec<f64> = grid
            .iter()
            .map(|&a| critical_ecalle_height(Per1Param::new(a).unwrap(), 1e-8).unwrap().h)
            .collect();
        for pair in hs.windows(2) {
            assert!(pair[0] > pair[1], "{hs:?}");
        }
    }

    #[test]
    fn find_rejects_out_of_range() {
        assert!(matches!(find_parameter_for_height(-1.0, 1e-6), Err(Error::InvalidParameter(_))));
        assert!(matches!(
            find_parameter_for_height(1e6, 1e-6),
            Err(Error::HeightOutOfRange(..))
        ));
    }

    #[test]
    fn find_round_trip() {
        let a = find_parameter_for_height(1.9, 1e-8).unwrap();
        let h = critical_ecalle_height(a, 1e-9).unwrap().h;
        assert!((h - 1.9).abs() < 1e-6);
    }
}
