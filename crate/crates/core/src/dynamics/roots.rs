//! Roots of monic complex cubics.
//!
//! Closed-form (Cardano) roots of the depressed cubic, followed by a fixed
//! number of Newton polishing steps on the original polynomial. Roots closer
//! than [`MULTIPLE_ROOT_DISTANCE`] are merged into a cluster whose mean is
//! reported with its multiplicity.

use num_complex::Complex64;

/// Pairwise distance below which two roots are reported as one multiple root.
pub const MULTIPLE_ROOT_DISTANCE: f64 = 1e-7;

const POLISH_STEPS: usize = 2;

/// A root together with its multiplicity (1, 2 or 3).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: u8,
}

/// Evaluates `z^3 + b2 z^2 + b1 z + b0` and its derivative by Horner's rule.
#[inline]
pub fn horner(coeffs: [Complex64; 3], z: Complex64) -> (Complex64, Complex64) {
    let [b2, b1, b0] = coeffs;
    let p = ((z + b2) * z + b1) * z + b0;
    let dp = (z * 3.0 + b2 * 2.0) * z + b1;
    (p, dp)
}

fn cbrt(z: Complex64) -> Complex64 {
    if z.norm_sqr() == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::from_polar(z.norm().cbrt(), z.arg() / 3.0)
    }
}

/// The three roots of `z^3 + b2 z^2 + b1 z + b0`, repeated by multiplicity,
/// before any clustering. Order is unspecified.
pub fn cubic_roots_raw(coeffs: [Complex64; 3]) -> [Complex64; 3] {
    let [b2, b1, b0] = coeffs;
    let shift = b2 / 3.0;
    // y^3 + p y + r with z = y - shift
    let p = b1 - b2 * shift;
    let r = b0 - b1 * shift + shift * shift * shift * 2.0;
    let half_r = r * 0.5;
    let disc = (half_r * half_r + (p / 3.0) * (p / 3.0) * (p / 3.0)).sqrt();
    let s1 = -half_r + disc;
    let s2 = -half_r - disc;
    let u = if s1.norm_sqr() >= s2.norm_sqr() { cbrt(s1) } else { cbrt(s2) };
    let omega = Complex64::new(-0.5, 3f64.sqrt() * 0.5);
    let omega2 = omega.conj();
    let ys = if u.norm_sqr() == 0.0 {
        // p == 0 and r == 0: triple root
        [Complex64::new(0.0, 0.0); 3]
    } else {
        let v = -p / (u * 3.0);
        [u + v, omega * u + omega2 * v, omega2 * u + omega * v]
    };
    let mut zs = ys.map(|y| y - shift);
    for z in zs.iter_mut() {
        for _ in 0..POLISH_STEPS {
            let (f, df) = horner(coeffs, *z);
            if df.norm_sqr() == 0.0 {
                break;
            }
            let step = f / df;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *z -= step;
        }
    }
    zs
}

/// Roots of `z^3 + b2 z^2 + b1 z + b0` with multiple roots merged.
///
/// The total multiplicity is always 3.
pub fn cubic_roots(coeffs: [Complex64; 3]) -> Vec<Root> {
    let zs = cubic_roots_raw(coeffs);
    let close = |i: usize, j: usize| (zs[i] - zs[j]).norm() < MULTIPLE_ROOT_DISTANCE;
    let mut out = Vec::with_capacity(3);
    let mut used = [false; 3];
    for i in 0..3 {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut sum = zs[i];
        let mut count = 1u8;
        for j in (i + 1)..3 {
            if !used[j] && close(i, j) {
                used[j] = true;
                sum += zs[j];
                count += 1;
            }
        }
        out.push(Root {
            value: sum / f64::from(count),
            multiplicity: count,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn simple_real_roots() {
        // (z-1)(z-2)(z+3) = z^3 - 7z + 6
        let roots = cubic_roots([c(0.0, 0.0), c(-7.0, 0.0), c(6.0, 0.0)]);
        assert_eq!(roots.len(), 3);
        let mut re: Vec<f64> = roots.iter().map(|r| r.value.re).collect();
        re.sort_by(f64::total_cmp);
        for (got, want) in re.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-13);
        }
    }

    #[test]
    fn double_root_is_merged() {
        // z^3 + z^2 = z^2 (z + 1)
        let roots = cubic_roots([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(roots.len(), 2);
        let double = roots.iter().find(|r| r.multiplicity == 2).unwrap();
        assert!(double.value.norm() < 1e-9);
        let simple = roots.iter().find(|r| r.multiplicity == 1).unwrap();
        assert!((simple.value + 1.0).norm() < 1e-14);
    }

    #[test]
    fn triple_root() {
        // (z - i)^3 = z^3 - 3i z^2 - 3 z + i
        let roots = cubic_roots([c(0.0, -3.0), c(-3.0, 0.0), c(0.0, 1.0)]);
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].multiplicity, 3);
        assert!((roots[0].value - c(0.0, 1.0)).norm() < 1e-6);
    }

    #[test]
    fn small_split_pair() {
        // z^3 + z^2 + 1e-6: two roots near +-1e-3 i, one near -1
        let roots = cubic_roots([c(1.0, 0.0), c(0.0, 0.0), c(1e-6, 0.0)]);
        assert_eq!(roots.len(), 3);
        for r in &roots {
            let (p, _) = horner([c(1.0, 0.0), c(0.0, 0.0), c(1e-6, 0.0)], r.value);
            let scale = if r.value.norm() < 0.01 { 1e-20 } else { 1e-15 };
            assert!(p.norm() < scale, "residual {p}");
        }
    }
}
