//! Independent oracles for the Fatou coordinates: plain orbits of `f_a`
//! followed to great depth and corrected to first order, with no use of
//! the library's series or petal logic.

use num_complex::Complex64;
use per1lab::dynamics::Per1Param;
use per1lab::fatou::FatouCoordinates;

fn f(a: f64, z: Complex64) -> Complex64 {
    z + z * z * a + z * z * z
}

/// First coefficient of the tail, `1/2 - q/2 - q^2` with `q = 1/a^2`,
/// derived by hand from the Abel equation in `w = -1/(a z)`.
fn c1(a: f64) -> f64 {
    let q = 1.0 / (a * a);
    0.5 - 0.5 * q - q * q
}

/// `w_n - n - rho Log w_n + c1 / w_n` after `n` forward steps.
fn naive_attracting(a: f64, z0: Complex64, n: u64) -> Complex64 {
    let rho = 1.0 - 1.0 / (a * a);
    let mut z = z0;
    for _ in 0..n {
        z = f(a, z);
    }
    let w = -1.0 / (z * a);
    w - n as f64 - w.ln() * rho + c1(a) / w
}

/// Real preimage of `z > 0` under `f_a` in `(0, z)` by bisection.
fn real_preimage(a: f64, z: f64) -> f64 {
    let g = |u: f64| u + a * u * u + u * u * u;
    let (mut lo, mut hi) = (0.0, z);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < z {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `w_{-n} + n - rho Log(-w_{-n}) + c1 / w_{-n}` along the real backward
/// orbit of `z > 0`.
fn naive_repelling_real(a: f64, z0: f64, n: u64) -> f64 {
    let rho = 1.0 - 1.0 / (a * a);
    let mut z = z0;
    for _ in 0..n {
        z = real_preimage(a, z);
    }
    let w = -1.0 / (a * z);
    w + n as f64 - rho * (-w).ln() + c1(a) / w
}

#[test]
fn attracting_coordinate_matches_deep_forward_orbit() {
    for (a, z0) in [
        (1.2, Complex64::new(-0.1, 0.05)),
        (0.9, Complex64::new(-0.3, -0.1)),
        (1.5, Complex64::new(-0.05, 0.02)),
    ] {
        let coords = FatouCoordinates::new(Per1Param::new(a).unwrap()).unwrap();
        let lib = coords.attracting(z0, 1e-9).unwrap().value;
        let oracle = naive_attracting(a, z0, 200_000);
        assert!((lib - oracle).norm() < 1e-6, "a={a}: lib {lib} oracle {oracle}");
    }
}

#[test]
fn repelling_inverse_matches_real_bisection() {
    let a = 1.2;
    let target = -5.0;
    let depth = 20_000;
    let (mut lo, mut hi) = (0.01, 0.5);
    assert!(naive_repelling_real(a, lo, depth) < target);
    assert!(naive_repelling_real(a, hi, depth) > target);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if naive_repelling_real(a, mid, depth) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let oracle = 0.5 * (lo + hi);
    let coords = FatouCoordinates::new(Per1Param::new(a).unwrap()).unwrap();
    let lib = coords.repelling_inverse(Complex64::new(target, 0.0)).unwrap();
    assert!(lib.im.abs() < 1e-12, "{lib}");
    assert!((lib.re - oracle).abs() < 1e-7, "lib {lib} oracle {oracle}");
    let back = coords.repelling(Complex64::new(oracle, 0.0), 1e-9).unwrap().value;
    assert!((back - target).norm() < 1e-6, "{back}");
}

#[test]
fn repelling_coordinate_matches_real_backward_orbit() {
    for (a, z0) in [(1.2, 0.2), (1.4, 0.05), (0.8, 0.3)] {
        let coords = FatouCoordinates::new(Per1Param::new(a).unwrap()).unwrap();
        let lib = coords.repelling(Complex64::new(z0, 0.0), 1e-9).unwrap().value;
        let oracle = naive_repelling_real(a, z0, 50_000);
        assert!(lib.im.abs() < 1e-12);
        assert!((lib.re - oracle).abs() < 1e-6, "a={a}: lib {lib} oracle {oracle}");
    }
}
