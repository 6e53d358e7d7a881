//! Asymptotic expansion of the Fatou coordinate at the parabolic point.
//!
//! In the coordinate `w = -1/(a z)` the map `f_a` becomes
//! `F(w) = w^3 / (w^2 - w + q)` with `q = 1/a^2`, i.e.
//! `F(w) = w + 1 + rho/w + O(1/w^2)` with `rho = 1 - q`. The Abel equation
//! `Psi(F(w)) = Psi(w) + 1` has the formal solution
//!
//! ```text
//! Psi(w) = w - rho log w + sum_{k >= 1} c_k w^{-k}
//! ```
//!
//! with no logarithmic terms in the tail. The coefficients `c_k` depend on
//! `q` only and are produced here by solving the Abel equation order by
//! order in `u = 1/w`.

use num_complex::Complex64;

/// Truncation order used by default.
pub const DEFAULT_ORDER: usize = 10;

/// Truncated power series in one variable, coefficient `i` multiplies `u^i`.
#[derive(Clone, Debug)]
struct Poly(Vec<f64>);

impl Poly {
    fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    fn mul(&self, other: &Poly) -> Poly {
        let len = self.0.len();
        let mut out = Poly::zeros(len);
        for (i, &x) in self.0.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (j, &y) in other.0.iter().enumerate().take(len - i) {
                out.0[i + j] += x * y;
            }
        }
        out
    }
}

/// The coefficients `c_1..c_K` for a given `q`.
#[derive(Clone, Debug)]
pub struct AbelSeries {
    rho: f64,
    coeffs: Vec<f64>,
}

impl AbelSeries {
    pub fn new(q: f64, order: usize) -> Self {
        let len = order + 3;
        // s(u) = 1 - u + q u^2, so that 1/F = u s(u)
        let mut s = Poly::zeros(len);
        s.0[0] = 1.0;
        s.0[1] = -1.0;
        if len > 2 {
            s.0[2] = q;
        }
        let x = {
            let mut x = s.clone();
            x.0[0] = 0.0;
            x
        };
        // s = 1 + x
        let mut inv_s = Poly::zeros(len);
        let mut log_s = Poly::zeros(len);
        let mut pow = Poly::zeros(len);
        pow.0[0] = 1.0;
        for j in 1..len {
            pow = pow.mul(&x);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            for i in 0..len {
                // 1/(1+x) = sum (-x)^j, log(1+x) = sum (-1)^{j+1} x^j / j
                inv_s.0[i] += sign * pow.0[i];
                log_s.0[i] -= sign * pow.0[i] / j as f64;
            }
        }
        inv_s.0[0] += 1.0;

        let rho = 1.0 - q;
        // residual E(u) = (1/s - 1)/u - 1 + rho log s + sum c_k u^k (s^k - 1)
        let mut residual = Poly::zeros(len);
        for i in 0..len - 1 {
            residual.0[i] = inv_s.0[i + 1];
        }
        residual.0[0] -= 1.0;
        for i in 0..len {
            residual.0[i] += rho * log_s.0[i];
        }

        let mut coeffs = Vec::with_capacity(order);
        let mut s_pow = Poly::zeros(len);
        s_pow.0[0] = 1.0;
        for n in 1..=order {
            s_pow = s_pow.mul(&s);
            // u^n (s^n - 1) = -n u^{n+1} + ...
            let c = residual.0[n + 1] / n as f64;
            for i in 0..len {
                let t = if i == 0 { s_pow.0[0] - 1.0 } else { s_pow.0[i] };
                if i + n < len {
                    residual.0[i + n] += c * t;
                }
            }
            coeffs.push(c);
        }
        Self { rho, coeffs }
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// `sum c_k w^{-k}` and its derivative in `w`.
    fn tail(&self, w: Complex64) -> (Complex64, Complex64) {
        let u = w.inv();
        let mut value = Complex64::new(0.0, 0.0);
        let mut deriv = Complex64::new(0.0, 0.0);
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            let k = (k + 1) as f64;
            // Horner in u; derivative d/dw u^k = -k u^{k+1}
            value = (value + c) * u;
            deriv = (deriv - c * k) * u;
        }
        (value, deriv * u)
    }

    /// Attracting-side expansion `w - rho Log w + tail`, principal branch.
    pub fn attracting(&self, w: Complex64) -> Complex64 {
        w - w.ln() * self.rho + self.tail(w).0
    }

    pub fn attracting_derivative(&self, w: Complex64) -> Complex64 {
        Complex64::new(1.0, 0.0) - w.inv() * self.rho + self.tail(w).1
    }

    /// Repelling-side expansion `w - rho Log(-w) + tail`.
    pub fn repelling(&self, w: Complex64) -> Complex64 {
        w - (-w).ln() * self.rho + self.tail(w).0
    }

    pub fn repelling_derivative(&self, w: Complex64) -> Complex64 {
        self.attracting_derivative(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Values of c_1..c_3 as polynomials in q, obtained by solving the Abel
    // equation symbolically.
    fn c1(q: f64) -> f64 {
        -q * q - q / 2.0 + 0.5
    }
    fn c2(q: f64) -> f64 {
        -q.powi(3) / 2.0 - q * q / 4.0 - 7.0 * q / 12.0 + 1.0 / 3.0
    }
    fn c3(q: f64) -> f64 {
        -q.powi(4) / 3.0 - q.powi(3) / 6.0 + q * q / 36.0 - 8.0 * q / 9.0 + 13.0 / 36.0
    }
    fn c5(q: f64) -> f64 {
        -q.powi(6) / 5.0 - q.powi(5) / 10.0 + q.powi(4) / 60.0 - q.powi(3) / 120.0
            + 3947.0 * q * q / 1800.0
            - 4789.0 * q / 1800.0
            + 1187.0 / 1800.0
    }

    #[test]
    fn coefficients_match_symbolic_solution() {
        for q in [0.4, 1.0, 1.0 / 1.44, 4.0] {
            let s = AbelSeries::new(q, 6);
            let c = s.coefficients();
            assert!((c[0] - c1(q)).abs() < 1e-12 * (1.0 + c1(q).abs()));
            assert!((c[1] - c2(q)).abs() < 1e-12 * (1.0 + c2(q).abs()));
            assert!((c[2] - c3(q)).abs() < 1e-12 * (1.0 + c3(q).abs()));
            assert!((c[4] - c5(q)).abs() < 1e-11 * (1.0 + c5(q).abs()));
        }
    }

    #[test]
    fn abel_equation_defect_is_small_at_large_w() {
        let q = 1.0 / 1.69;
        let s = AbelSeries::new(q, DEFAULT_ORDER);
        for w in [
            Complex64::new(40.0, 0.0),
            Complex64::new(30.0, 25.0),
            Complex64::new(60.0, -10.0),
        ] {
            let fw = w * w * w / (w * w - w + q);
            let defect = s.attracting(fw) - s.attracting(w) - 1.0;
            assert!(defect.norm() < 1e-12, "defect {defect} at {w}");
            let wr = -w;
            let fwr = wr * wr * wr / (wr * wr - wr + q);
            let defect = s.repelling(fwr) - s.repelling(wr) - 1.0;
            assert!(defect.norm() < 1e-12, "defect {defect} at {wr}");
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let s = AbelSeries::new(0.7, DEFAULT_ORDER);
        let w = Complex64::new(25.0, 7.0);
        let h = 1e-5;
        let fd = (s.attracting(w + h) - s.attracting(w - h)) / (2.0 * h);
        assert!((fd - s.attracting_derivative(w)).norm() < 1e-9);
    }
}
