//! Hurwitz zeta function and log-gamma.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{argument, Error, Result};

/// Direct terms summed before the Euler–Maclaurin tail takes over.
const EM_SHIFT: usize = 20;

/// `B_{2j} / (2j)!` for `j = 1..=6`.
const BERNOULLI_OVER_FACTORIAL: [f64; 6] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40_320.0,
    5.0 / 66.0 / 3_628_800.0,
    -691.0 / 2730.0 / 479_001_600.0,
];

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q.is_finite() {
        Ok(())
    } else {
        Err(argument(format!("Hurwitz parameter q = {q} must be positive")))
    }
}

/// `ζ(s, q) = Σ_{k≥0} (k + q)^{-s}`, analytically continued to `s ≠ 1`.
pub fn hurwitz_zeta(s: Complex64, q: f64) -> Result<Complex64> {
    check_q(q)?;
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole);
    }
    let one = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..EM_SHIFT {
        sum += Complex64::new(q + k as f64, 0.0).powc(-s);
    }
    let x = q + EM_SHIFT as f64;
    let lx = x.ln();
    let x_pow = |e: Complex64| (e * lx).exp();
    sum += x_pow(one - s) / (s - one);
    sum += x_pow(-s) * 0.5;
    // rising factorial s(s+1)…(s+2j−2)
    let mut rising = s;
    for (j, coef) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let order = 2 * j as i32 + 1;
        sum += rising * *coef * x_pow(-s - f64::from(order));
        rising *= (s + f64::from(order)) * (s + f64::from(order) + 1.0);
    }
    Ok(sum)
}

/// `∂_s ζ(s, q)` from the term-wise derivative of the same expansion.
pub fn hurwitz_zeta_derivative(s: Complex64, q: f64) -> Result<Complex64> {
    check_q(q)?;
    let one = Complex64::new(1.0, 0.0);
    if s == one {
        return Err(Error::Pole);
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..EM_SHIFT {
        let base = q + k as f64;
        sum -= base.ln() * Complex64::new(base, 0.0).powc(-s);
    }
    let x = q + EM_SHIFT as f64;
    let lx = x.ln();
    let x_pow = |e: Complex64| (e * lx).exp();
    let inv = one / (s - one);
    sum += x_pow(one - s) * (-lx * inv - inv * inv);
    sum -= x_pow(-s) * (0.5 * lx);
    for (j, coef) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let factors: Vec<Complex64> = (0..2 * j + 1).map(|i| s + i as f64).collect();
        let product: Complex64 = factors.iter().product();
        let d_product: Complex64 = (0..factors.len())
            .map(|skip| factors.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, f)| f).product::<Complex64>())
            .sum();
        let power = x_pow(-s - (2 * j + 1) as f64);
        sum += (d_product - product * lx) * *coef * power;
    }
    Ok(sum)
}

/// `(ζ(0, q), ζ'(0, q)) = (1/2 − q, ln Γ(q) − ½ ln 2π)`.
pub fn hurwitz_special(q: f64) -> Result<(f64, f64)> {
    check_q(q)?;
    Ok((0.5 - q, log_gamma(q)? - 0.5 * TAU.ln()))
}

/// Stirling coefficients `B_{2j} / (2j(2j−1))`.
const STIRLING: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
];

/// `ln |Γ(x)|` for real `x` away from the poles at non-positive integers.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(argument("log_gamma of a non-finite value"));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(Error::Pole);
    }
    if x < 0.5 {
        // reflection Γ(x)Γ(1−x) = π / sin(πx)
        let s = (PI * x).sin().abs();
        return Ok((PI / s).ln() - log_gamma(1.0 - x)?);
    }
    let mut shift = 0.0;
    let mut z = x;
    while z < 15.0 {
        shift += z.ln();
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut p = inv;
    for c in STIRLING {
        series += c * p;
        p *= inv2;
    }
    Ok((z - 0.5) * z.ln() - z + 0.5 * TAU.ln() + series - shift)
}
