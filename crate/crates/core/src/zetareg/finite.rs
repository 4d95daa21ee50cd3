//! Zeta-regularised determinants of operators with finitely many real,
//! nonzero eigenvalues. Here every zeta function is a finite sum, so the
//! regularised determinant must reproduce the plain eigenvalue product.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{argument, Error, Result};

/// Branch used for `λ^{-s}` when `λ < 0`: `ln λ = ln|λ| − iεπ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Epsilon {
    #[default]
    Plus,
    Minus,
}

impl Epsilon {
    pub fn sign(self) -> f64 {
        match self {
            Epsilon::Plus => 1.0,
            Epsilon::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSpectrum {
    values: Vec<f64>,
}

impl FiniteSpectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(argument("spectrum must be nonempty"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(argument("eigenvalues must be finite"));
        }
        if values.contains(&0.0) {
            return Err(Error::ZeroMode);
        }
        Ok(FiniteSpectrum { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn positive(&self) -> usize {
        self.values.iter().filter(|&&v| v > 0.0).count()
    }

    pub fn negative(&self) -> usize {
        self.values.len() - self.positive()
    }

    pub fn product(&self) -> f64 {
        self.values.iter().product()
    }
}

/// The four zeta-type functions of a finite spectrum at one point `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaValues {
    /// `ζ_{D,ε}(s) = Σ λ^{-s}` on the ε branch.
    pub zeta_d: Complex64,
    /// `ζ_{iD}(s) = Σ (iλ)^{-s}` on the principal branch.
    pub zeta_id: Complex64,
    /// `η_D(s) = Σ sign(λ) |λ|^{-s}`.
    pub eta: Complex64,
    /// `ζ_{D²}(s/2) = Σ |λ|^{-s}`.
    pub zeta_d2_half: Complex64,
}

pub fn finite_zeta_functions(spec: &FiniteSpectrum, s: Complex64, eps: Epsilon) -> ZetaValues {
    let mut out = ZetaValues {
        zeta_d: Complex64::default(),
        zeta_id: Complex64::default(),
        eta: Complex64::default(),
        zeta_d2_half: Complex64::default(),
    };
    for &v in &spec.values {
        let ln_abs = v.abs().ln();
        let sign = v.signum();
        let abs_pow = (-s * ln_abs).exp();
        let log_d = if v > 0.0 { Complex64::new(ln_abs, 0.0) } else { Complex64::new(ln_abs, -eps.sign() * PI) };
        let log_id = Complex64::new(ln_abs, sign * PI / 2.0);
        out.zeta_d += (-s * log_d).exp();
        out.zeta_id += (-s * log_id).exp();
        out.eta += abs_pow * sign;
        out.zeta_d2_half += abs_pow;
    }
    out
}

/// Ingredients and results of the zeta-function determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteDet {
    pub eta0: f64,
    pub zeta0: f64,
    /// `ζ'_{D²}(0) = −2 Σ ln|λ|`.
    pub zeta_d2_prime: f64,
    pub det_d: Complex64,
    pub det_id: Complex64,
}

/// `det D = e^{iεπ/2 (η(0) − ζ(0))} e^{−ζ'_{D²}(0)/2}` and
/// `det iD = e^{iπ/2 η(0)} e^{−ζ'_{D²}(0)/2}`.
pub fn finite_det_via_zeta(spec: &FiniteSpectrum, eps: Epsilon) -> FiniteDet {
    let eta0 = spec.positive() as f64 - spec.negative() as f64;
    let zeta0 = spec.values.len() as f64;
    let zeta_d2_prime = -2.0 * spec.values.iter().map(|v| v.abs().ln()).sum::<f64>();
    let modulus = (-zeta_d2_prime / 2.0).exp();
    FiniteDet {
        eta0,
        zeta0,
        zeta_d2_prime,
        det_d: Complex64::from_polar(modulus, eps.sign() * PI / 2.0 * (eta0 - zeta0)),
        det_id: Complex64::from_polar(modulus, PI / 2.0 * eta0),
    }
}
