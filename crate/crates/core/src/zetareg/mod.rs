//! Zeta-function regularised determinants of the circle Dirac operator.
//!
//! For the constant U(1) connection `a ∈ (0, 1)` on a circle of length `l`
//! the eigenvalues are `λ_k = 2π(k + a)/l`, and the spectral functions reduce
//! to Hurwitz zeta functions of `a` and `1 − a`.

mod finite;
mod special;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{argument, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::statesum::massive_limit;

pub use finite::{finite_det_via_zeta, finite_zeta_functions, Epsilon, FiniteDet, FiniteSpectrum, ZetaValues};
pub use special::{hurwitz_special, hurwitz_zeta, hurwitz_zeta_derivative, log_gamma};

/// Connections with `a` (or `1 − a`) below this are treated as having a
/// zero mode.
pub const ZERO_MODE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct U1Connection {
    a: f64,
    l: f64,
}

impl U1Connection {
    pub fn new(a: f64, l: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&a) {
            return Err(argument(format!("a = {a} must lie in [0, 1)")));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(argument(format!("circumference l = {l} must be positive")));
        }
        Ok(U1Connection { a, l })
    }

    /// Connection whose holonomy is `e^{-iθ}`: `a = θ/2π mod 1`.
    pub fn from_holonomy(theta: f64, l: f64) -> Result<Self> {
        let a = (theta / TAU).rem_euclid(1.0);
        Self::new(if a >= 1.0 { 0.0 } else { a }, l)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn has_zero_mode(&self) -> bool {
        self.a < ZERO_MODE_TOL || 1.0 - self.a < ZERO_MODE_TOL
    }
}

/// Regularised determinant data. With a zero mode the spectral invariants
/// are `None` and the determinants take their continuous extension, zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularisedDet {
    pub a: f64,
    pub l: f64,
    pub zero_mode: bool,
    pub eta0: Option<f64>,
    pub zeta0: Option<f64>,
    /// `ζ'_{D²}(0)`.
    pub zeta_prime: Option<f64>,
    pub det_id: Option<Complex64>,
    det_d_plus: Option<Complex64>,
    det_d_minus: Option<Complex64>,
}

impl RegularisedDet {
    pub fn det_d(&self, eps: Epsilon) -> Option<Complex64> {
        match eps {
            Epsilon::Plus => self.det_d_plus,
            Epsilon::Minus => self.det_d_minus,
        }
    }

    /// Flat JSON record; complex values are split into `_re`/`_im` fields
    /// and absent values are `null`.
    pub fn to_json(&self) -> Value {
        let re = |z: Option<Complex64>| z.map(|z| z.re);
        let im = |z: Option<Complex64>| z.map(|z| z.im);
        json!({
            "a": self.a,
            "l": self.l,
            "eta0": self.eta0,
            "zeta0": self.zeta0,
            "zetaprime0": self.zeta_prime,
            "det_iD_re": re(self.det_id),
            "det_iD_im": im(self.det_id),
            "det_D_plus_re": re(self.det_d_plus),
            "det_D_plus_im": im(self.det_d_plus),
            "det_D_minus_re": re(self.det_d_minus),
            "det_D_minus_im": im(self.det_d_minus),
            "zero_mode": self.zero_mode,
        })
    }
}

/// `η(0) = 1 − 2a`, `ζ(0) = 0` and `e^{−ζ'_{D²}(0)/2} = 2 sin πa`, so that
/// `det iD = 1 − e^{-2πia}`.
///
/// `ζ(0, 1 − a)` is evaluated as `a − ½` rather than `½ − (1 − a)` so the
/// two Hurwitz contributions to `ζ(0)` cancel exactly; the `ln(l/2π) ζ(0)`
/// term then vanishes identically and the result is independent of `l` to
/// the last bit.
pub fn continuum_regularised_det(conn: &U1Connection) -> RegularisedDet {
    let (a, l) = (conn.a, conn.l);
    if conn.has_zero_mode() {
        return RegularisedDet {
            a,
            l,
            zero_mode: true,
            eta0: None,
            zeta0: None,
            zeta_prime: None,
            det_id: Some(Complex64::default()),
            det_d_plus: Some(Complex64::default()),
            det_d_minus: Some(Complex64::default()),
        };
    }
    let zeta_h0_a = 0.5 - a;
    let zeta_h0_reflected = a - 0.5;
    let eta0 = zeta_h0_a - zeta_h0_reflected;
    let zeta0 = zeta_h0_a + zeta_h0_reflected;
    let lerch = |q: f64| log_gamma(q).expect("q in (0, 1)") - 0.5 * TAU.ln();
    let zeta_prime = 2.0 * (l / TAU).ln() * zeta0 + 2.0 * (lerch(a) + lerch(1.0 - a));
    let modulus = (-zeta_prime / 2.0).exp();
    let det_d = |eps: Epsilon| Complex64::from_polar(modulus, eps.sign() * PI / 2.0 * (eta0 - zeta0));
    RegularisedDet {
        a,
        l,
        zero_mode: false,
        eta0: Some(eta0),
        zeta0: Some(zeta0),
        zeta_prime: Some(zeta_prime),
        det_id: Some(Complex64::from_polar(modulus, PI / 2.0 * eta0)),
        det_d_plus: Some(det_d(Epsilon::Plus)),
        det_d_minus: Some(det_d(Epsilon::Minus)),
    }
}

/// `det iD` for a U(n) connection with holonomy `Q`: the product of the
/// U(1) determinants over the eigenphases of `Q`.
pub fn continuum_det_un(q: &ComplexMatrix, l: f64) -> Result<Complex64> {
    let phases = linalg::eig_unitary(q)?;
    let mut det = Complex64::new(1.0, 0.0);
    for theta in phases {
        let r = continuum_regularised_det(&U1Connection::from_holonomy(theta, l)?);
        det *= r.det_id.expect("always present");
    }
    Ok(det)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassiveComparison {
    /// Regularised `det(iD + m)`, i.e. `det(1 − e^{iml} Q)`.
    pub continuum: Complex64,
    /// `det(e^{-iml} − Q)`, the limit of the discrete state sums.
    pub discrete_limit: Complex64,
    /// `discrete_limit / continuum = e^{-inml}`; `None` when the continuum
    /// determinant vanishes.
    pub phase_ratio: Option<Complex64>,
}

/// A mass shifts every eigenphase: `a' = a − ml/2π mod 1`.
pub fn continuum_det_massive(q: &ComplexMatrix, m: f64, l: f64) -> Result<MassiveComparison> {
    let phases = linalg::eig_unitary(q)?;
    let mut continuum = Complex64::new(1.0, 0.0);
    let mut zero = false;
    for theta in phases {
        let r = continuum_regularised_det(&U1Connection::from_holonomy(theta - m * l, l)?);
        zero |= r.zero_mode;
        continuum *= r.det_id.expect("always present");
    }
    let discrete_limit = massive_limit(q, m, l)?;
    let phase_ratio = (!zero && continuum.norm() > 0.0 && discrete_limit.norm() > 0.0).then(|| discrete_limit / continuum);
    Ok(MassiveComparison { continuum, discrete_limit, phase_ratio })
}
