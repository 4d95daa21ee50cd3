//! Zeta-function determinants: finite spectra reproduce plain products,
//! and the continuum U(1) Dirac operator gives 1 − e^{−2πia}.

use num_complex::Complex64;

use fermion_statesum::zetareg::{
    continuum_regularised_det, finite_det_via_zeta, hurwitz_special, hurwitz_zeta, Epsilon, FiniteSpectrum, U1Connection,
};

fn main() -> fermion_statesum::Result<()> {
    let spec = FiniteSpectrum::new(vec![1.5, -2.0, 0.5, 3.0])?;
    for eps in [Epsilon::Plus, Epsilon::Minus] {
        let d = finite_det_via_zeta(&spec, eps);
        println!("{eps:?}: η(0) = {}, ζ(0) = {}, det D = {:.12}, det iD = {:.12}", d.eta0, d.zeta0, d.det_d, d.det_id);
    }
    println!("plain product: {}", spec.product());

    println!("ζ(2, 1) = {:.15}", hurwitz_zeta(Complex64::new(2.0, 0.0), 1.0)?.re);
    let (z0, zp) = hurwitz_special(0.3)?;
    println!("ζ(0, 0.3) = {z0:.15}, ∂_s ζ(0, 0.3) = {zp:.15}");

    for a in [0.1, 0.25, 0.5, 0.75] {
        let r = continuum_regularised_det(&U1Connection::new(a, 2.0)?);
        let expected = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -std::f64::consts::TAU * a);
        println!("a = {a:<4}: det iD = {:.12}  vs 1 − e^(−2πia) = {expected:.12}", r.det_id.unwrap_or_default());
    }
    let zero = continuum_regularised_det(&U1Connection::new(0.0, 2.0)?);
    println!("a = 0: zero mode, det iD = {:?}, η(0) = {:?}", zero.det_id, zero.eta0);
    Ok(())
}
