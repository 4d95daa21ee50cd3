//! Eigenvalues of the discrete Dirac operator approach the continuum ones
//! at second order in 1/N.

use std::f64::consts::PI;

use fermion_statesum::spectral::{build_discrete_dirac, compare_spectra};
use fermion_statesum::statesum::TriangulatedCircle;

fn main() -> fermion_statesum::Result<()> {
    let theta = PI / 3.0;
    for n in [16, 64, 256, 1024] {
        let report = compare_spectra(theta, n, 2, None)?;
        let devs: Vec<String> = report.entries.iter().map(|e| format!("{:.3e}", e.deviation)).collect();
        println!("N = {n:>5}: |μ_k − iλ_k|, k = −2..2: [{}]", devs.join(", "));
    }
    let report = compare_spectra(theta, 1000, 3, None)?;
    if let Some(order) = report.fitted_order {
        println!("fitted convergence order over k: {order:.3}");
    }

    let tri = TriangulatedCircle::u1_uniform(theta, 12, 12.0)?;
    let dirac = build_discrete_dirac(&tri);
    println!("det iM = {:.12} for N = 12", dirac.det());
    print!("{}", report.to_csv().to_string_lossy());
    Ok(())
}
