//! Grassmann arithmetic and Berezin integration on a handful of generators.
//!
//! Run with `cargo run --example grassmann_basics`.

use fermion_statesum::grassmann::{gaussian_berezin, gaussian_closed_form, AlgebraBuilder};
use fermion_statesum::linalg::ComplexMatrix;
use num_complex::Complex64;

fn main() -> fermion_statesum::Result<()> {
    let mut b = AlgebraBuilder::new();
    let x = b.generator();
    let y = b.generator();
    let alg = b.build()?;

    let (ex, ey) = (alg.generator(x), alg.generator(y));
    println!("x·y = {}", &ex * &ey);
    println!("y·x = {}", &ey * &ex);
    println!("x·x = {}", &ex * &ex);

    // ∫dx ∫dy (y x) = ∫dx x = 1 under the leftmost convention
    let yx = &ey * &ex;
    println!("∫dx dy (y·x) = {}", yx.berezin(&[x, y])?);

    // translation x ↦ x + y leaves ∫dx unchanged
    let f = &(&ex * &ey) + &ex;
    let shifted = f.substitute(x, &(&ex + &ey))?;
    println!("∫dx f(x) = {}, ∫dx f(x + y) = {}", f.integrate(x), shifted.integrate(x));

    // the fermionic Gaussian integral is a determinant
    let m = ComplexMatrix::from_row_slice(
        2,
        2,
        &[Complex64::new(1.0, 0.5), Complex64::new(2.0, 0.0), Complex64::new(-0.5, 0.0), Complex64::new(0.0, 1.0)],
    );
    let mut b = AlgebraBuilder::new();
    let fields = b.field_pair(2);
    let sources: Vec<_> = (0..4).map(|_| b.generator()).collect();
    let alg = b.build()?;
    let z = gaussian_berezin(&alg, &fields, &m, None)?;
    println!("∫ e^(ψ̄Mψ) = {}   (det M = {})", z, fermion_statesum::linalg::det(&m)?);

    let cbar: Vec<_> = sources[..2].iter().map(|&g| alg.generator(g)).collect();
    let d: Vec<_> = sources[2..].iter().map(|&g| alg.generator(g)).collect();
    let with_sources = gaussian_berezin(&alg, &fields, &m, Some((&cbar, &d)))?;
    let closed = gaussian_closed_form(&alg, &m, &cbar, &d)?;
    println!("with sources: {} terms, max deviation from det M·e^(−c̄M⁻¹d) = {:.2e}",
        with_sources.len(), with_sources.max_abs_diff(&closed)?);
    Ok(())
}
