//! Averaging the edge amplitude over the gauge group gives a projector;
//! the averaged circle amplitude is a small integer.

use fermion_statesum::statesum::{haar_average_circle, haar_average_u1_quadrature, haar_projector_check};

fn main() -> fermion_statesum::Result<()> {
    let q = haar_average_u1_quadrature(64);
    println!("U(1) quadrature: ⟨det(1 − Q)⟩ = {:.3e} + {:.3e}i", q.mean_re, q.mean_im);

    let p = haar_projector_check(32, 1.1)?;
    println!("averaged edge T = {}", p.t);
    println!("|T·T − T| = {:.2e}; fixed-phase control deviation = {:.3}", p.tt_deviation, p.control_deviation);

    for n in 1..=3 {
        let mc = haar_average_circle(n, 50_000, 99)?;
        println!("U({n}) Monte Carlo: {:.4} ± {:.4} (+{:.4}i) → {}", mc.mean_re, mc.std_error_re, mc.mean_im, mc.nearest_integer());
    }
    Ok(())
}
