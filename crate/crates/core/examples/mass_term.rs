//! Massive circles: the discretised mass term converges as 1/N, the
//! exponentiated one is exact for every N.

use std::f64::consts::PI;

use fermion_statesum::linalg;
use fermion_statesum::statesum::{exponential_mass_partition, massive_circle_partition, massive_limit, MassiveModel, TriangulatedCircle};
use fermion_statesum::zetareg::continuum_det_massive;

fn main() -> fermion_statesum::Result<()> {
    let (theta, m, l) = (PI, 1.0, 1.0);
    let limit = massive_limit(&linalg::u1(theta), m, l)?;
    println!("N → ∞ limit: {limit:.12}");
    for n in [10, 100, 1000, 10_000] {
        let circle = TriangulatedCircle::u1_uniform(theta, n, l)?;
        let z = massive_circle_partition(&MassiveModel::new(circle.clone(), m));
        let exact = exponential_mass_partition(&circle, m);
        println!("N = {n:>6}: |Z_N − limit| = {:.3e}, exponential form deviation {:.1e}", (z - limit).norm(), (exact - limit).norm());
    }

    let cmp = continuum_det_massive(&linalg::u1(theta), m, l)?;
    println!("continuum det = {:.12}", cmp.continuum);
    if let Some(r) = cmp.phase_ratio {
        println!("discrete/continuum = {r:.12} (|·| = {:.15})", r.norm());
    }
    Ok(())
}
