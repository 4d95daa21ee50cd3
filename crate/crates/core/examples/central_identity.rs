//! The combinatorial state sum and the zeta-regularised continuum
//! determinant agree for random unitary holonomies.

use fermion_statesum::linalg::{self, ComplexMatrix};
use fermion_statesum::spectral::build_discrete_dirac;
use fermion_statesum::statesum::{circle_partition_closed, circle_partition_symbolic, TriangulatedCircle};
use fermion_statesum::zetareg::continuum_det_un;

fn main() -> fermion_statesum::Result<()> {
    let mut rng = linalg::rng_for(7, 0);
    for n in 1..=3 {
        let q = linalg::haar_unitary(n, &mut rng);
        let l = 1.0 + n as f64;
        let tri = TriangulatedCircle::new(vec![q.clone()], l)?;
        let state_sum = circle_partition_closed(&tri);
        let continuum = continuum_det_un(&q, l)?;
        // the same holonomy spread over a finer lattice: Q on one edge, identities elsewhere
        let mut edges = vec![ComplexMatrix::identity(n, n); 8];
        edges[0] = q.clone();
        let lattice = build_discrete_dirac(&TriangulatedCircle::new(edges, l)?).det();
        println!("U({n}): state sum {state_sum:.12}, continuum {continuum:.12}, det iM {lattice:.12}");
        println!("       Berezin integral {:.12}", circle_partition_symbolic(&tri)?);
    }
    Ok(())
}
