//! Gluing edge amplitudes along an interval: the result only sees the
//! ordered product of the edge matrices.

use fermion_statesum::linalg;
use fermion_statesum::statesum::{interval_partition, TriangulatedInterval};

fn main() -> fermion_statesum::Result<()> {
    let mut rng = linalg::rng_for(2024, 0);
    for count in 1..=4 {
        let edges: Vec<_> = (0..count).map(|_| linalg::haar_unitary(2, &mut rng)).collect();
        let tri = TriangulatedInterval::new(edges)?;
        let glued = interval_partition(&tri)?;
        let single = glued.single_edge(&tri.product())?;
        println!(
            "N = {count}: {} generators, {:>2} terms, |Z_glued − Z_edge(Q₁⋯Q_N)| = {:.2e}",
            glued.algebra.generators(),
            glued.value.len(),
            glued.value.max_abs_diff(&single)?
        );
    }
    Ok(())
}
