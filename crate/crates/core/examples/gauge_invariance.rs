//! Gauge transformations act on vertices; closed circles don't notice,
//! and reversing orientation conjugates the amplitude.

use fermion_statesum::linalg::{self, ComplexMatrix};
use fermion_statesum::statesum::{circle_partition_closed, circle_partition_symbolic, GaugeTransformation, TriangulatedCircle};
use num_complex::Complex64;

fn main() -> fermion_statesum::Result<()> {
    let mut rng = linalg::rng_for(17, 0);
    let edges: Vec<_> = (0..3).map(|_| linalg::haar_unitary(2, &mut rng)).collect();
    let tri = TriangulatedCircle::new(edges, 1.0)?;

    // invertible, non-unitary vertex maps with U_0 = U_3
    let mut maps: Vec<ComplexMatrix> = (0..4)
        .map(|_| ComplexMatrix::identity(2, 2) * Complex64::new(1.5, 0.0) + linalg::random_complex(2, 2, &mut rng) * Complex64::new(0.3, 0.0))
        .collect();
    maps[3] = maps[0].clone();
    let gauged = GaugeTransformation::new(maps)?.apply_circle(&tri)?;

    let before = circle_partition_closed(&tri);
    println!("Z before:          {before:.12}");
    println!("Z after (closed):  {:.12}", circle_partition_closed(&gauged));
    println!("Z after (Berezin): {:.12}", circle_partition_symbolic(&gauged)?);
    println!("Z reversed:        {:.12}  (conjugate {:.12})", circle_partition_closed(&tri.reversed()?), before.conj());
    Ok(())
}
