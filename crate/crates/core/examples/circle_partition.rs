//! The circle partition function: symbolic Berezin integration against
//! det(I − Q) for U(1), U(2) and SO(3) holonomies.

use std::f64::consts::PI;

use fermion_statesum::linalg;
use fermion_statesum::statesum::{circle_partition_closed, circle_partition_symbolic, TriangulatedCircle};

fn main() -> fermion_statesum::Result<()> {
    println!("U(1), θ = π, split over N edges:");
    for n in 1..=4 {
        let tri = TriangulatedCircle::u1_uniform(PI, n, 1.0)?;
        println!("  N = {n}: symbolic {:.12}, closed {:.12}", circle_partition_symbolic(&tri)?, circle_partition_closed(&tri));
    }

    let tri = TriangulatedCircle::new(vec![linalg::haar_unitary_seeded(2, 5), linalg::haar_unitary_seeded(2, 6)], 1.0)?;
    println!("U(2), N = 2: symbolic {:.12}, closed {:.12}", circle_partition_symbolic(&tri)?, circle_partition_closed(&tri));

    // a rotation in odd dimension has eigenvalue 1, so the circle amplitude vanishes
    let so3 = TriangulatedCircle::new(vec![linalg::random_special_orthogonal_seeded(3, 7)], 1.0)?;
    println!("SO(3): |Z| = {:.2e}", circle_partition_closed(&so3).norm());
    Ok(())
}
