//! Dense complex matrices: determinants, eigenphases of unitaries and
//! random group elements.
//!
//! Phase convention throughout the crate: a unitary eigenvalue is written
//! `e^{-iθ}` with `θ ∈ [0, 2π)`, the same way a U(1) holonomy is `Q = e^{-iθ}`.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Deviation threshold below which a matrix is classified as unitary.
pub const UNITARY_TOL: f64 = 1e-10;

/// Deterministic generator for `(seed, stream)`. Streams are independent, so
/// parallel workers each take their own stream index.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `‖U†U − I‖_max`, computed rather than assumed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitaryCheck {
    pub deviation: f64,
}

impl UnitaryCheck {
    pub fn of(m: &ComplexMatrix) -> Self {
        if !m.is_square() {
            return UnitaryCheck { deviation: f64::INFINITY };
        }
        let g = m.adjoint() * m;
        let id = ComplexMatrix::identity(m.nrows(), m.ncols());
        UnitaryCheck { deviation: max_abs_diff(&g, &id) }
    }

    pub fn is_unitary(&self) -> bool {
        self.deviation <= UNITARY_TOL
    }
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn ensure_square(m: &ComplexMatrix) -> Result<usize> {
    if m.is_square() {
        Ok(m.nrows())
    } else {
        Err(Error::Dimension {
            expected: "square matrix".into(),
            got: format!("{}x{}", m.nrows(), m.ncols()),
        })
    }
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(m: &ComplexMatrix) -> Result<Complex64> {
    let n = ensure_square(m)?;
    let mut a = m.clone();
    let mut acc = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
            .unwrap();
        if a[(pivot, col)].norm() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if pivot != col {
            a.swap_rows(pivot, col);
            acc = -acc;
        }
        let p = a[(col, col)];
        acc *= p;
        for row in col + 1..n {
            let f = a[(row, col)] / p;
            if f.norm() == 0.0 {
                continue;
            }
            for k in col + 1..n {
                let v = a[(col, k)];
                a[(row, k)] -= f * v;
            }
        }
    }
    Ok(acc)
}

pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_square(m)?;
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular(det(m).map(|d| d.norm()).unwrap_or(0.0)))
}

/// Ordered product `Q_1 Q_2 … Q_N`.
pub fn ordered_product(edges: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let first = edges
        .first()
        .ok_or_else(|| crate::error::argument("empty edge list"))?;
    let n = ensure_square(first)?;
    let mut acc = ComplexMatrix::identity(n, n);
    for q in edges {
        if q.shape() != (n, n) {
            return Err(Error::Dimension {
                expected: format!("{n}x{n}"),
                got: format!("{}x{}", q.nrows(), q.ncols()),
            });
        }
        acc *= q;
    }
    Ok(acc)
}

pub fn scalar_matrix(z: Complex64) -> ComplexMatrix {
    ComplexMatrix::from_element(1, 1, z)
}

/// `e^{-iθ}` as a 1×1 matrix.
pub fn u1(theta: f64) -> ComplexMatrix {
    scalar_matrix(Complex64::from_polar(1.0, -theta))
}

pub fn diag_phases(thetas: &[f64]) -> ComplexMatrix {
    let n = thetas.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for (i, &t) in thetas.iter().enumerate() {
        m[(i, i)] = Complex64::from_polar(1.0, -t);
    }
    m
}

/// Maps a unit-modulus eigenvalue to its phase `θ ∈ [0, 2π)` with `z = e^{-iθ}`.
pub fn phase_of(z: Complex64) -> f64 {
    let t = (-z.arg()).rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU
    if t >= TAU {
        0.0
    } else {
        t
    }
}

#[derive(Debug, Clone)]
pub struct UnitaryEigen {
    /// `θ_j ∈ [0, 2π)`, eigenvalue `e^{-iθ_j}`.
    pub phases: Vec<f64>,
    /// Orthonormal eigenvectors as columns.
    pub vectors: ComplexMatrix,
}

impl UnitaryEigen {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = diag_phases(&self.phases);
        &self.vectors * d * self.vectors.adjoint()
    }
}

/// Eigendecomposition of a unitary matrix via its complex Schur form, which is
/// diagonal for normal matrices.
pub fn eig_unitary_full(u: &ComplexMatrix) -> Result<UnitaryEigen> {
    let check = UnitaryCheck::of(u);
    if !check.is_unitary() {
        return Err(Error::NotUnitary(check.deviation));
    }
    let (vectors, t) = Schur::new(u.clone()).unpack();
    let phases = (0..t.nrows()).map(|i| phase_of(t[(i, i)])).collect();
    Ok(UnitaryEigen { phases, vectors })
}

pub fn eig_unitary(u: &ComplexMatrix) -> Result<Vec<f64>> {
    eig_unitary_full(u).map(|e| e.phases)
}

/// Eigenvalues of an arbitrary square complex matrix from its Schur form.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    ensure_square(m)?;
    let t = Schur::new(m.clone()).unpack().1;
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Complex Ginibre matrix: independent entries with standard normal real
/// and imaginary parts.
pub fn random_complex<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Haar-distributed element of U(n): QR of a complex Ginibre matrix with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    assert!(n >= 1, "dimension must be positive");
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = ComplexMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    });
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

pub fn haar_unitary_seeded(n: usize, seed: u64) -> ComplexMatrix {
    haar_unitary(n, &mut rng_for(seed, 0))
}

/// Uniformly distributed element of SO(n), returned with real entries.
pub fn random_special_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    assert!(n >= 1, "dimension must be positive");
    let z = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q.map(|x| Complex64::new(x, 0.0))
}

pub fn random_special_orthogonal_seeded(n: usize, seed: u64) -> ComplexMatrix {
    random_special_orthogonal(n, &mut rng_for(seed, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Laplace expansion along the first row.
    fn cofactor_det(m: &ComplexMatrix) -> Complex64 {
        let n = m.nrows();
        if n == 1 {
            return m[(0, 0)];
        }
        let mut acc = c(0.0, 0.0);
        for j in 0..n {
            let minor = m.clone().remove_row(0).remove_column(j);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += m[(0, j)] * sign * cofactor_det(&minor);
        }
        acc
    }

    fn random_matrix(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = rng_for(seed, 0);
        ComplexMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    #[test]
    fn det_identity_and_diagonal() {
        assert_eq!(det(&ComplexMatrix::identity(3, 3)).unwrap(), c(1.0, 0.0));
        let (t1, t2) = (0.3, 1.9);
        let d = det(&diag_phases(&[t1, t2])).unwrap();
        assert!((d - Complex64::from_polar(1.0, -(t1 + t2))).norm() < 1e-15);
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        for seed in 0..20 {
            let m = random_matrix(3, seed);
            let a = det(&m).unwrap();
            let b = cofactor_det(&m);
            assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0), "seed {seed}: {a} vs {b}");
        }
        let m = random_matrix(5, 99);
        assert!((det(&m).unwrap() - cofactor_det(&m)).norm() < 1e-12);
    }

    #[test]
    fn det_rejects_non_square() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(det(&m), Err(Error::Dimension { .. })));
    }

    #[test]
    fn det_of_singular_is_zero() {
        let mut m = random_matrix(3, 4);
        let row = m.row(0).clone_owned();
        m.set_row(2, &(row * c(2.0, -1.0)));
        assert!(det(&m).unwrap().norm() < 1e-14);
    }

    #[test]
    fn det_multiplicative() {
        for seed in 0..10 {
            let a = random_matrix(4, 2 * seed);
            let b = random_matrix(4, 2 * seed + 1);
            let lhs = det(&(&a * &b)).unwrap();
            let rhs = det(&a).unwrap() * det(&b).unwrap();
            assert!((lhs - rhs).norm() <= 1e-11 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn eig_unitary_simple_cases() {
        let p = eig_unitary(&u1(PI / 2.0)).unwrap();
        assert!((p[0] - PI / 2.0).abs() < 1e-14);

        let phi = 0.7_f64;
        let rot = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(phi.cos(), 0.0), c(-phi.sin(), 0.0), c(phi.sin(), 0.0), c(phi.cos(), 0.0)],
        );
        let mut p = eig_unitary(&rot).unwrap();
        p.sort_by(f64::total_cmp);
        assert!((p[0] - phi).abs() < 1e-12 && (p[1] - (TAU - phi)).abs() < 1e-12, "{p:?}");
    }

    #[test]
    fn eig_unitary_rejects_non_unitary() {
        let m = scalar_matrix(c(2.0, 0.0));
        assert!(matches!(eig_unitary(&m), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn eig_unitary_reconstructs_haar_samples() {
        let mut rng = rng_for(5, 0);
        for n in 1..=5 {
            for _ in 0..10 {
                let u = haar_unitary(n, &mut rng);
                let e = eig_unitary_full(&u).unwrap();
                assert!(max_abs_diff(&e.reconstruct(), &u) <= 1e-9);
                let prod: Complex64 = e.phases.iter().map(|&t| Complex64::from_polar(1.0, -t)).product();
                assert!((prod - det(&u).unwrap()).norm() <= 1e-10);
                assert!(e.phases.iter().all(|&t| (0.0..TAU).contains(&t)));
            }
        }
    }

    #[test]
    fn haar_samples_are_unitary_and_reproducible() {
        for seed in 0..50 {
            let u = haar_unitary_seeded(4, seed);
            assert!(UnitaryCheck::of(&u).is_unitary());
        }
        assert_eq!(haar_unitary_seeded(3, 11), haar_unitary_seeded(3, 11));
        assert_ne!(haar_unitary_seeded(3, 11), haar_unitary_seeded(3, 12));
    }

    #[test]
    fn haar_first_moments() {
        // E[e^{-iθ}] = 0 for U(1); E[|U_11|^2] = 1/n for U(n).
        let samples = 100_000;
        let mut rng = rng_for(2024, 0);
        let mean: Complex64 =
            (0..samples).map(|_| haar_unitary(1, &mut rng)[(0, 0)]).sum::<Complex64>() / samples as f64;
        // each component has variance 1/2
        let sigma = (0.5 / samples as f64).sqrt();
        assert!(mean.re.abs() < 3.0 * sigma && mean.im.abs() < 3.0 * sigma, "{mean}");

        let n = 3;
        let vals: Vec<f64> = (0..samples).map(|_| haar_unitary(n, &mut rng)[(0, 0)].norm_sqr()).collect();
        let m = vals.iter().sum::<f64>() / samples as f64;
        let var = vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (samples - 1) as f64;
        assert!((m - 1.0 / n as f64).abs() < 3.0 * (var / samples as f64).sqrt(), "{m}");
    }

    #[test]
    fn special_orthogonal_samples() {
        let one = random_special_orthogonal_seeded(1, 3);
        assert_eq!(one, scalar_matrix(c(1.0, 0.0)));

        let q = random_special_orthogonal_seeded(3, 7);
        assert!(UnitaryCheck::of(&q).is_unitary());
        assert!((det(&q).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
        let has_one = eigenvalues(&q).unwrap().iter().any(|z| (z - c(1.0, 0.0)).norm() < 1e-10);
        assert!(has_one);

        let r = random_special_orthogonal_seeded(2, 8);
        let ev = eigenvalues(&r).unwrap();
        assert!(ev.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
        assert!((ev[0] - ev[1].conj()).norm() < 1e-12);
    }
}
