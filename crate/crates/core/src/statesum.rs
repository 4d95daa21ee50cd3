//! Partition functions of the fermionic state sum model on triangulated
//! intervals and circles.
//!
//! An edge carrying the matrix `Q` contributes `e^{-ψ̄_0 Q ψ_1}`. Edges are
//! glued with the pairing `∫dψ dψ̄ f e^{ψ̄ψ} g`, and the circle closes the
//! interval by identifying its end vertices. Symbolic paths run through the
//! Grassmann engine and are capped by its generator limit; closed forms are
//! plain determinants and work at any size.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::grassmann::{
    bilinear, bilinear_pair, Algebra, AlgebraBuilder, FieldPair, GeneratorId, GeneratorVector, GrassmannElement,
    Monomial,
};
use crate::linalg::{self, ComplexMatrix};

fn check_edges(edges: &[ComplexMatrix]) -> Result<usize> {
    let first = edges.first().ok_or_else(|| argument("a triangulation needs at least one edge"))?;
    let n = linalg::ensure_square(first)?;
    if n == 0 {
        return Err(argument("fibre dimension must be positive"));
    }
    for q in edges {
        if q.shape() != (n, n) {
            return Err(Error::Dimension { expected: format!("{n}x{n}"), got: format!("{}x{}", q.nrows(), q.ncols()) });
        }
    }
    Ok(n)
}

/// Interval `[0, 1]` split into `N` edges, oriented left to right.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangulatedInterval {
    edges: Vec<ComplexMatrix>,
    n: usize,
}

impl TriangulatedInterval {
    pub fn new(edges: Vec<ComplexMatrix>) -> Result<Self> {
        let n = check_edges(&edges)?;
        Ok(TriangulatedInterval { edges, n })
    }

    pub fn edges(&self) -> &[ComplexMatrix] {
        &self.edges
    }

    pub fn fibre_dim(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn product(&self) -> ComplexMatrix {
        linalg::ordered_product(&self.edges).expect("edges validated at construction")
    }
}

/// Circle with `N` cyclically ordered edges and circumference `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangulatedCircle {
    edges: Vec<ComplexMatrix>,
    n: usize,
    circumference: f64,
}

impl TriangulatedCircle {
    pub fn new(edges: Vec<ComplexMatrix>, circumference: f64) -> Result<Self> {
        let n = check_edges(&edges)?;
        if !(circumference > 0.0 && circumference.is_finite()) {
            return Err(argument("circumference must be positive"));
        }
        Ok(TriangulatedCircle { edges, n, circumference })
    }

    /// U(1) circle whose edges each carry `e^{-iθ/N}`.
    pub fn u1_uniform(theta: f64, edges: usize, circumference: f64) -> Result<Self> {
        if edges == 0 {
            return Err(argument("a triangulation needs at least one edge"));
        }
        Self::new(vec![linalg::u1(theta / edges as f64); edges], circumference)
    }

    pub fn edges(&self) -> &[ComplexMatrix] {
        &self.edges
    }

    pub fn fibre_dim(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn circumference(&self) -> f64 {
        self.circumference
    }

    /// `Q_1 Q_2 … Q_N`, based at the start of edge 1.
    pub fn holonomy(&self) -> ComplexMatrix {
        linalg::ordered_product(&self.edges).expect("edges validated at construction")
    }

    /// Same circle traversed the other way: edges reversed and inverted.
    pub fn reversed(&self) -> Result<Self> {
        let edges = self.edges.iter().rev().map(linalg::inverse).collect::<Result<Vec<_>>>()?;
        Self::new(edges, self.circumference)
    }
}

/// `e^{-ψ̄_0 Q ψ_1}`.
pub fn edge_partition(alg: &Algebra, q: &ComplexMatrix, psibar0: &GeneratorVector, psi1: &GeneratorVector) -> Result<GrassmannElement> {
    if q.shape() != (psibar0.len(), psi1.len()) {
        return Err(Error::Dimension {
            expected: format!("{}x{}", psibar0.len(), psi1.len()),
            got: format!("{}x{}", q.nrows(), q.ncols()),
        });
    }
    (-bilinear(alg, &psibar0.elements(alg), q, &psi1.elements(alg))).exp_even()
}

/// Glues `z1` (carrying `shared.ψ`) to `z2` (carrying `shared.ψ̄`).
pub fn glue(z1: &GrassmannElement, z2: &GrassmannElement, shared: &FieldPair) -> Result<GrassmannElement> {
    bilinear_pair(z1, z2, shared)
}

/// Symbolic interval partition function together with the algebra and the
/// vertex fields it lives on.
#[derive(Debug, Clone)]
pub struct IntervalPartition {
    pub algebra: Algebra,
    /// Fields at vertices `0..=N`.
    pub vertices: Vec<FieldPair>,
    pub value: GrassmannElement,
}

impl IntervalPartition {
    /// `e^{-ψ̄_0 Q ψ_N}` on the same boundary fields.
    pub fn single_edge(&self, q: &ComplexMatrix) -> Result<GrassmannElement> {
        let last = self.vertices.last().expect("at least two vertices");
        edge_partition(&self.algebra, q, self.vertices[0].psibar(), last.psi())
    }
}

/// Iterated gluing over all interior vertices.
pub fn interval_partition(tri: &TriangulatedInterval) -> Result<IntervalPartition> {
    let (n, count) = (tri.fibre_dim(), tri.edge_count());
    let mut builder = AlgebraBuilder::new();
    let vertices: Vec<FieldPair> = (0..=count).map(|_| builder.field_pair(n)).collect();
    let algebra = builder.build()?;
    let mut acc = edge_partition(&algebra, &tri.edges[0], vertices[0].psibar(), vertices[1].psi())?;
    for i in 1..count {
        let next = edge_partition(&algebra, &tri.edges[i], vertices[i].psibar(), vertices[i + 1].psi())?;
        acc = glue(&acc, &next, &vertices[i])?;
    }
    Ok(IntervalPartition { algebra, vertices, value: acc })
}

/// The circle state sum as a Grassmann integral. Vertex `j` (for
/// `j = 0..N`) sits at the start of edge `j + 1`; vertex `0` doubles as
/// vertex `N`.
#[derive(Debug, Clone)]
pub struct CircleStateSum {
    pub algebra: Algebra,
    pub vertices: Vec<FieldPair>,
    edges: Vec<ComplexMatrix>,
}

impl CircleStateSum {
    pub fn new(tri: &TriangulatedCircle) -> Result<Self> {
        let mut builder = AlgebraBuilder::new();
        let vertices = (0..tri.edge_count()).map(|_| builder.field_pair(tri.fibre_dim())).collect();
        let algebra = builder.build()?;
        Ok(CircleStateSum { algebra, vertices, edges: tri.edges.clone() })
    }

    fn vertex_factor(&self, j: usize, diag: Complex64) -> Result<GrassmannElement> {
        let alg = &self.algebra;
        let here = &self.vertices[j];
        let next = &self.vertices[(j + 1) % self.vertices.len()];
        let on_site = here.pairing(alg).scale(diag).exp_even()?;
        let hop = edge_partition(alg, &self.edges[j], here.psibar(), next.psi())?;
        on_site.try_mul(&hop)
    }

    /// `Σ_j ψ̄_j (d ψ_j − Q_{j+1} ψ_{j+1})`, with `d = 1` in the massless model.
    pub fn action(&self, diag: Complex64) -> GrassmannElement {
        let alg = &self.algebra;
        let count = self.vertices.len();
        let mut acc = alg.zero();
        for j in 0..count {
            let here = &self.vertices[j];
            let next = &self.vertices[(j + 1) % count];
            acc = &acc + &here.pairing(alg).scale(diag);
            acc = &acc - &bilinear(alg, &here.psibar().elements(alg), &self.edges[j], &next.psi().elements(alg));
        }
        acc
    }

    /// Product of the per-vertex factors `e^{d ψ̄_j ψ_j} e^{-ψ̄_j Q_{j+1} ψ_{j+1}}`.
    pub fn integrand(&self, diag: Complex64) -> Result<GrassmannElement> {
        (0..self.vertices.len()).try_fold(self.algebra.one(), |acc, j| acc.try_mul(&self.vertex_factor(j, diag)?))
    }

    /// `∏_j dψ_j dψ̄_j` with vertex `N` (stored as `0`) innermost.
    pub fn measure(&self) -> Vec<GeneratorId> {
        let count = self.vertices.len();
        (1..=count).flat_map(|j| self.vertices[j % count].measure()).collect()
    }

    /// Integrates vertex by vertex as soon as both factors touching it are in.
    /// Each `dψ_j dψ̄_j` block has even length and the factors are even, so the
    /// blocks may be done in any order.
    pub fn evaluate(&self, diag: Complex64) -> Result<Complex64> {
        let mut acc = self.vertex_factor(0, diag)?;
        for j in 1..self.vertices.len() {
            acc = acc.try_mul(&self.vertex_factor(j, diag)?)?;
            acc = acc.berezin(&self.vertices[j].measure())?;
        }
        acc = acc.berezin(&self.vertices[0].measure())?;
        if acc.terms().any(|(m, _)| m != Monomial::ONE) {
            return Err(argument("circle integral left Grassmann-valued residue"));
        }
        Ok(acc.scalar_part())
    }
}

/// Circle partition function by explicit Berezin integration.
pub fn circle_partition_symbolic(tri: &TriangulatedCircle) -> Result<Complex64> {
    CircleStateSum::new(tri)?.evaluate(Complex64::new(1.0, 0.0))
}

/// `det(I − Q_1 … Q_N)`.
pub fn circle_partition_closed(tri: &TriangulatedCircle) -> Complex64 {
    let q = tri.holonomy();
    let id = ComplexMatrix::identity(tri.n, tri.n);
    linalg::det(&(id - q)).expect("square by construction")
}

/// Vertex matrices `U_0 … U_N`; edge `i` transforms as `U_{i-1} Q_i U_i^{-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeTransformation {
    maps: Vec<ComplexMatrix>,
    inverses: Vec<ComplexMatrix>,
}

/// Reciprocal condition number below which a vertex map is rejected.
pub const GAUGE_RCOND_MIN: f64 = 1e-10;

impl GaugeTransformation {
    pub fn new(maps: Vec<ComplexMatrix>) -> Result<Self> {
        let mut inverses = Vec::with_capacity(maps.len());
        for (vertex, u) in maps.iter().enumerate() {
            linalg::ensure_square(u)?;
            let sv = u.clone().singular_values();
            let (lo, hi) = sv.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
            let ratio = if hi > 0.0 { lo / hi } else { 0.0 };
            if ratio < GAUGE_RCOND_MIN {
                return Err(Error::Condition { vertex, ratio });
            }
            inverses.push(linalg::inverse(u)?);
        }
        Ok(GaugeTransformation { maps, inverses })
    }

    pub fn identity(vertices: usize, n: usize) -> Self {
        Self::new(vec![ComplexMatrix::identity(n, n); vertices]).expect("identity is well conditioned")
    }

    pub fn maps(&self) -> &[ComplexMatrix] {
        &self.maps
    }

    fn transform(&self, edges: &[ComplexMatrix]) -> Result<Vec<ComplexMatrix>> {
        if self.maps.len() != edges.len() + 1 {
            return Err(Error::Dimension {
                expected: format!("{} vertex maps", edges.len() + 1),
                got: self.maps.len().to_string(),
            });
        }
        edges
            .iter()
            .enumerate()
            .map(|(i, q)| {
                if self.maps[i].shape() != q.shape() {
                    return Err(Error::Dimension {
                        expected: format!("{}x{}", q.nrows(), q.ncols()),
                        got: format!("{}x{}", self.maps[i].nrows(), self.maps[i].ncols()),
                    });
                }
                Ok(&self.maps[i] * q * &self.inverses[i + 1])
            })
            .collect()
    }

    pub fn apply_interval(&self, tri: &TriangulatedInterval) -> Result<TriangulatedInterval> {
        TriangulatedInterval::new(self.transform(&tri.edges)?)
    }

    /// Requires `U_0 = U_N`.
    pub fn apply_circle(&self, tri: &TriangulatedCircle) -> Result<TriangulatedCircle> {
        if let (Some(first), Some(last)) = (self.maps.first(), self.maps.last()) {
            if first.shape() != last.shape() || linalg::max_abs_diff(first, last) > 1e-12 {
                return Err(argument("circle gauge transformation needs U_0 = U_N"));
            }
        }
        TriangulatedCircle::new(self.transform(&tri.edges)?, tri.circumference)
    }
}

/// Circle with the discretised mass term `m Δt Σ ψ̄_j ψ_j`, `Δt = l/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct MassiveModel {
    pub circle: TriangulatedCircle,
    mass: Complex64,
}

impl MassiveModel {
    pub fn new(circle: TriangulatedCircle, m: f64) -> Self {
        MassiveModel { circle, mass: Complex64::new(m, 0.0) }
    }

    /// Complex mass. Not a physical parameter; only used to express the
    /// exponential substitution.
    pub fn with_complex_mass(circle: TriangulatedCircle, m: Complex64) -> Self {
        MassiveModel { circle, mass: m }
    }

    /// The mass chosen so that `1 − i m Δt = e^{-i m' l / N}`.
    pub fn exponential(circle: TriangulatedCircle, m_prime: f64) -> Self {
        let dt = circle.circumference / circle.edge_count() as f64;
        let target = Complex64::from_polar(1.0, -m_prime * dt);
        let m = (Complex64::new(1.0, 0.0) - target) / Complex64::new(0.0, dt);
        MassiveModel { circle, mass: m }
    }

    pub fn mass(&self) -> Complex64 {
        self.mass
    }

    pub fn dt(&self) -> f64 {
        self.circle.circumference / self.circle.edge_count() as f64
    }

    /// `1 − i m Δt`.
    pub fn diagonal(&self) -> Complex64 {
        Complex64::new(1.0, 0.0) - Complex64::new(0.0, 1.0) * self.mass * self.dt()
    }
}

/// `det((1 − i m Δt)^N − Q_1 … Q_N)`.
pub fn massive_circle_partition(mm: &MassiveModel) -> Complex64 {
    let n = mm.circle.fibre_dim();
    let d = mm.diagonal().powu(mm.circle.edge_count() as u32);
    let m = ComplexMatrix::identity(n, n) * d - mm.circle.holonomy();
    linalg::det(&m).expect("square by construction")
}

pub fn massive_circle_partition_symbolic(mm: &MassiveModel) -> Result<Complex64> {
    CircleStateSum::new(&mm.circle)?.evaluate(mm.diagonal())
}

/// `det(e^{-iml} − Q)`, the `N → ∞` value.
pub fn massive_limit(q: &ComplexMatrix, m: f64, l: f64) -> Result<Complex64> {
    let n = linalg::ensure_square(q)?;
    let phase = Complex64::from_polar(1.0, -m * l);
    linalg::det(&(ComplexMatrix::identity(n, n) * phase - q))
}

/// State sum with `1 − i m Δt = e^{-i m' l/N}`; independent of `N`.
pub fn exponential_mass_partition(circle: &TriangulatedCircle, m_prime: f64) -> Complex64 {
    massive_circle_partition(&MassiveModel::exponential(circle.clone(), m_prime))
}

/// Monte Carlo or quadrature estimate of a Haar average.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HaarEstimate {
    pub mean_re: f64,
    pub mean_im: f64,
    /// Standard error of each component; zero for quadrature.
    pub std_error_re: f64,
    pub std_error_im: f64,
    pub samples: usize,
}

impl HaarEstimate {
    pub fn mean(&self) -> Complex64 {
        Complex64::new(self.mean_re, self.mean_im)
    }

    pub fn nearest_integer(&self) -> i64 {
        self.mean_re.round() as i64
    }
}

/// Samples per Monte Carlo chunk; chunk `c` draws from stream `c` of the
/// seed, so results do not depend on the worker count.
pub const HAAR_CHUNK: usize = 4096;

/// `∫ dθ/2π (1 − e^{-iθ})` by the trapezoidal rule on `nodes` uniform nodes.
pub fn haar_average_u1_quadrature(nodes: usize) -> HaarEstimate {
    assert!(nodes >= 1);
    let sum: Complex64 = (0..nodes)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / nodes as f64;
            Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -theta)
        })
        .sum();
    let mean = sum / nodes as f64;
    HaarEstimate { mean_re: mean.re, mean_im: mean.im, std_error_re: 0.0, std_error_im: 0.0, samples: nodes }
}

/// Monte Carlo estimate of `∫ dQ det(I − Q)` over Haar-random `U(n)`.
pub fn haar_average_circle(n: usize, samples: usize, seed: u64) -> Result<HaarEstimate> {
    if n == 0 || samples == 0 {
        return Err(argument("need n ≥ 1 and at least one sample"));
    }
    let chunks = samples.div_ceil(HAAR_CHUNK);
    let partial: Vec<[f64; 4]> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = linalg::rng_for(seed, c as u64);
            let count = HAAR_CHUNK.min(samples - c * HAAR_CHUNK);
            let id = ComplexMatrix::identity(n, n);
            let mut acc = [0.0; 4];
            for _ in 0..count {
                let q = linalg::haar_unitary(n, &mut rng);
                let z = linalg::det(&(&id - q)).expect("square");
                acc[0] += z.re;
                acc[1] += z.im;
                acc[2] += z.re * z.re;
                acc[3] += z.im * z.im;
            }
            acc
        })
        .collect();
    let total = partial.iter().fold([0.0; 4], |mut t, p| {
        for k in 0..4 {
            t[k] += p[k];
        }
        t
    });
    let s = samples as f64;
    let (mre, mim) = (total[0] / s, total[1] / s);
    let var = |sq: f64, m: f64| ((sq / s - m * m) * s / (s - 1.0).max(1.0)).max(0.0);
    Ok(HaarEstimate {
        mean_re: mre,
        mean_im: mim,
        std_error_re: (var(total[2], mre) / s).sqrt(),
        std_error_im: (var(total[3], mim) / s).sqrt(),
        samples,
    })
}

#[derive(Debug, Clone)]
pub struct ProjectorReport {
    /// Phase-averaged edge `T` on `(ψ̄_0, ψ_1)`.
    pub t: GrassmannElement,
    /// `max |T·T − T|` over coefficients, after relabelling boundary fields.
    pub tt_deviation: f64,
    /// Same deviation for a fixed-phase edge glued with itself.
    pub control_deviation: f64,
    pub control_theta: f64,
}

impl ProjectorReport {
    pub fn is_projector(&self, tol: f64) -> bool {
        self.tt_deviation <= tol
    }
}

/// Builds `T = ∫ dθ/2π e^{-ψ̄_0 e^{-iθ} ψ_1}` by quadrature on the edge
/// coefficients and compares `T` glued with itself against `T`.
pub fn haar_projector_check(nodes: usize, control_theta: f64) -> Result<ProjectorReport> {
    if nodes == 0 {
        return Err(argument("need at least one quadrature node"));
    }
    let mut builder = AlgebraBuilder::new();
    let v: Vec<FieldPair> = (0..3).map(|_| builder.field_pair(1)).collect();
    let alg = builder.build()?;
    let averaged = |a: usize, b: usize| -> Result<GrassmannElement> {
        let mut acc = alg.zero();
        for k in 0..nodes {
            let theta = std::f64::consts::TAU * k as f64 / nodes as f64;
            acc = acc.try_add(&edge_partition(&alg, &linalg::u1(theta), v[a].psibar(), v[b].psi())?)?;
        }
        Ok(acc.scale(Complex64::new(1.0 / nodes as f64, 0.0)))
    };
    let (t01, t12, t02) = (averaged(0, 1)?, averaged(1, 2)?, averaged(0, 2)?);
    let tt = glue(&t01, &t12, &v[1])?;
    let tt_deviation = tt.max_abs_diff(&t02)?;

    let q = linalg::u1(control_theta);
    let z01 = edge_partition(&alg, &q, v[0].psibar(), v[1].psi())?;
    let z12 = edge_partition(&alg, &q, v[1].psibar(), v[2].psi())?;
    let z02 = edge_partition(&alg, &q, v[0].psibar(), v[2].psi())?;
    let control_deviation = glue(&z01, &z12, &v[1])?.max_abs_diff(&z02)?;

    Ok(ProjectorReport { t: t01, tt_deviation, control_deviation, control_theta })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionMode {
    Massless,
    Massive,
    ExponentialMass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Symbolic,
    Closed,
}

/// One evaluated partition function as emitted in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionRecord {
    pub n: usize,
    #[serde(rename = "N")]
    pub edges: usize,
    pub l: f64,
    pub mode: PartitionMode,
    pub value_re: f64,
    pub value_im: f64,
    pub method: Method,
}

impl PartitionRecord {
    pub fn new(circle: &TriangulatedCircle, mode: PartitionMode, method: Method, value: Complex64) -> Self {
        PartitionRecord {
            n: circle.fibre_dim(),
            edges: circle.edge_count(),
            l: circle.circumference(),
            mode,
            value_re: value.re,
            value_im: value.im,
            method,
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.value_re, self.value_im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_edge_expansions() {
        let mut b = AlgebraBuilder::new();
        let v0 = b.field_pair(1);
        let v1 = b.field_pair(1);
        let alg = b.build().unwrap();
        let q = c(0.6, -0.8);
        let z = edge_partition(&alg, &linalg::scalar_matrix(q), v0.psibar(), v1.psi()).unwrap();
        let b0a1 = alg.product(&[v0.psibar().ids()[0], v1.psi().ids()[0]]);
        assert!(z.approx_eq(&(&alg.one() - &b0a1.scale(q)), 1e-15));

        let zero = edge_partition(&alg, &linalg::scalar_matrix(c(0.0, 0.0)), v0.psibar(), v1.psi()).unwrap();
        assert_eq!(zero, alg.one());
    }

    #[test]
    fn identity_edge_in_two_dimensions() {
        let mut b = AlgebraBuilder::new();
        let v0 = b.field_pair(2);
        let v1 = b.field_pair(2);
        let alg = b.build().unwrap();
        let z = edge_partition(&alg, &ComplexMatrix::identity(2, 2), v0.psibar(), v1.psi()).unwrap();
        let (b1, b2) = (v0.psibar().ids()[0], v0.psibar().ids()[1]);
        let (a1, a2) = (v1.psi().ids()[0], v1.psi().ids()[1]);
        let x1 = alg.product(&[b1, a1]);
        let x2 = alg.product(&[b2, a2]);
        let expected = &(&alg.one() - &(&x1 + &x2)) + &alg.product(&[b1, a1, b2, a2]);
        assert!(z.approx_eq(&expected, 1e-15), "{z}");
    }

    #[test]
    fn edge_partition_dimension_mismatch() {
        let mut b = AlgebraBuilder::new();
        let v0 = b.field_pair(2);
        let v1 = b.field_pair(2);
        let alg = b.build().unwrap();
        assert!(matches!(
            edge_partition(&alg, &ComplexMatrix::identity(1, 1), v0.psibar(), v1.psi()),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn three_edge_u1_interval() {
        let thetas = [0.4, 1.3, -2.2];
        let tri = TriangulatedInterval::new(thetas.iter().map(|&t| linalg::u1(t)).collect()).unwrap();
        let part = interval_partition(&tri).unwrap();
        let b0 = part.vertices[0].psibar().ids()[0];
        let a3 = part.vertices[3].psi().ids()[0];
        let phase = Complex64::from_polar(1.0, -thetas.iter().sum::<f64>());
        let expected = &part.algebra.one() - &part.algebra.product(&[b0, a3]).scale(phase);
        assert!(part.value.approx_eq(&expected, 1e-12), "{}", part.value);
    }

    #[test]
    fn capacity_error_for_large_intervals() {
        let tri = TriangulatedInterval::new(vec![ComplexMatrix::identity(3, 3); 4]).unwrap();
        assert!(matches!(interval_partition(&tri), Err(Error::Capacity { requested: 30, .. })));
    }

    #[test]
    fn u1_circle_values() {
        let theta = 0.9;
        let tri = TriangulatedCircle::new(vec![linalg::u1(theta)], 1.0).unwrap();
        let expected = c(1.0, 0.0) - Complex64::from_polar(1.0, -theta);
        assert!((circle_partition_symbolic(&tri).unwrap() - expected).norm() < 1e-15);
        let flipped = TriangulatedCircle::new(vec![linalg::u1(PI)], 1.0).unwrap();
        assert!((circle_partition_symbolic(&flipped).unwrap() - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn circle_capacity_guard() {
        let tri = TriangulatedCircle::new(vec![ComplexMatrix::identity(3, 3); 5], 1.0).unwrap();
        assert!(matches!(circle_partition_symbolic(&tri), Err(Error::Capacity { .. })));
    }

    #[test]
    fn gauge_identity_is_neutral() {
        let tri = TriangulatedCircle::u1_uniform(1.0, 3, 2.0).unwrap();
        let g = GaugeTransformation::identity(4, 1);
        assert_eq!(g.apply_circle(&tri).unwrap(), tri);
    }

    #[test]
    fn gauge_rejects_singular_and_mismatched_maps() {
        let mut maps = vec![ComplexMatrix::identity(2, 2); 3];
        maps[1][(1, 1)] = c(1e-13, 0.0);
        assert!(matches!(GaugeTransformation::new(maps), Err(Error::Condition { vertex: 1, .. })));

        let tri = TriangulatedCircle::u1_uniform(1.0, 2, 1.0).unwrap();
        let g = GaugeTransformation::new(vec![linalg::u1(0.1), linalg::u1(0.2), linalg::u1(0.3)]).unwrap();
        assert!(g.apply_circle(&tri).is_err());
    }

    #[test]
    fn massive_reduces_to_massless() {
        let tri = TriangulatedCircle::new(vec![linalg::haar_unitary_seeded(2, 3)], 1.5).unwrap();
        let mm = MassiveModel::new(tri.clone(), 0.0);
        assert!((massive_circle_partition(&mm) - circle_partition_closed(&tri)).norm() < 1e-14);
        assert!((massive_limit(&tri.holonomy(), 0.0, 1.5).unwrap() - circle_partition_closed(&tri)).norm() < 1e-14);
    }

    #[test]
    fn massive_single_edge_u1() {
        let (theta, m, l) = (0.7, 1.3, 0.4);
        let tri = TriangulatedCircle::new(vec![linalg::u1(theta)], l).unwrap();
        let mm = MassiveModel::new(tri, m);
        let expected = c(1.0, -m * l) - Complex64::from_polar(1.0, -theta);
        assert!((massive_circle_partition(&mm) - expected).norm() < 1e-15);
        assert!((massive_circle_partition_symbolic(&mm).unwrap() - expected).norm() < 1e-15);
    }

    #[test]
    fn massive_depends_on_triangulation() {
        let one = massive_circle_partition(&MassiveModel::new(TriangulatedCircle::u1_uniform(PI, 1, 1.0).unwrap(), 1.0));
        let two = massive_circle_partition(&MassiveModel::new(TriangulatedCircle::u1_uniform(PI, 2, 1.0).unwrap(), 1.0));
        // (1 − i) + 1 versus (1 − i/2)² + 1
        assert!((one - c(2.0, -1.0)).norm() < 1e-15);
        assert!((two - c(1.75, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn exponential_mass_is_massless_at_zero() {
        let tri = TriangulatedCircle::u1_uniform(2.0, 5, 3.0).unwrap();
        assert!((exponential_mass_partition(&tri, 0.0) - circle_partition_closed(&tri)).norm() < 1e-15);
    }

    #[test]
    fn quadrature_average_is_one() {
        for k in 1..8 {
            let est = haar_average_u1_quadrature(1 << k);
            assert!((est.mean() - c(1.0, 0.0)).norm() < 1e-12, "{k}: {:?}", est);
        }
    }

    #[test]
    fn haar_average_reproducible() {
        let a = haar_average_circle(2, 10_000, 5).unwrap();
        let b = haar_average_circle(2, 10_000, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn projector_and_control() {
        let r = haar_projector_check(16, 0.8).unwrap();
        assert!(r.t.approx_eq(&r.t.algebra().one(), 1e-12), "{}", r.t);
        assert!(r.is_projector(1e-10));
        assert!(r.control_deviation > 0.1);
    }

    #[test]
    fn record_serialises_with_upper_case_edge_count() {
        let tri = TriangulatedCircle::u1_uniform(PI, 3, 1.0).unwrap();
        let rec = PartitionRecord::new(&tri, PartitionMode::Massless, Method::Closed, circle_partition_closed(&tri));
        let json = serde_json::to_value(&rec).unwrap();
        assert_eq!(json["N"], 3);
        assert_eq!(json["method"], "closed");
        assert_eq!(json["mode"], "massless");
    }
}
