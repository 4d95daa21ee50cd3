//! The discrete Dirac operator `iM` of a triangulated circle, its spectrum,
//! and how it compares with the continuum operator.
//!
//! `iM` has identity blocks on the diagonal, `-Q_{j+1}` on block
//! superdiagonal `j` and `-Q_1` in the bottom-left corner, so that
//! `ψ̄ iM ψ = Σ_j ψ̄_j (ψ_j − Q_{j+1} ψ_{j+1})`.

use std::f64::consts::{PI, TAU};
use std::ops::RangeInclusive;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::report::{num, CsvTable};
use crate::statesum::TriangulatedCircle;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDirac {
    edges: Vec<ComplexMatrix>,
    n: usize,
    matrix: ComplexMatrix,
}

impl DiscreteDirac {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn fibre_dim(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn det(&self) -> Complex64 {
        linalg::det(&self.matrix).expect("square by construction")
    }

    /// Dense eigenvalues of `iM`.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        linalg::eigenvalues(&self.matrix).expect("square by construction")
    }
}

pub fn build_discrete_dirac(tri: &TriangulatedCircle) -> DiscreteDirac {
    let (n, count) = (tri.fibre_dim(), tri.edge_count());
    let size = n * count;
    let mut m = ComplexMatrix::identity(size, size);
    for j in 0..count {
        // row block j couples to vertex j+1 through edge j+1 (edges[(j+1) % N])
        let col = ((j + 1) % count) * n;
        let q = &tri.edges()[(j + 1) % count];
        let mut block = m.view_mut((j * n, col), (n, n));
        block -= q;
    }
    DiscreteDirac { edges: tri.edges().to_vec(), n, matrix: m }
}

/// `[(1−N)/2] ..= [(N−1)/2]` with floor brackets.
pub fn k_range(edges: usize) -> RangeInclusive<i64> {
    let n = edges as i64;
    (1 - n).div_euclid(2)..=(n - 1).div_euclid(2)
}

/// `μ_k = 1 − e^{-i(θ + 2πk)/N}` for `k` in [`k_range`].
pub fn discrete_spectrum_u1(theta: f64, edges: usize) -> Vec<(i64, Complex64)> {
    k_range(edges).map(|k| (k, discrete_eigenvalue_u1(theta, edges, k))).collect()
}

pub fn discrete_eigenvalue_u1(theta: f64, edges: usize, k: i64) -> Complex64 {
    let x = (theta + TAU * k as f64) / edges as f64;
    Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct U1Eigenpair {
    pub k: i64,
    pub alpha: Complex64,
    pub mu: Complex64,
    pub vector: Vec<Complex64>,
}

/// Eigenvector `(α^{j-1} Q_j^{-1} ⋯ Q_1^{-1})_j` of `iM` for a U(1) circle
/// with arbitrary edge phases, using the principal root
/// `α_k = e^{-iθ/N} e^{-2πik/N}`.
pub fn eigenvector_u1(tri: &TriangulatedCircle, k: i64) -> Result<U1Eigenpair> {
    if tri.fibre_dim() != 1 {
        return Err(argument("eigenvector_u1 needs a U(1) circle"));
    }
    let count = tri.edge_count();
    let q: Vec<Complex64> = tri.edges().iter().map(|e| e[(0, 0)]).collect();
    let theta = linalg::phase_of(q.iter().product());
    let alpha = Complex64::from_polar(1.0, -(theta + TAU * k as f64) / count as f64);
    let mut vector = Vec::with_capacity(count);
    let mut transport = Complex64::new(1.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    for qj in &q {
        transport /= qj;
        vector.push(power * transport);
        power *= alpha;
    }
    Ok(U1Eigenpair { k, alpha, mu: Complex64::new(1.0, 0.0) - alpha, vector })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumMode {
    pub k: i64,
    /// Eigenvalue `λ_k = 2π(k + a)/l` of the Dirac operator.
    pub lambda: f64,
    /// `iλ_k`.
    pub mu: Complex64,
}

/// Eigenvalues of the circle Dirac operator for the constant connection `a`.
pub fn continuum_spectrum_u1(a: f64, l: f64, ks: RangeInclusive<i64>) -> Result<Vec<ContinuumMode>> {
    if !(0.0..1.0).contains(&a) || !(l > 0.0) {
        return Err(argument("need a ∈ [0, 1) and l > 0"));
    }
    if a == 0.0 {
        return Err(Error::ZeroMode);
    }
    Ok(ks
        .map(|k| {
            let lambda = TAU * (k as f64 + a) / l;
            ContinuumMode { k, lambda, mu: Complex64::new(0.0, lambda) }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumEntry {
    pub k: i64,
    pub discrete: Complex64,
    pub continuum: Complex64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub theta: f64,
    pub edges: usize,
    pub l: f64,
    pub entries: Vec<SpectrumEntry>,
    /// `Π μ_k` over all `N` discrete eigenvalues.
    pub discrete_product: Complex64,
    /// Slope of `log deviation` against `log |(θ + 2πk)/N|`.
    pub fitted_order: Option<f64>,
}

impl SpectrumReport {
    pub fn entry(&self, k: i64) -> Option<&SpectrumEntry> {
        self.entries.iter().find(|e| e.k == k)
    }

    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["k", "re_disc", "im_disc", "re_cont", "im_cont", "abs_dev"]);
        for e in &self.entries {
            t.row(vec![
                e.k.to_string(),
                num(e.discrete.re),
                num(e.discrete.im),
                num(e.continuum.re),
                num(e.continuum.im),
                num(e.deviation),
            ]);
        }
        if let Some(p) = self.fitted_order {
            t.footer(format!("fitted_order={}", num(p)));
        }
        t
    }
}

/// Discrete eigenvalues against `i(θ + 2πk)/l` for `|k| ≤ k_max`; `l`
/// defaults to `N`.
pub fn compare_spectra(theta: f64, edges: usize, k_max: usize, l: Option<f64>) -> Result<SpectrumReport> {
    if edges == 0 {
        return Err(argument("need at least one edge"));
    }
    let range = k_range(edges);
    let k_max = k_max as i64;
    if k_max >= edges as i64 || !range.contains(&-k_max) || !range.contains(&k_max) {
        return Err(Error::Validation(format!(
            "k_max = {k_max} outside the eigenvalue labels {}..={} for N = {edges}",
            range.start(),
            range.end()
        )));
    }
    let l = l.unwrap_or(edges as f64);
    if !(l > 0.0) {
        return Err(argument("l must be positive"));
    }
    let entries: Vec<SpectrumEntry> = (-k_max..=k_max)
        .map(|k| {
            let discrete = discrete_eigenvalue_u1(theta, edges, k);
            let continuum = Complex64::new(0.0, (theta + TAU * k as f64) / l);
            SpectrumEntry { k, discrete, continuum, deviation: (discrete - continuum).norm() }
        })
        .collect();
    let discrete_product = discrete_spectrum_u1(theta, edges).iter().map(|(_, mu)| mu).product();
    let points: Vec<(f64, f64)> = entries
        .iter()
        .filter_map(|e| {
            let x = ((theta + TAU * e.k as f64) / edges as f64).abs();
            (x > 0.0 && e.deviation > 0.0).then(|| (x.ln(), e.deviation.ln()))
        })
        .collect();
    Ok(SpectrumReport { theta, edges, l, entries, discrete_product, fitted_order: fit_slope(&points) })
}

/// Least-squares slope through `(x, y)` points.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Smallest pairwise distance in a list of eigenvalues.
pub fn min_gap(values: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            gap = gap.min((a - b).norm());
        }
    }
    gap
}

/// Regularisation scheme for the cutoff determinant. Only the sharp
/// cutoff is implemented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffScheme {
    #[default]
    Sharp,
}

/// `Σ log|λ_k|` over eigenvalues `λ_k = 2π(k + a)/l` with `|λ_k| ≤ c`.
pub fn cutoff_log_det(a: f64, l: f64, c: f64, scheme: CutoffScheme) -> Result<f64> {
    let CutoffScheme::Sharp = scheme;
    if !(l > 0.0) || !(0.0..1.0).contains(&a) {
        return Err(argument("need a ∈ [0, 1) and l > 0"));
    }
    if !(c > TAU / l) {
        return Err(argument(format!("cutoff {c} must exceed 2π/l = {}", TAU / l)));
    }
    if a == 0.0 {
        return Err(Error::ZeroMode);
    }
    let unit = TAU / l;
    let reach = c / unit;
    let lo = (-reach - a).floor() as i64 - 1;
    let hi = (reach - a).ceil() as i64 + 1;
    Ok((lo..=hi)
        .map(|k| (unit * (k as f64 + a)).abs())
        .filter(|lam| *lam <= c)
        .map(f64::ln)
        .sum())
}

/// Fit of `log det ≈ κ c log c + β c + γ log c + δ` over a cutoff grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffReport {
    pub a: f64,
    pub l: f64,
    pub cutoffs: Vec<f64>,
    pub log_dets: Vec<f64>,
    /// Leading coefficient κ; asymptotically `l/π`.
    pub kappa: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    /// `log det − κ c log c` per cutoff.
    pub remainders: Vec<f64>,
    /// `Λ(c)` such that `log det + Λ(c) l` has no `c log c` or `c` growth.
    pub counterterms: Vec<f64>,
}

impl CutoffReport {
    pub fn leading(&self, c: f64) -> f64 {
        self.kappa * c * c.ln()
    }

    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["c", "logdet", "fitted_leading", "residual"]);
        for (i, &c) in self.cutoffs.iter().enumerate() {
            t.row(vec![num(c), num(self.log_dets[i]), num(self.leading(c)), num(self.remainders[i])]);
        }
        t.footer(format!("kappa={} expected={}", num(self.kappa), num(self.l / PI)));
        t.footer(format!("beta={} gamma={} delta={}", num(self.beta), num(self.gamma), num(self.delta)));
        t
    }
}

/// Integer cutoffs spread log-uniformly over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2 && lo > 0.0 && hi > lo);
    let mut grid: Vec<f64> = (0..points)
        .map(|i| (lo * (hi / lo).powf(i as f64 / (points - 1) as f64)).round())
        .collect();
    grid.dedup();
    grid
}

pub fn cutoff_report(a: f64, l: f64, cutoffs: &[f64], scheme: CutoffScheme) -> Result<CutoffReport> {
    if cutoffs.len() < 4 {
        return Err(argument("the four-term fit needs at least four cutoffs"));
    }
    let log_dets = cutoffs.iter().map(|&c| cutoff_log_det(a, l, c, scheme)).collect::<Result<Vec<_>>>()?;
    let basis = |c: f64| [c * c.ln(), c, c.ln(), 1.0];
    let mut design = DMatrix::<f64>::from_fn(cutoffs.len(), 4, |i, j| basis(cutoffs[i])[j]);
    // scale columns to unit max so the solve is well conditioned
    let scales: Vec<f64> = (0..4).map(|j| design.column(j).amax().max(f64::MIN_POSITIVE)).collect();
    for (j, s) in scales.iter().enumerate() {
        design.column_mut(j).unscale_mut(*s);
    }
    let rhs = DVector::from_vec(log_dets.clone());
    let coef = design
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| argument(format!("cutoff fit failed: {e}")))?;
    let [kappa, beta, gamma, delta] = [0, 1, 2, 3].map(|j| coef[j] / scales[j]);
    let remainders = cutoffs.iter().zip(&log_dets).map(|(&c, &v)| v - kappa * c * c.ln()).collect();
    let counterterms = cutoffs.iter().map(|&c| -(kappa * c * c.ln() + beta * c) / l).collect();
    Ok(CutoffReport {
        a,
        l,
        cutoffs: cutoffs.to_vec(),
        log_dets,
        kappa,
        beta,
        gamma,
        delta,
        remainders,
        counterterms,
    })
}
