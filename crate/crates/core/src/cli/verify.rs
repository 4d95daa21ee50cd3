//! Property suites behind `statesum verify`. Every suite runs at pinned
//! seeds, so its report is deterministic.

use std::f64::consts::{PI, TAU};

use clap::ValueEnum;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::grassmann::{gaussian_berezin_with, gaussian_closed_form, AlgebraBuilder, IntegrationConvention};
use crate::linalg::{self, ComplexMatrix};
use crate::spectral::{self, CutoffScheme};
use crate::statesum::{self, MassiveModel, TriangulatedCircle, TriangulatedInterval};
use crate::zetareg::{self, Epsilon, FiniteSpectrum, U1Connection};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Suite {
    Gaussian,
    Gluing,
    Circle,
    CentralIdentity,
    FiniteZeta,
    Hurwitz,
    Spectral,
    Mass,
    Cutoff,
    Haar,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Gaussian,
        Suite::Gluing,
        Suite::Circle,
        Suite::CentralIdentity,
        Suite::FiniteZeta,
        Suite::Hurwitz,
        Suite::Spectral,
        Suite::Mass,
        Suite::Cutoff,
        Suite::Haar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Gaussian => "gaussian",
            Suite::Gluing => "gluing",
            Suite::Circle => "circle",
            Suite::CentralIdentity => "central_identity",
            Suite::FiniteZeta => "finite_zeta",
            Suite::Hurwitz => "hurwitz",
            Suite::Spectral => "spectral",
            Suite::Mass => "mass",
            Suite::Cutoff => "cutoff",
            Suite::Haar => "haar",
        }
    }
}

/// Knobs for mutation testing of the suites themselves.
#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    pub convention: IntegrationConvention,
}

/// One measured quantity against its tolerance; passes when
/// `value ≤ tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        // NaN never passes
        Check { name: name.into(), value, tolerance, passed: value <= tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Set when the suite could not run to completion.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> SuiteReport {
    let result = match suite {
        Suite::Gaussian => gaussian(opts.convention),
        Suite::Gluing => gluing(),
        Suite::Circle => circle(),
        Suite::CentralIdentity => central_identity(),
        Suite::FiniteZeta => finite_zeta(),
        Suite::Hurwitz => hurwitz(),
        Suite::Spectral => spectral_convergence(),
        Suite::Mass => mass(),
        Suite::Cutoff => cutoff(),
        Suite::Haar => haar(),
    };
    match result {
        Ok(checks) => SuiteReport { suite, passed: checks.iter().all(|c| c.passed), checks, error: None },
        Err(e) => SuiteReport { suite, passed: false, checks: Vec::new(), error: Some(e.to_string()) },
    }
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    // f64::max drops NaN; keep it so a NaN fails the check
    values.into_iter().fold(0.0, |acc, v| if v.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(v) })
}

fn gaussian(convention: IntegrationConvention) -> Result<Vec<Check>> {
    let mut rng = linalg::rng_for(101, 0);
    let mut plain = Vec::new();
    let mut sourced = Vec::new();
    for trial in 0..100 {
        let n = 1 + trial % 3;
        let m = linalg::random_complex(n, n, &mut rng);
        let mut builder = AlgebraBuilder::new();
        let fields = builder.field_pair(n);
        let cbar_ids: Vec<_> = (0..n).map(|_| builder.generator()).collect();
        let d_ids: Vec<_> = (0..n).map(|_| builder.generator()).collect();
        let alg = builder.build()?;
        let z = gaussian_berezin_with(&alg, &fields, &m, None, convention)?;
        plain.push(z.max_abs_diff(&alg.scalar(linalg::det(&m)?))?);
        if n <= 2 {
            let cbar: Vec<_> = cbar_ids.iter().map(|&g| alg.generator(g)).collect();
            let d: Vec<_> = d_ids.iter().map(|&g| alg.generator(g)).collect();
            let z = gaussian_berezin_with(&alg, &fields, &m, Some((&cbar, &d)), convention)?;
            sourced.push(z.max_abs_diff(&gaussian_closed_form(&alg, &m, &cbar, &d)?)?);
        }
    }
    Ok(vec![Check::new("gaussian_equals_det", worst(plain), 1e-12), Check::new("sourced_gaussian", worst(sourced), 1e-12)])
}

fn gluing() -> Result<Vec<Check>> {
    let mut rng = linalg::rng_for(202, 0);
    let mut errs = Vec::new();
    for trial in 0..50 {
        let n = 1 + trial % 2;
        let count = 1 + (trial / 2) % 4;
        let edges: Vec<_> = (0..count).map(|_| linalg::haar_unitary(n, &mut rng)).collect();
        let tri = TriangulatedInterval::new(edges)?;
        let glued = statesum::interval_partition(&tri)?;
        errs.push(glued.value.max_abs_diff(&glued.single_edge(&tri.product())?)?);
    }
    Ok(vec![Check::new("interval_equals_single_edge", worst(errs), 1e-12)])
}

fn circle() -> Result<Vec<Check>> {
    let mut rng = linalg::rng_for(303, 0);
    let mut sym = Vec::new();
    for n in 1..=2 {
        for count in 1..=3 {
            for _ in 0..3 {
                let edges: Vec<_> = (0..count).map(|_| linalg::haar_unitary(n, &mut rng)).collect();
                let tri = TriangulatedCircle::new(edges, 1.0)?;
                let s = statesum::circle_partition_symbolic(&tri)?;
                sym.push((s - statesum::circle_partition_closed(&tri)).norm());
            }
        }
    }
    let mut u1 = Vec::new();
    for k in 0..16 {
        let theta = TAU * k as f64 / 16.0 + 0.1;
        let tri = TriangulatedCircle::u1_uniform(theta, 3, 1.0)?;
        let expected = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -theta);
        u1.push((statesum::circle_partition_symbolic(&tri)? - expected).norm());
    }
    let so3 = TriangulatedCircle::new(vec![linalg::random_special_orthogonal_seeded(3, 7)], 1.0)?;
    Ok(vec![
        Check::new("symbolic_equals_closed", worst(sym), 1e-12),
        Check::new("u1_one_minus_q", worst(u1), 1e-12),
        Check::new("so3_vanishes", statesum::circle_partition_closed(&so3).norm(), 1e-10),
    ])
}

fn central_identity() -> Result<Vec<Check>> {
    let mut rng = linalg::rng_for(404, 0);
    let mut errs = Vec::new();
    for trial in 0..100 {
        let n = 1 + trial % 4;
        let q = linalg::haar_unitary(n, &mut rng);
        let l = 0.5 + 3.0 * rng.random::<f64>();
        let tri = TriangulatedCircle::new(vec![q.clone()], l)?;
        errs.push((zetareg::continuum_det_un(&q, l)? - statesum::circle_partition_closed(&tri)).norm());
    }
    let mut pipeline = Vec::new();
    for k in 1..=9 {
        let a = k as f64 / 10.0;
        let r = zetareg::continuum_regularised_det(&U1Connection::new(a, 1.0)?);
        let modulus = (-r.zeta_prime.unwrap_or(f64::NAN) / 2.0).exp();
        let expected = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -TAU * a);
        pipeline.push((r.eta0.unwrap_or(f64::NAN) - (1.0 - 2.0 * a)).abs());
        pipeline.push(r.zeta0.unwrap_or(f64::NAN).abs());
        pipeline.push((modulus - 2.0 * (PI * a).sin()).abs());
        pipeline.push((r.det_id.unwrap_or(Complex64::new(f64::NAN, 0.0)) - expected).norm());
    }
    Ok(vec![Check::new("continuum_equals_state_sum", worst(errs), 1e-10), Check::new("zeta_pipeline", worst(pipeline), 1e-10)])
}

fn random_spectrum<R: Rng>(rng: &mut R) -> Result<FiniteSpectrum> {
    let size = rng.random_range(1..=12);
    let values = (0..size)
        .map(|_| {
            let mag = rng.random_range(0.1..5.0);
            if rng.random::<bool>() {
                mag
            } else {
                -mag
            }
        })
        .collect();
    FiniteSpectrum::new(values)
}

fn finite_zeta() -> Result<Vec<Check>> {
    let mut rng = linalg::rng_for(505, 0);
    let (mut dets, mut parity, mut branches, mut identities) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for _ in 0..200 {
        let spec = random_spectrum(&mut rng)?;
        let product = Complex64::new(spec.product(), 0.0);
        let id_product: Complex64 = spec.values().iter().map(|&v| Complex64::new(0.0, v)).product();
        let scale = product.norm().max(1.0);
        let plus = zetareg::finite_det_via_zeta(&spec, Epsilon::Plus);
        let minus = zetareg::finite_det_via_zeta(&spec, Epsilon::Minus);
        dets.push((plus.det_d - product).norm() / scale);
        dets.push((minus.det_d - product).norm() / scale);
        dets.push((plus.det_id - id_product).norm() / scale);
        let diff = plus.eta0 - plus.zeta0;
        parity.push((diff / 2.0 - (diff / 2.0).round()).abs());
        branches.push((plus.det_d - minus.det_d).norm() / scale);

        let s = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        for eps in [Epsilon::Plus, Epsilon::Minus] {
            let z = zetareg::finite_zeta_functions(&spec, s, eps);
            let phase = (Complex64::new(0.0, eps.sign() * PI) * s).exp();
            let lhs_d = (phase + 1.0) * 0.5 * z.zeta_d2_half + (-phase + 1.0) * 0.5 * z.eta;
            let half = s * (PI / 2.0);
            let lhs_id = half.cos() * z.zeta_d2_half - Complex64::i() * half.sin() * z.eta;
            let abs_sum: f64 = spec.values().iter().map(|v| v.abs().powf(-s.re)).sum();
            let norm = (1.0 + phase.norm()) * abs_sum;
            identities.push((lhs_d - z.zeta_d).norm() / norm);
            identities.push((lhs_id - z.zeta_id).norm() / norm);
        }
    }
    Ok(vec![
        Check::new("dets_equal_products", worst(dets), 1e-12),
        Check::new("eta_minus_zeta_even", worst(parity), 1e-12),
        Check::new("epsilon_branches_agree", worst(branches), 1e-12),
        Check::new("zeta_identities", worst(identities), 1e-12),
    ])
}

/// `Σ_{k<K} (k+q)^{-s}` plus integral tail and the first two Bernoulli
/// corrections at `K = 10⁵`.
fn direct_series(s: Complex64, q: f64) -> Complex64 {
    let k = 100_000;
    let partial: Complex64 = (0..k).rev().map(|i| Complex64::new(i as f64 + q, 0.0).powc(-s)).sum();
    let x = Complex64::new(k as f64 + q, 0.0);
    partial + x.powc(1.0 - s) / (s - 1.0) + x.powc(-s) * 0.5 + s * x.powc(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * x.powc(-s - 3.0) / 720.0
}

fn hurwitz() -> Result<Vec<Check>> {
    let qs = [0.1, 0.25, 0.5, 0.7, 0.9, 1.0];
    let mut series = Vec::new();
    for s in [Complex64::new(1.6, 0.0), Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0), Complex64::new(2.5, 1.5)] {
        for &q in &qs {
            series.push((zetareg::hurwitz_zeta(s, q)? - direct_series(s, q)).norm());
        }
    }
    let mut at_zero = Vec::new();
    let mut derivative = Vec::new();
    let mut reflection = Vec::new();
    let h = 1e-5;
    for &q in &qs[..5] {
        at_zero.push((zetareg::hurwitz_zeta(Complex64::default(), q)?.re - (0.5 - q)).abs());
        let fd = (zetareg::hurwitz_zeta(Complex64::new(h, 0.0), q)? - zetareg::hurwitz_zeta(Complex64::new(-h, 0.0), q)?)
            / (2.0 * h);
        let (_, lerch) = zetareg::hurwitz_special(q)?;
        derivative.push((fd.re - lerch).abs());
        let (_, reflected) = zetareg::hurwitz_special(1.0 - q)?;
        reflection.push((lerch + reflected + (2.0 * (PI * q).sin()).ln()).abs());
    }
    Ok(vec![
        Check::new("matches_direct_series", worst(series), 1e-11),
        Check::new("value_at_zero", worst(at_zero), 1e-11),
        Check::new("derivative_at_zero", worst(derivative), 1e-8),
        Check::new("reflection_sum_rule", worst(reflection), 1e-10),
    ])
}

fn spectral_convergence() -> Result<Vec<Check>> {
    let theta = PI;
    let ks = [-2i64, -1, 0, 1, 2];
    let sizes: Vec<usize> = (5..=12).map(|p| 1usize << p).collect();
    let reports = sizes.iter().map(|&n| spectral::compare_spectra(theta, n, 2, None)).collect::<Result<Vec<_>>>()?;
    let mut ratio_err = Vec::new();
    for w in reports.windows(2) {
        for &k in &ks {
            let (coarse, fine) = (w[0].entry(k), w[1].entry(k));
            if let (Some(c), Some(f)) = (coarse, fine) {
                ratio_err.push((c.deviation / f.deviation / 4.0 - 1.0).abs());
            }
        }
    }
    let mut det_err = Vec::new();
    let mut rng = linalg::rng_for(707, 0);
    for &(n, count) in &[(1usize, 1usize), (1, 2), (1, 7), (1, 50), (1, 200), (2, 3), (2, 100)] {
        let edges: Vec<_> = (0..count).map(|_| linalg::haar_unitary(n, &mut rng)).collect();
        let tri = TriangulatedCircle::new(edges, count as f64)?;
        det_err.push((spectral::build_discrete_dirac(&tri).det() - statesum::circle_partition_closed(&tri)).norm());
    }
    Ok(vec![Check::new("doubling_ratio_four", worst(ratio_err), 0.1), Check::new("det_im_equals_closed", worst(det_err), 1e-10)])
}

/// `N` values log-spaced over `[10², 10⁴]`.
pub fn mass_fit_grid() -> Vec<usize> {
    (0..=8).map(|j| (100.0 * 10f64.powf(j as f64 / 4.0)).round() as usize).collect()
}

fn mass() -> Result<Vec<Check>> {
    let (theta, m, l) = (PI, 1.0, 1.0);
    let q = linalg::u1(theta);
    let limit = statesum::massive_limit(&q, m, l)?;
    let points: Vec<(f64, f64)> = mass_fit_grid()
        .into_iter()
        .map(|count| {
            let circle = TriangulatedCircle::u1_uniform(theta, count, l)?;
            let z = statesum::massive_circle_partition(&MassiveModel::new(circle, m));
            Ok(((count as f64).ln(), (z - limit).norm().ln()))
        })
        .collect::<Result<_>>()?;
    let slope = spectral::fit_slope(&points).unwrap_or(f64::NAN);

    let mut rng = linalg::rng_for(808, 0);
    let mut spread = Vec::new();
    for _ in 0..5 {
        let qn = linalg::haar_unitary(2, &mut rng);
        let mp = rng.random_range(-3.0..3.0);
        let values = [1usize, 10, 100]
            .iter()
            .map(|&count| {
                let mut edges = vec![ComplexMatrix::identity(2, 2); count];
                edges[0] = qn.clone();
                Ok(statesum::exponential_mass_partition(&TriangulatedCircle::new(edges, 1.7)?, mp))
            })
            .collect::<Result<Vec<_>>>()?;
        spread.extend(values.iter().map(|v| (v - values[0]).norm()));
    }

    let (mut modulus, mut phase) = (Vec::new(), Vec::new());
    for trial in 0..20 {
        let n = 1 + trial % 2;
        let qn = linalg::haar_unitary(n, &mut rng);
        let (m, l) = (rng.random_range(-3.0..3.0), rng.random_range(0.2..4.0));
        let r = zetareg::continuum_det_massive(&qn, m, l)?;
        let ratio = r.phase_ratio.unwrap_or(Complex64::new(f64::NAN, 0.0));
        modulus.push((ratio.norm() - 1.0).abs());
        if n == 1 {
            phase.push((ratio - Complex64::from_polar(1.0, -m * l)).norm());
        }
    }
    Ok(vec![
        Check::new("loglog_slope_minus_one", (slope + 1.0).abs(), 0.1),
        Check::new("exponential_mass_n_independent", worst(spread), 1e-12),
        Check::new("phase_ratio_unit_modulus", worst(modulus), 1e-10),
        Check::new("phase_ratio_u1", worst(phase), 1e-10),
    ])
}

fn cutoff() -> Result<Vec<Check>> {
    let l = TAU;
    let grid = spectral::log_grid(100.0, 10_000.0, 25);
    let r = spectral::cutoff_report(0.5, l, &grid, CutoffScheme::Sharp)?;
    let ratios: Vec<f64> = grid.iter().zip(&r.remainders).map(|(&c, &rem)| (rem / (c * c.ln())).abs()).collect();
    let violations = ratios.windows(2).filter(|w| !(w[1] < w[0])).count();
    Ok(vec![
        Check::new("leading_coefficient", (r.kappa / (l / PI) - 1.0).abs(), 0.05),
        Check::new("remainder_ratio_monotone", violations as f64, 0.0),
    ])
}

pub const HAAR_MC_SEED: u64 = 1010;

fn haar() -> Result<Vec<Check>> {
    let quad = statesum::haar_average_u1_quadrature(64);
    let projector = statesum::haar_projector_check(64, 0.7)?;
    let mc = statesum::haar_average_circle(2, 100_000, HAAR_MC_SEED)?;
    let z = ((mc.mean_re - 1.0) / mc.std_error_re).abs().max((mc.mean_im / mc.std_error_im).abs());
    Ok(vec![
        Check::new("u1_quadrature_is_one", (quad.mean() - Complex64::new(1.0, 0.0)).norm(), 1e-12),
        Check::new("t_squared_equals_t", projector.tt_deviation, 1e-10),
        Check::new("u2_monte_carlo_sigma", z, 3.0),
    ])
}
