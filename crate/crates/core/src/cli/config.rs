//! Experiment configuration: a JSON file merged with command-line overrides,
//! and the holonomy mini-language.

use std::f64::consts::{PI, TAU};
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::statesum::TriangulatedCircle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Where the circle's gauge field comes from.
///
/// ```json
/// {"type": "u1", "theta": 3.14159}
/// {"type": "file", "path": "q.txt", "layout": "row-major re,im pairs"}
/// {"type": "haar", "n": 2, "seed": 11}
/// {"type": "so", "n": 3, "seed": 7}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum HolonomySpec {
    U1 {
        theta: f64,
    },
    File {
        path: PathBuf,
        #[serde(default = "default_layout")]
        layout: String,
    },
    Haar {
        n: usize,
        seed: u64,
    },
    So {
        n: usize,
        seed: u64,
    },
}

pub const FILE_LAYOUT: &str = "row-major re,im pairs";

fn default_layout() -> String {
    FILE_LAYOUT.to_string()
}

fn parse_error(field: &str, reason: impl Into<String>) -> Error {
    Error::Parse { field: field.to_string(), reason: reason.into() }
}

impl HolonomySpec {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| parse_error("holonomy", e.to_string()))
    }

    /// Edge matrices for an `N`-edge circle:
    /// * `u1` splits θ evenly, `Q_j = e^{-iθ/N}`;
    /// * `file` puts the matrix on the first edge and identities elsewhere;
    /// * `haar`/`so` draw `N` independent edges from the seed.
    pub fn edges(&self, count: usize) -> Result<Vec<ComplexMatrix>> {
        if count == 0 {
            return Err(Error::Validation("N must be at least 1".into()));
        }
        Ok(match self {
            HolonomySpec::U1 { theta } => vec![linalg::u1(theta / count as f64); count],
            HolonomySpec::File { path, layout } => {
                if layout != FILE_LAYOUT {
                    return Err(parse_error("holonomy.layout", format!("unsupported layout `{layout}`")));
                }
                let q = read_matrix(path)?;
                let n = q.nrows();
                let mut edges = vec![ComplexMatrix::identity(n, n); count];
                edges[0] = q;
                edges
            }
            HolonomySpec::Haar { n, seed } => {
                check_dim(*n)?;
                let mut rng = linalg::rng_for(*seed, 0);
                (0..count).map(|_| linalg::haar_unitary(*n, &mut rng)).collect()
            }
            HolonomySpec::So { n, seed } => {
                check_dim(*n)?;
                let mut rng = linalg::rng_for(*seed, 0);
                (0..count).map(|_| linalg::random_special_orthogonal(*n, &mut rng)).collect()
            }
        })
    }

    pub fn circle(&self, count: usize, l: f64) -> Result<TriangulatedCircle> {
        TriangulatedCircle::new(self.edges(count)?, l)
    }

    pub fn holonomy(&self) -> Result<ComplexMatrix> {
        linalg::ordered_product(&self.edges(1)?)
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        Err(parse_error("holonomy.n", "must be at least 1"))
    } else {
        Ok(())
    }
}

/// Reads a square complex matrix stored as whitespace- or comma-separated
/// `re im` pairs in row-major order.
pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    let text = fs::read_to_string(path)
        .map_err(|e| parse_error("holonomy.path", format!("cannot read {}: {e}", path.display())))?;
    let numbers = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| parse_error("holonomy.path", format!("`{t}` is not a number"))))
        .collect::<Result<Vec<f64>>>()?;
    let entries = numbers.len() / 2;
    let n = (entries as f64).sqrt().round() as usize;
    if numbers.len() % 2 != 0 || n == 0 || n * n != entries {
        return Err(parse_error(
            "holonomy.path",
            format!("{} numbers do not form a square matrix of re,im pairs", numbers.len()),
        ));
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        let k = 2 * (i * n + j);
        num_complex::Complex64::new(numbers[k], numbers[k + 1])
    }))
}

/// Cutoff grid: integer cutoffs log-spaced over `[c_min, c_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffGrid {
    pub c_min: f64,
    pub c_max: f64,
    pub points: usize,
}

/// Every experiment parameter. Absent fields take the per-command defaults
/// listed in [`ExperimentConfig::with_defaults`]; the resolved config is
/// echoed into each output artifact.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holonomy: Option<HolonomySpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub edges: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoffs: Option<CutoffGrid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_sweep: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbolic: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub allow_zero_mode: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

macro_rules! overlay {
    ($base:ident, $over:ident; $($field:ident),*) => {
        $( if $over.$field.is_some() { $base.$field = $over.$field; } )*
    };
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| parse_error("config", format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| parse_error("config", e.to_string()))
    }

    /// Fields set in `over` replace those in `self`.
    pub fn merge(mut self, over: ExperimentConfig) -> Self {
        overlay!(self, over; command, holonomy, theta, edges, n, l, m, a, k_max, cutoffs, n_sweep,
                 samples, seed, symbolic, allow_zero_mode, out, format);
        self
    }

    /// Fills the documented defaults for `command`:
    ///
    /// | command  | defaults |
    /// |----------|----------|
    /// | circle   | θ = π, N = 1, l = 1, symbolic when 2nN ≤ 12 |
    /// | spectrum | θ = π, N = 1000, k_max = 3, l = N |
    /// | mass     | θ = π, m = 1, l = 1, N ∈ {10·2^j} up to 20480 |
    /// | cutoff   | a = ½, l = 2π, c ∈ [100, 10000] on 25 points |
    /// | haar     | n = 1, samples = 100000 (seed required when n ≥ 2) |
    /// | zeta     | a = ½ unless θ or a holonomy is given, l = 1 |
    pub fn with_defaults(mut self, command: &str) -> Self {
        self.command = Some(command.to_string());
        match command {
            "circle" => {
                if self.holonomy.is_none() {
                    self.theta.get_or_insert(PI);
                }
                self.edges.get_or_insert(1);
                self.l.get_or_insert(1.0);
            }
            "spectrum" => {
                self.theta.get_or_insert(PI);
                let count = *self.edges.get_or_insert(1000);
                self.k_max.get_or_insert(3);
                self.l.get_or_insert(count as f64);
            }
            "mass" => {
                if self.holonomy.is_none() {
                    self.theta.get_or_insert(PI);
                }
                self.m.get_or_insert(1.0);
                self.l.get_or_insert(1.0);
                self.n_sweep.get_or_insert_with(default_mass_sweep);
            }
            "cutoff" => {
                self.a.get_or_insert(0.5);
                self.l.get_or_insert(TAU);
                self.cutoffs.get_or_insert(CutoffGrid { c_min: 100.0, c_max: 10_000.0, points: 25 });
            }
            "haar" => {
                self.n.get_or_insert(1);
                self.samples.get_or_insert(100_000);
            }
            "zeta" => {
                if self.holonomy.is_none() && self.theta.is_none() {
                    self.a.get_or_insert(0.5);
                }
                self.l.get_or_insert(1.0);
            }
            _ => {}
        }
        self
    }

    /// Compact JSON echo used in artifact headers.
    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("config serialises")
    }
}

pub fn default_mass_sweep() -> Vec<usize> {
    (0..=11).map(|j| 10usize << j).collect()
}
