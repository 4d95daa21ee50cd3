//! The `statesum` command-line front end.
//!
//! Each experiment command resolves an [`ExperimentConfig`] (JSON file plus
//! flag overrides plus documented defaults), computes an [`Artifact`], and
//! writes it as CSV or JSON with the resolved config echoed in the header.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or validation
//! error, 3 capacity exceeded.

pub mod config;
pub mod verify;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::grassmann::{IntegrationConvention, MAX_GENERATORS};
use crate::linalg::{self, ComplexMatrix};
use crate::report::{num, CsvTable};
use crate::spectral::{self, CutoffScheme};
use crate::statesum::{self, Method, MassiveModel, PartitionMode, PartitionRecord, TriangulatedCircle};
use crate::zetareg::{self, U1Connection};

pub use config::{CutoffGrid, ExperimentConfig, Format, HolonomySpec};
pub use verify::{run_suite, Suite, SuiteReport, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SUITE_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

/// Symbolic circle evaluation runs by default only up to this many
/// generators; `--symbolic` forces it up to the algebra limit.
pub const AUTO_SYMBOLIC_GENERATORS: usize = 12;

/// Quadrature nodes for the U(1) Haar average; the trapezoidal rule is exact
/// for the degree-one integrand with any node count above one.
pub const U1_QUADRATURE_NODES: usize = 64;

#[derive(Parser, Debug)]
#[command(name = "statesum", version, about = "Fermionic state sum model on triangulated circles", args_conflicts_with_subcommands = false)]
#[command(allow_negative_numbers = true)]
struct Cli {
    /// JSON experiment config; flags override its fields.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output file (default: stdout).
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for stochastic commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the property suites at pinned seeds.
    Verify(VerifyArgs),
    /// Circle partition function det(I − Q), closed form and symbolic.
    Circle(Params),
    /// Discrete against continuum Dirac eigenvalues (spectrum.csv).
    Spectrum(Params),
    /// Massive state sums against their N → ∞ limit.
    Mass(Params),
    /// Sharp-cutoff log-determinant and its asymptotic fit (cutoff.csv).
    Cutoff(Params),
    /// Haar average of the circle partition function.
    Haar(Params),
    /// Zeta-regularised determinant of the continuum Dirac operator.
    Zeta(Params),
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Run only these suites (repeatable).
    #[arg(long, value_enum)]
    suite: Vec<Suite>,
    /// Berezin sign convention used by the gaussian suite; `rightmost` is a
    /// mutation hook that must make the suite fail.
    #[arg(long, value_enum, hide = true, default_value = "leftmost")]
    berezin_convention: ConventionArg,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum ConventionArg {
    Leftmost,
    Rightmost,
}

#[derive(Args, Debug, Default)]
struct Params {
    /// Holonomy phase θ with Q = e^{-iθ}.
    #[arg(long)]
    theta: Option<f64>,
    /// Number of edges.
    #[arg(long = "N")]
    edges: Option<usize>,
    /// Fibre dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Circumference.
    #[arg(long)]
    l: Option<f64>,
    /// Mass.
    #[arg(long)]
    m: Option<f64>,
    /// Constant connection a ∈ [0, 1).
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    /// Holonomy spec as inline JSON, e.g. '{"type":"so","n":3,"seed":7}'.
    #[arg(long)]
    holonomy: Option<String>,
    /// Comma-separated N values for `mass`.
    #[arg(long, value_delimiter = ',')]
    n_sweep: Option<Vec<usize>>,
    #[arg(long)]
    c_min: Option<f64>,
    #[arg(long)]
    c_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// Force symbolic Berezin evaluation.
    #[arg(long)]
    symbolic: bool,
    /// Report zero-mode connections (determinant 0) instead of rejecting them.
    #[arg(long)]
    allow_zero_mode: bool,
}

/// A computed result in both output shapes.
#[derive(Debug)]
pub struct Artifact {
    pub table: CsvTable,
    pub json: Value,
    pub default_format: Format,
}

impl Artifact {
    pub fn render(&self, config: &ExperimentConfig) -> String {
        match config.format.unwrap_or(self.default_format) {
            Format::Csv => {
                let mut t = self.table.clone();
                t.comment(format!("config: {}", config.echo()));
                t.to_string_lossy()
            }
            Format::Json => {
                let mut obj = Map::new();
                obj.insert("config".into(), serde_json::to_value(config).expect("config serialises"));
                match &self.json {
                    Value::Object(m) => obj.extend(m.clone()),
                    other => {
                        obj.insert("result".into(), other.clone());
                    }
                }
                let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("json serialises");
                s.push('\n');
                s
            }
        }
    }
}

fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

fn need<T: Copy>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| validation(format!("missing parameter `{name}`")))
}

fn positive(v: f64, name: &str) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(validation(format!("`{name}` must be positive and finite, got {v}")))
    }
}

fn holonomy_source(cfg: &ExperimentConfig) -> Result<HolonomySpec> {
    match (&cfg.holonomy, cfg.theta) {
        (Some(h), _) => Ok(h.clone()),
        (None, Some(theta)) => Ok(HolonomySpec::U1 { theta }),
        (None, None) => Err(validation("need a holonomy spec or --theta")),
    }
}

fn complex_row(z: Complex64) -> [String; 2] {
    [num(z.re), num(z.im)]
}

pub fn cmd_circle(cfg: &ExperimentConfig) -> Result<Artifact> {
    let count = need(cfg.edges, "N")?;
    let l = positive(need(cfg.l, "l")?, "l")?;
    let circle = holonomy_source(cfg)?.circle(count, l)?;
    let generators = 2 * circle.fibre_dim() * count;
    let forced = cfg.symbolic.unwrap_or(false);
    let mut records = vec![PartitionRecord::new(
        &circle,
        PartitionMode::Massless,
        Method::Closed,
        statesum::circle_partition_closed(&circle),
    )];
    if forced || generators <= AUTO_SYMBOLIC_GENERATORS {
        let value = statesum::circle_partition_symbolic(&circle)?;
        records.push(PartitionRecord::new(&circle, PartitionMode::Massless, Method::Symbolic, value));
    }
    let mut table = CsvTable::new(&["n", "N", "l", "mode", "value_re", "value_im", "method"]);
    for r in &records {
        table.row(vec![
            r.n.to_string(),
            r.edges.to_string(),
            num(r.l),
            "massless".into(),
            num(r.value_re),
            num(r.value_im),
            match r.method {
                Method::Closed => "closed".into(),
                Method::Symbolic => "symbolic".into(),
            },
        ]);
    }
    Ok(Artifact { table, json: json!({ "records": records }), default_format: Format::Json })
}

pub fn cmd_spectrum(cfg: &ExperimentConfig) -> Result<Artifact> {
    let theta = need(cfg.theta, "theta")?;
    let count = need(cfg.edges, "N")?;
    let k_max = need(cfg.k_max, "k_max")?;
    let l = positive(need(cfg.l, "l")?, "l")?;
    if k_max >= count {
        return Err(validation(format!("k_max = {k_max} must be below N = {count}")));
    }
    let report = spectral::compare_spectra(theta, count, k_max, Some(l))?;
    let mut table = report.to_csv();
    let [pr, pi] = complex_row(report.discrete_product);
    table.footer(format!("discrete_product={pr},{pi}"));
    let entries: Vec<Value> = report
        .entries
        .iter()
        .map(|e| {
            json!({"k": e.k, "re_disc": e.discrete.re, "im_disc": e.discrete.im,
                   "re_cont": e.continuum.re, "im_cont": e.continuum.im, "abs_dev": e.deviation})
        })
        .collect();
    let json = json!({
        "entries": entries,
        "fitted_order": report.fitted_order,
        "discrete_product_re": report.discrete_product.re,
        "discrete_product_im": report.discrete_product.im,
    });
    Ok(Artifact { table, json, default_format: Format::Csv })
}

pub fn cmd_mass(cfg: &ExperimentConfig) -> Result<Artifact> {
    let m = need(cfg.m, "m")?;
    let l = positive(need(cfg.l, "l")?, "l")?;
    let sweep = cfg.n_sweep.clone().ok_or_else(|| validation("missing parameter `n_sweep`"))?;
    if sweep.is_empty() || sweep.contains(&0) {
        return Err(validation("n_sweep needs at least one positive N"));
    }
    let source = holonomy_source(cfg)?;
    let q = source.holonomy()?;
    let n = linalg::ensure_square(&q)?;
    let circle_for = |count: usize| -> Result<TriangulatedCircle> {
        match &source {
            HolonomySpec::U1 { theta } => TriangulatedCircle::u1_uniform(*theta, count, l),
            _ => {
                let mut edges = vec![ComplexMatrix::identity(n, n); count];
                edges[0] = q.clone();
                TriangulatedCircle::new(edges, l)
            }
        }
    };
    let limit = statesum::massive_limit(&q, m, l)?;
    let mut table =
        CsvTable::new(&["N", "re_disc", "im_disc", "re_limit", "im_limit", "abs_dev", "re_exp", "im_exp"]);
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for &count in &sweep {
        let circle = circle_for(count)?;
        let z = statesum::massive_circle_partition(&MassiveModel::new(circle.clone(), m));
        let exp = statesum::exponential_mass_partition(&circle, m);
        let dev = (z - limit).norm();
        if dev > 0.0 {
            points.push(((count as f64).ln(), dev.ln()));
        }
        let [zr, zi] = complex_row(z);
        let [lr, li] = complex_row(limit);
        let [er, ei] = complex_row(exp);
        table.row(vec![count.to_string(), zr, zi, lr, li, num(dev), er, ei]);
        rows.push(json!({"N": count, "re_disc": z.re, "im_disc": z.im, "abs_dev": dev, "re_exp": exp.re, "im_exp": exp.im}));
    }
    let slope = spectral::fit_slope(&points);
    let cont = zetareg::continuum_det_massive(&q, m, l)?;
    if let Some(s) = slope {
        table.footer(format!("loglog_slope={}", num(s)));
    }
    let [cr, ci] = complex_row(cont.continuum);
    table.footer(format!("continuum={cr},{ci}"));
    if let Some(r) = cont.phase_ratio {
        table.footer(format!("phase_ratio={},{} modulus={}", num(r.re), num(r.im), num(r.norm())));
    }
    let json = json!({
        "limit_re": limit.re, "limit_im": limit.im,
        "rows": rows,
        "loglog_slope": slope,
        "continuum_re": cont.continuum.re, "continuum_im": cont.continuum.im,
        "phase_ratio_re": cont.phase_ratio.map(|r| r.re),
        "phase_ratio_im": cont.phase_ratio.map(|r| r.im),
    });
    Ok(Artifact { table, json, default_format: Format::Csv })
}

pub fn cmd_cutoff(cfg: &ExperimentConfig) -> Result<Artifact> {
    let a = need(cfg.a, "a")?;
    let l = positive(need(cfg.l, "l")?, "l")?;
    let grid = cfg.cutoffs.ok_or_else(|| validation("missing cutoff grid"))?;
    if !(grid.c_min > std::f64::consts::TAU / l && grid.c_max > grid.c_min && grid.points >= 4) {
        return Err(validation("cutoff grid needs 2π/l < c_min < c_max and at least 4 points"));
    }
    let cutoffs = spectral::log_grid(grid.c_min, grid.c_max, grid.points);
    let report = spectral::cutoff_report(a, l, &cutoffs, CutoffScheme::Sharp)?;
    let json = json!({
        "c": report.cutoffs, "logdet": report.log_dets, "residual": report.remainders,
        "counterterm": report.counterterms,
        "kappa": report.kappa, "beta": report.beta, "gamma": report.gamma, "delta": report.delta,
        "expected_kappa": l / std::f64::consts::PI,
    });
    Ok(Artifact { table: report.to_csv(), json, default_format: Format::Csv })
}

pub fn cmd_haar(cfg: &ExperimentConfig) -> Result<Artifact> {
    let n = need(cfg.n, "n")?;
    let samples = need(cfg.samples, "samples")?;
    if n == 0 || samples == 0 {
        return Err(validation("n and samples must be positive"));
    }
    let (method, est, tt) = if n == 1 {
        let projector = statesum::haar_projector_check(U1_QUADRATURE_NODES, 0.7)?;
        ("quadrature", statesum::haar_average_u1_quadrature(U1_QUADRATURE_NODES), Some(projector.tt_deviation))
    } else {
        let seed = cfg.seed.ok_or_else(|| validation("--seed is required for Monte Carlo averages (n ≥ 2)"))?;
        ("monte_carlo", statesum::haar_average_circle(n, samples, seed)?, None)
    };
    let mut table = CsvTable::new(&["method", "samples", "mean_re", "mean_im", "std_error_re", "std_error_im"]);
    table.row(vec![
        method.into(),
        est.samples.to_string(),
        num(est.mean_re),
        num(est.mean_im),
        num(est.std_error_re),
        num(est.std_error_im),
    ]);
    table.footer(format!("nearest_integer={}", est.nearest_integer()));
    if let Some(d) = tt {
        table.footer(format!("tt_deviation={}", num(d)));
    }
    let json = json!({
        "method": method, "samples": est.samples,
        "mean_re": est.mean_re, "mean_im": est.mean_im,
        "std_error_re": est.std_error_re, "std_error_im": est.std_error_im,
        "nearest_integer": est.nearest_integer(), "tt_deviation": tt,
    });
    Ok(Artifact { table, json, default_format: Format::Json })
}

const ZETA_COLUMNS: [&str; 12] = [
    "a",
    "l",
    "eta0",
    "zeta0",
    "zetaprime0",
    "det_iD_re",
    "det_iD_im",
    "det_D_plus_re",
    "det_D_plus_im",
    "det_D_minus_re",
    "det_D_minus_im",
    "zero_mode",
];

fn zeta_row(v: &Value) -> Vec<String> {
    ZETA_COLUMNS
        .iter()
        .map(|k| match &v[*k] {
            Value::Null => String::new(),
            Value::Bool(b) => b.to_string(),
            other => num(other.as_f64().unwrap_or(f64::NAN)),
        })
        .collect()
}

pub fn cmd_zeta(cfg: &ExperimentConfig) -> Result<Artifact> {
    let l = positive(need(cfg.l, "l")?, "l")?;
    let allow = cfg.allow_zero_mode.unwrap_or(false);
    let zero_mode_error = || validation("the connection has a zero mode (a = 0); pass --allow-zero-mode to report det = 0");
    let mut table = CsvTable::new(&ZETA_COLUMNS);
    if let Some(spec) = &cfg.holonomy {
        let q = spec.holonomy()?;
        let phases = linalg::eig_unitary(&q)?;
        let mut records = Vec::new();
        for theta in phases {
            let r = zetareg::continuum_regularised_det(&U1Connection::from_holonomy(theta, l)?);
            if r.zero_mode && !allow {
                return Err(zero_mode_error());
            }
            let v = r.to_json();
            table.row(zeta_row(&v));
            records.push(v);
        }
        let det = zetareg::continuum_det_un(&q, l)?;
        let closed = linalg::det(&(ComplexMatrix::identity(q.nrows(), q.nrows()) - &q))?;
        table.footer(format!("det_iD={},{} det_I_minus_Q={},{}", num(det.re), num(det.im), num(closed.re), num(closed.im)));
        let json = json!({
            "eigenphases": records,
            "det_iD_re": det.re, "det_iD_im": det.im,
            "det_I_minus_Q_re": closed.re, "det_I_minus_Q_im": closed.im,
        });
        return Ok(Artifact { table, json, default_format: Format::Json });
    }
    let conn = match (cfg.a, cfg.theta) {
        (Some(a), _) => U1Connection::new(a, l).map_err(|e| validation(e.to_string()))?,
        (None, Some(theta)) => U1Connection::from_holonomy(theta, l)?,
        (None, None) => return Err(validation("need --a, --theta or a holonomy spec")),
    };
    if conn.has_zero_mode() && !allow {
        return Err(zero_mode_error());
    }
    let v = zetareg::continuum_regularised_det(&conn).to_json();
    table.row(zeta_row(&v));
    Ok(Artifact { table, json: v, default_format: Format::Json })
}

/// Runs the suites and returns `(all passed, artifact)`.
pub fn cmd_verify(suites: &[Suite], opts: &VerifyOptions) -> (bool, Artifact, Vec<SuiteReport>) {
    let selected: Vec<Suite> = if suites.is_empty() { Suite::ALL.to_vec() } else { suites.to_vec() };
    let reports: Vec<SuiteReport> = selected.iter().map(|&s| run_suite(s, opts)).collect();
    let passed = reports.iter().all(|r| r.passed);
    let mut table = CsvTable::new(&["suite", "check", "value", "tolerance", "passed"]);
    for r in &reports {
        for c in &r.checks {
            table.row(vec![r.suite.name().into(), c.name.clone(), num(c.value), num(c.tolerance), c.passed.to_string()]);
        }
        if let Some(e) = &r.error {
            table.row(vec![r.suite.name().into(), "error".into(), String::new(), String::new(), format!("false: {e}")]);
        }
    }
    let json = json!({ "passed": passed, "suites": reports });
    (passed, Artifact { table, json, default_format: Format::Json }, reports)
}

fn overrides(p: &Params, cli: &Cli) -> Result<ExperimentConfig> {
    let holonomy = p.holonomy.as_deref().map(HolonomySpec::parse).transpose()?;
    Ok(ExperimentConfig {
        command: None,
        holonomy,
        theta: p.theta,
        edges: p.edges,
        n: p.n,
        l: p.l,
        m: p.m,
        a: p.a,
        k_max: p.k_max,
        cutoffs: None,
        n_sweep: p.n_sweep.clone(),
        samples: p.samples,
        seed: cli.seed,
        symbolic: p.symbolic.then_some(true),
        allow_zero_mode: p.allow_zero_mode.then_some(true),
        out: cli.out.clone(),
        format: cli.format,
    })
}

fn resolve(cli: &Cli, name: &str, p: &Params) -> Result<ExperimentConfig> {
    let base = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(cmd) = &base.command {
        if cmd != name {
            return Err(validation(format!("config file is for `{cmd}`, not `{name}`")));
        }
    }
    let mut cfg = base.merge(overrides(p, cli)?).with_defaults(name);
    if let Some(grid) = cfg.cutoffs.as_mut() {
        grid.c_min = p.c_min.unwrap_or(grid.c_min);
        grid.c_max = p.c_max.unwrap_or(grid.c_max);
        grid.points = p.points.unwrap_or(grid.points);
    }
    Ok(cfg)
}

fn emit(cfg: &ExperimentConfig, artifact: &Artifact, stdout: &mut dyn Write) -> Result<()> {
    let text = artifact.render(cfg);
    let io = |e: std::io::Error| validation(format!("cannot write output: {e}"));
    match &cfg.out {
        Some(path) => fs::write(path, text).map_err(io),
        None => stdout.write_all(text.as_bytes()).map_err(io),
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Capacity { .. } => EXIT_CAPACITY,
        _ => EXIT_USAGE,
    }
}

fn report_error(e: &Error, stderr: &mut dyn Write) -> i32 {
    let _ = writeln!(stderr, "error: {e}");
    if let Error::Capacity { limit, .. } = e {
        let _ = writeln!(
            stderr,
            "usage: symbolic evaluation needs 2·n·N ≤ {limit} generators; reduce n or N, or drop --symbolic to use the closed form"
        );
    }
    exit_code(e)
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Verify(args) => {
            let opts = VerifyOptions {
                convention: match args.berezin_convention {
                    ConventionArg::Leftmost => IntegrationConvention::Leftmost,
                    ConventionArg::Rightmost => IntegrationConvention::Rightmost,
                },
            };
            let cfg = ExperimentConfig {
                command: Some("verify".into()),
                out: cli.out.clone(),
                format: cli.format,
                ..Default::default()
            };
            let (passed, artifact, reports) = cmd_verify(&args.suite, &opts);
            for r in &reports {
                let status = if r.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(stderr, "{status} {}", r.suite.name());
                for c in r.failures() {
                    let _ = writeln!(stderr, "  failing invariant `{}`: {:e} > {:e}", c.name, c.value, c.tolerance);
                }
                if let Some(e) = &r.error {
                    let _ = writeln!(stderr, "  error: {e}");
                }
            }
            emit(&cfg, &artifact, stdout).map(|_| if passed { EXIT_OK } else { EXIT_SUITE_FAILED })
        }
        Command::Circle(p) => run_experiment(&cli, "circle", p, cmd_circle, stdout),
        Command::Spectrum(p) => run_experiment(&cli, "spectrum", p, cmd_spectrum, stdout),
        Command::Mass(p) => run_experiment(&cli, "mass", p, cmd_mass, stdout),
        Command::Cutoff(p) => run_experiment(&cli, "cutoff", p, cmd_cutoff, stdout),
        Command::Haar(p) => run_experiment(&cli, "haar", p, cmd_haar, stdout),
        Command::Zeta(p) => run_experiment(&cli, "zeta", p, cmd_zeta, stdout),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => report_error(&e, stderr),
    }
}

fn run_experiment(
    cli: &Cli,
    name: &str,
    p: &Params,
    f: fn(&ExperimentConfig) -> Result<Artifact>,
    stdout: &mut dyn Write,
) -> Result<i32> {
    let cfg = resolve(cli, name, p)?;
    let artifact = f(&cfg)?;
    emit(&cfg, &artifact, stdout)?;
    Ok(EXIT_OK)
}

/// Largest `n·N` for which `--symbolic` is accepted.
pub fn symbolic_capacity() -> usize {
    MAX_GENERATORS / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut full = vec!["statesum"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn circle_u1_pi_is_two() {
        let (code, out, _) = run_args(&["circle", "--theta", "3.141592653589793"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        for r in v["records"].as_array().unwrap() {
            assert!((r["value_re"].as_f64().unwrap() - 2.0).abs() < 1e-12);
            assert!(r["value_im"].as_f64().unwrap().abs() < 1e-12);
        }
        assert_eq!(v["records"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn symbolic_capacity_exit_code() {
        let (code, _, err) = run_args(&["circle", "--holonomy", r#"{"type":"haar","n":3,"seed":1}"#, "--N", "5", "--symbolic"]);
        assert_eq!(code, EXIT_CAPACITY, "{err}");
        assert!(err.contains("usage:"));
        assert_eq!(symbolic_capacity(), 12);
    }

    #[test]
    fn zeta_half() {
        let (code, out, _) = run_args(&["zeta", "--a", "0.5"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!((v["det_iD_re"].as_f64().unwrap() - 2.0).abs() < 1e-12);
        assert!(v["det_iD_im"].as_f64().unwrap().abs() < 1e-12);
    }

    #[test]
    fn zero_mode_needs_flag() {
        assert_eq!(run_args(&["zeta", "--a", "0"]).0, EXIT_USAGE);
        let (code, out, _) = run_args(&["zeta", "--a", "0", "--allow-zero-mode"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"zero_mode\": true"));
    }

    #[test]
    fn spectrum_k_max_validation() {
        let (code, _, err) = run_args(&["spectrum", "--N", "8", "--k-max", "8"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("k_max"));
    }

    #[test]
    fn haar_requires_seed_for_monte_carlo() {
        assert_eq!(run_args(&["haar", "--n", "2", "--samples", "100"]).0, EXIT_USAGE);
        let (code, out, _) = run_args(&["haar"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["mean_re"].as_f64(), Some(1.0));
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        assert_eq!(run_args(&["circle", "--bogus"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn csv_has_config_echo_and_header() {
        let (code, out, _) = run_args(&["spectrum", "--N", "16", "--k-max", "2", "--theta", "1"]);
        assert_eq!(code, 0);
        let mut lines = out.lines();
        assert!(lines.next().unwrap().starts_with("# config: {\"command\":\"spectrum\""));
        assert_eq!(lines.next().unwrap(), "k,re_disc,im_disc,re_cont,im_cont,abs_dev");
        assert!(!out.contains('\r'));
        assert!(out.lines().last().unwrap().starts_with("# "));
    }
}
