//! Command-line surface: `sample`, `fit`, `stability-grid`, `high-dim-table`,
//! `error-study`, and `verify`.
//!
//! Every subcommand takes its parameters from a JSON config document
//! (`--config`) or a named preset (`--preset`), with `--seed` overriding the
//! document's master seed. Each run writes its data file plus a provenance
//! sidecar `<out>.provenance.json` holding the fully resolved config, seed,
//! and tool version; pointing `--config` back at a sidecar reproduces the
//! data file byte for byte.
//!
//! Exit codes: 0 on success, 1 when `verify` finds a failing check, 2 on
//! configuration or I/O errors.

use crate::basis::BasisFamily;
use crate::experiments::{self, Method};
use crate::index_set::SequenceStrategy;
use crate::lsq::{self, ErrorMethod, SolverPath, Variant};
use crate::measure::ApproximationSpace;
use crate::noise::{self, NoiseModel, Stochastic};
use crate::sampler::{sample_standard, Kernel, Sampler, WeightedSample};
use crate::targets::Target;
use crate::{Error, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Tool version recorded in output headers and provenance sidecars.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(
    name = "owls",
    version,
    about = "Optimal weighted least-squares sampling, fitting, and experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a weighted sample and write it as CSV (columns x_1..x_d, w).
    Sample {
        #[command(flatten)]
        common: Common,
        /// Also dump the sampling density on a grid: (t, μ_m(t)) for d = 1,
        /// the first-coordinate marginal ψ_1 for d > 1.
        #[arg(long)]
        density_out: Option<PathBuf>,
    },
    /// Draw, observe a registry target, fit, and report JSON diagnostics.
    Fit {
        #[command(flatten)]
        common: Common,
    },
    /// Empirical Pr{cond(G) ≤ 3} over an (m, n) grid, as CSV.
    #[command(name = "stability-grid")]
    StabilityGrid {
        #[command(flatten)]
        common: Common,
    },
    /// Stability cells across dimensions, families, and methods, as CSV.
    #[command(name = "high-dim-table")]
    HighDimTable {
        #[command(flatten)]
        common: Common,
    },
    /// Fit-error statistics versus the best-approximation benchmark, as CSV.
    #[command(name = "error-study")]
    ErrorStudy {
        #[command(flatten)]
        common: Common,
    },
    /// Run the invariant verification suite; exit 1 if any check fails.
    Verify {
        /// Optional CSV destination for the per-check results.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Flags shared by every data-producing subcommand.
#[derive(Args)]
struct Common {
    /// Path to a JSON config document (or a provenance sidecar from an
    /// earlier run of the same subcommand).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Name of a built-in config preset.
    #[arg(long)]
    preset: Option<String>,
    /// Master seed, overriding the config document's `seed` field.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path (default: `<subcommand>.csv`, or `fit.json` for fit).
    #[arg(long)]
    out: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Subcommand configs
// ---------------------------------------------------------------------------

fn default_dimension() -> usize {
    1
}

fn default_strategy() -> SequenceStrategy {
    SequenceStrategy::TotalDegreeLex
}

fn default_method() -> Method {
    Method::Weighted
}

fn default_kernel() -> Kernel {
    Kernel::Auto
}

fn default_variant() -> Variant {
    Variant::Plain
}

fn default_stochastic() -> Stochastic {
    Stochastic::None
}

fn default_error_nodes() -> usize {
    64
}

fn default_error_mc() -> usize {
    20_000
}

/// Config of the `sample` subcommand.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleConfig {
    pub family: BasisFamily,
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    #[serde(default = "default_strategy")]
    pub strategy: SequenceStrategy,
    #[serde(default)]
    pub strategy_seed: u64,
    pub m: usize,
    pub n: usize,
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default = "default_kernel")]
    pub kernel: Kernel,
    #[serde(default)]
    pub seed: u64,
}

/// Config of the `fit` subcommand.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitConfig {
    pub family: BasisFamily,
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    #[serde(default = "default_strategy")]
    pub strategy: SequenceStrategy,
    #[serde(default)]
    pub strategy_seed: u64,
    pub m: usize,
    pub n: usize,
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default = "default_kernel")]
    pub kernel: Kernel,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_variant")]
    pub variant: Variant,
    /// Registry target: "zero", "exp", "runge", or "inVm:c0,c1,…".
    pub target: Target,
    #[serde(default = "default_stochastic")]
    pub noise: Stochastic,
    /// Per-coordinate Gauss nodes for the error quadrature (d ≤ 6).
    #[serde(default = "default_error_nodes")]
    pub error_nodes: usize,
    /// Monte Carlo sample size for the error when d > 6.
    #[serde(default = "default_error_mc")]
    pub error_mc: usize,
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

/// Built-in configs, keyed by (subcommand, preset name). Together they cover
/// every acceptance scenario: sampler law checks, the condition-number
/// tables at n = 26559 / m = 200, stability grids, the near-optimality error
/// study, and the noise-scaling study.
const PRESETS: &[(&str, &str, &str)] = &[
    (
        "sample",
        "its-law",
        r#"{"family":"legendre_uniform","m":2,"n":100000,"kernel":"inverse_transform","seed":314}"#,
    ),
    (
        "sample",
        "rs-its-agreement",
        r#"{"family":"legendre_uniform","m":2,"n":100000,"kernel":"rejection_bounded","seed":315}"#,
    ),
    (
        "sample",
        "sequential-marginal",
        r#"{"family":"legendre_uniform","dimension":2,"m":3,"n":100000,"seed":41}"#,
    ),
    (
        "sample",
        "unit-weights",
        r#"{"family":"chebyshev_arcsine","m":1,"n":1000,"seed":7}"#,
    ),
    (
        "fit",
        "exact-reproduction",
        r#"{"family":"legendre_uniform","dimension":2,"m":6,"n":120,"target":"inVm:0.5,-1.25,0.75,2.0,-0.3,1.1","seed":9}"#,
    ),
    (
        "fit",
        "exp-minimal-budget",
        r#"{"family":"legendre_uniform","m":8,"n":681,"target":"exp","seed":1}"#,
    ),
    (
        "stability-grid",
        "grid-weighted-uniform",
        r#"{"family":"legendre_uniform","method":"weighted","ms":[5,10,20,40],"ns":[150,400,1600,6400],"repetitions":100,"seed":2026}"#,
    ),
    (
        "stability-grid",
        "grid-weighted-chebyshev",
        r#"{"family":"chebyshev_arcsine","method":"weighted","ms":[5,10,20,40],"ns":[150,400,1600,6400],"repetitions":100,"seed":2026}"#,
    ),
    (
        "stability-grid",
        "grid-weighted-gaussian",
        r#"{"family":"hermite_gaussian","method":"weighted","ms":[5,10,20,40],"ns":[150,400,1600,6400],"repetitions":100,"seed":2026}"#,
    ),
    (
        "stability-grid",
        "grid-standard-uniform",
        r#"{"family":"legendre_uniform","method":"standard","ms":[4,6,8,10],"ns":[200,600,1800,5400],"repetitions":100,"seed":2027}"#,
    ),
    // The full 6 × 3 × 2 condition-number table at n = 26559, m = 200.
    // Dimensions ≥ 50 run 25 repetitions instead of 100 (a desk-scale
    // concession; quoted probabilities there carry wider binomial bands).
    (
        "high-dim-table",
        "full-table",
        r#"{"dimensions":[1,2,5,10,50,100],"families":["legendre_uniform","hermite_gaussian","chebyshev_arcsine"],"methods":["weighted","standard"],"n":26559,"m":200,"repetitions":100,"high_dim_repetitions":25,"seed":26559}"#,
    ),
    (
        "high-dim-table",
        "table-weighted-d1-d10",
        r#"{"dimensions":[1,10],"families":["legendre_uniform","hermite_gaussian","chebyshev_arcsine"],"methods":["weighted"],"n":26559,"m":200,"repetitions":100,"seed":26559}"#,
    ),
    (
        "high-dim-table",
        "table-standard-gaussian-d1",
        r#"{"dimensions":[1],"families":["hermite_gaussian"],"methods":["standard"],"n":26559,"m":200,"repetitions":100,"seed":26559}"#,
    ),
    (
        "high-dim-table",
        "smoke",
        r#"{"dimensions":[1,2],"families":["legendre_uniform"],"methods":["weighted","standard"],"n":60,"m":4,"repetitions":5,"seed":3}"#,
    ),
    (
        "error-study",
        "exp-near-optimality",
        r#"{"family":"legendre_uniform","target":"exp","ms":[2,3,4,5,6,7,8],"r":1.0,"repetitions":100,"seed":10}"#,
    ),
    (
        "error-study",
        "noise-sigma-01",
        r#"{"family":"legendre_uniform","target":"zero","ms":[5],"repetitions":100,"seed":900,"noise":{"kind":"gaussian","sigma":0.1}}"#,
    ),
    (
        "error-study",
        "noise-sigma-02",
        r#"{"family":"legendre_uniform","target":"zero","ms":[5],"repetitions":100,"seed":900,"noise":{"kind":"gaussian","sigma":0.2}}"#,
    ),
    (
        "error-study",
        "noise-sigma-04",
        r#"{"family":"legendre_uniform","target":"zero","ms":[5],"repetitions":100,"seed":900,"noise":{"kind":"gaussian","sigma":0.4}}"#,
    ),
];

/// The JSON document of a named preset, if it exists for this subcommand.
pub fn preset_json(subcommand: &str, name: &str) -> Option<&'static str> {
    PRESETS
        .iter()
        .find(|(s, n, _)| *s == subcommand && *n == name)
        .map(|(_, _, json)| *json)
}

/// Preset names available for a subcommand.
pub fn preset_names(subcommand: &str) -> Vec<&'static str> {
    PRESETS
        .iter()
        .filter(|(s, _, _)| *s == subcommand)
        .map(|(_, n, _)| *n)
        .collect()
}

// ---------------------------------------------------------------------------
// Config resolution and provenance
// ---------------------------------------------------------------------------

/// Provenance sidecar written next to every data file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub seed: u64,
    pub config: serde_json::Value,
}

/// Resolve the config document for `subcommand` from preset/config flags,
/// apply a `--seed` override, and return the typed config together with the
/// fully resolved JSON recorded in the sidecar.
fn resolve_config<T: Serialize + serde::de::DeserializeOwned>(
    subcommand: &str,
    common: &Common,
) -> Result<(T, serde_json::Value, u64)> {
    let mut doc: serde_json::Value = match (&common.config, &common.preset) {
        (Some(_), Some(_)) => {
            return Err(Error::config("pass either --config or --preset, not both"));
        }
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
            let value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| Error::config(format!("{} is not valid JSON: {e}", path.display())))?;
            unwrap_sidecar(subcommand, value)?
        }
        (None, Some(name)) => {
            let json = preset_json(subcommand, name).ok_or_else(|| {
                Error::config(format!(
                    "unknown preset '{name}' for {subcommand}; available: {}",
                    preset_names(subcommand).join(", ")
                ))
            })?;
            serde_json::from_str(json).expect("presets are valid JSON")
        }
        (None, None) => {
            return Err(Error::config(format!(
                "{subcommand} needs --config <path> or --preset <name>; presets: {}",
                preset_names(subcommand).join(", ")
            )));
        }
    };
    if let Some(seed) = common.seed {
        doc.as_object_mut()
            .ok_or_else(|| Error::config("config document must be a JSON object"))?
            .insert("seed".into(), serde_json::Value::from(seed));
    }
    let cfg: T = serde_json::from_value(doc)
        .map_err(|e| Error::config(format!("invalid {subcommand} config: {e}")))?;
    // Round-trip through the typed config so the sidecar records every
    // field with defaults filled in.
    let resolved = serde_json::to_value(&cfg).expect("configs serialize");
    let seed = resolved.get("seed").and_then(|v| v.as_u64()).unwrap_or(0);
    Ok((cfg, resolved, seed))
}

/// Accept a provenance sidecar wherever a config is expected: checks the
/// subcommand matches and unwraps the embedded config.
fn unwrap_sidecar(subcommand: &str, value: serde_json::Value) -> Result<serde_json::Value> {
    let looks_like_sidecar = value.get("tool").and_then(|t| t.as_str()) == Some("owls")
        && value.get("config").is_some()
        && value.get("subcommand").is_some();
    if !looks_like_sidecar {
        return Ok(value);
    }
    let provenance: Provenance = serde_json::from_value(value)
        .map_err(|e| Error::config(format!("malformed provenance sidecar: {e}")))?;
    if provenance.subcommand != subcommand {
        return Err(Error::config(format!(
            "sidecar records a '{}' run, but this is '{subcommand}'",
            provenance.subcommand
        )));
    }
    Ok(provenance.config)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| Error::config(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    std::fs::write(path, bytes)
        .map_err(|e| Error::config(format!("cannot write {}: {e}", path.display())))
}

fn write_sidecar(
    out: &Path,
    subcommand: &str,
    seed: u64,
    config: serde_json::Value,
) -> Result<PathBuf> {
    let provenance = Provenance {
        tool: "owls".into(),
        version: VERSION.into(),
        subcommand: subcommand.into(),
        seed,
        config,
    };
    let mut text = serde_json::to_string_pretty(&provenance).expect("provenance serializes");
    text.push('\n');
    let path = sidecar_path(out);
    write_file(&path, text.as_bytes())?;
    Ok(path)
}

/// `<out>.provenance.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".provenance.json");
    PathBuf::from(name)
}

/// Shortest round-trip decimal for a float (the JSON number form), so CSV
/// files are byte-stable and parse back to the exact value.
fn fnum(v: f64) -> String {
    serde_json::to_string(&v).unwrap_or_else(|_| "null".into())
}

fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

/// Parse `argv` and run. Returns the process exit code: 0 success,
/// 1 failed verification, 2 config/usage errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                0
            } else {
                2
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Sample {
            common,
            density_out,
        } => {
            cmd_sample(&common, density_out.as_deref())?;
            Ok(0)
        }
        Command::Fit { common } => {
            cmd_fit(&common)?;
            Ok(0)
        }
        Command::StabilityGrid { common } => {
            cmd_stability_grid(&common)?;
            Ok(0)
        }
        Command::HighDimTable { common } => {
            cmd_high_dim_table(&common)?;
            Ok(0)
        }
        Command::ErrorStudy { common } => {
            cmd_error_study(&common)?;
            Ok(0)
        }
        Command::Verify { out } => cmd_verify(out.as_deref()),
    }
}

fn out_path(common: &Common, default: &str) -> PathBuf {
    common.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

// ---------------------------------------------------------------------------
// sample
// ---------------------------------------------------------------------------

fn cmd_sample(common: &Common, density_out: Option<&Path>) -> Result<()> {
    let (cfg, resolved, seed) = resolve_config::<SampleConfig>("sample", common)?;
    let space = experiments::sequence_space(
        cfg.family,
        cfg.dimension,
        cfg.strategy,
        cfg.strategy_seed,
        cfg.m,
    )?;
    let sample = match cfg.method {
        Method::Weighted => Sampler::new(&space, cfg.kernel)?.draw(cfg.n, cfg.seed)?,
        Method::Standard => sample_standard(&space, cfg.n, cfg.seed),
    };
    let out = out_path(common, "sample.csv");
    write_file(&out, sample_csv(&cfg, &space, &sample).as_bytes())?;
    let sidecar = write_sidecar(&out, "sample", seed, resolved)?;
    println!(
        "wrote {} points to {} (+ {})",
        sample.len(),
        out.display(),
        sidecar.display()
    );
    if let Some(density_path) = density_out {
        write_file(density_path, density_csv(&cfg, &space)?.as_bytes())?;
        println!("wrote density grid to {}", density_path.display());
    }
    Ok(())
}

fn sample_csv(cfg: &SampleConfig, space: &ApproximationSpace, sample: &WeightedSample) -> String {
    let mut csv = String::new();
    let _ = writeln!(csv, "# owls sample v{VERSION}");
    let kernel = match sample.meta.kernel {
        Some(k) => serde_json::to_value(k)
            .unwrap()
            .as_str()
            .unwrap()
            .to_string(),
        None => "-".to_string(),
    };
    let _ = writeln!(
        csv,
        "# seed={} method={} kernel={} family={} d={} m={} n={} fingerprint={:#018x}",
        sample.meta.seed,
        cfg.method,
        kernel,
        cfg.family.name(),
        sample.dim,
        space.size(),
        sample.len(),
        sample.meta.space_fingerprint,
    );
    for q in 1..=sample.dim {
        let _ = write!(csv, "x_{q},");
    }
    csv.push_str("w\n");
    for (point, w) in sample.points.iter().zip(&sample.weights) {
        for x in point {
            let _ = write!(csv, "{},", fnum(*x));
        }
        let _ = writeln!(csv, "{}", fnum(*w));
    }
    csv
}

/// Density dump on a 512-point open grid over the first coordinate's
/// working support: μ_m itself for d = 1, the marginal ψ_1 for d > 1.
fn density_csv(cfg: &SampleConfig, space: &ApproximationSpace) -> Result<String> {
    let mixture = space.conditional_mixture(0, &[])?;
    let degree = space.degree_profile()[0];
    let (lo, hi) = cfg.family.working_support(degree);
    let meaning = if space.dim() == 1 {
        "mu_m"
    } else {
        "psi_1 (first-coordinate marginal)"
    };
    let mut csv = String::new();
    let _ = writeln!(csv, "# owls density v{VERSION}");
    let _ = writeln!(
        csv,
        "# family={} d={} m={} column density = {meaning}",
        cfg.family.name(),
        space.dim(),
        space.size(),
    );
    csv.push_str("t,density\n");
    let cells = 512;
    for i in 0..cells {
        let t = lo + (i as f64 + 0.5) * (hi - lo) / cells as f64;
        let _ = writeln!(csv, "{},{}", fnum(t), fnum(mixture.density(t)?));
    }
    Ok(csv)
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct FitErrors {
    l2: f64,
    best_l2: f64,
}

#[derive(Serialize)]
struct FitReport<'a> {
    family: &'a str,
    dimension: usize,
    m: usize,
    n: usize,
    method: Method,
    variant: &'a Variant,
    target: String,
    seed: u64,
    solver: SolverPath,
    zeroed: bool,
    dist_identity: f64,
    cond: f64,
    cond_capped: bool,
    coefficients: &'a [f64],
    errors: FitErrors,
}

fn cmd_fit(common: &Common) -> Result<()> {
    let (cfg, resolved, seed) = resolve_config::<FitConfig>("fit", common)?;
    let space = experiments::sequence_space(
        cfg.family,
        cfg.dimension,
        cfg.strategy,
        cfg.strategy_seed,
        cfg.m,
    )?;
    let sample = match cfg.method {
        Method::Weighted => Sampler::new(&space, cfg.kernel)?.draw(cfg.n, cfg.seed)?,
        Method::Standard => sample_standard(&space, cfg.n, cfg.seed),
    };
    let model = NoiseModel {
        bias: Target::Zero,
        stochastic: cfg.noise,
        bound: cfg.noise.amplitude(),
    };
    let y = noise::observe(&space, &cfg.target, &sample, &model, cfg.seed)?;
    let fit = lsq::fit(&space, &sample, &y, cfg.variant)?;
    let method = if cfg.dimension <= 6 {
        ErrorMethod::TensorQuadrature {
            nodes: cfg.error_nodes,
        }
    } else {
        ErrorMethod::MonteCarlo {
            n: cfg.error_mc,
            seed: cfg.seed ^ 0x6d63,
        }
    };
    let truth = |x: &[f64]| {
        cfg.target
            .eval(&space, x)
            .expect("target evaluable on the domain")
    };
    let l2 = lsq::l2_error(&space, &fit, truth, method)?;
    let best_l2 = lsq::best_approx_error(&space, truth, method)?;
    let report = FitReport {
        family: cfg.family.name(),
        dimension: cfg.dimension,
        m: space.size(),
        n: sample.len(),
        method: cfg.method,
        variant: &fit.variant,
        target: cfg.target.name(),
        seed: cfg.seed,
        solver: fit.solver,
        zeroed: fit.zeroed,
        dist_identity: fit.spectral.dist_identity,
        cond: fit.spectral.cond,
        cond_capped: fit.spectral.cond_capped,
        coefficients: &fit.coefficients,
        errors: FitErrors { l2, best_l2 },
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    let out = out_path(common, "fit.json");
    write_file(&out, text.as_bytes())?;
    let sidecar = write_sidecar(&out, "fit", seed, resolved)?;
    println!(
        "fit m={} n={} cond={} l2={} -> {} (+ {})",
        report.m,
        report.n,
        fnum(report.cond),
        fnum(l2),
        out.display(),
        sidecar.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// stability-grid / high-dim-table / error-study
// ---------------------------------------------------------------------------

const CELL_COLUMNS: &str =
    "m,n,repetitions,successes,empirical_probability,mean_cond,median_cond,capped,exceed_half,mean_dist";

fn push_cell_fields(csv: &mut String, cell: &experiments::StabilityCell) {
    let _ = write!(
        csv,
        "{},{},{},{},{},{},{},{},{},{}",
        cell.m,
        cell.n,
        cell.repetitions,
        cell.successes,
        fnum(cell.empirical_probability),
        fnum(cell.mean_cond),
        fnum(cell.median_cond),
        cell.capped,
        cell.exceed_half,
        fnum(cell.mean_dist),
    );
}

fn cmd_stability_grid(common: &Common) -> Result<()> {
    let (cfg, resolved, seed) =
        resolve_config::<experiments::GridConfig>("stability-grid", common)?;
    let cells = experiments::stability_grid(&cfg)?;
    let mut csv = String::new();
    let _ = writeln!(csv, "# owls stability-grid v{VERSION}");
    let _ = writeln!(
        csv,
        "# family={} method={} d={} repetitions={} seed={}",
        cfg.family.name(),
        cfg.method,
        cfg.dimension,
        cfg.repetitions,
        cfg.seed,
    );
    let _ = writeln!(csv, "{CELL_COLUMNS}");
    for cell in &cells {
        push_cell_fields(&mut csv, cell);
        csv.push('\n');
    }
    let out = out_path(common, "stability-grid.csv");
    write_file(&out, csv.as_bytes())?;
    let sidecar = write_sidecar(&out, "stability-grid", seed, resolved)?;
    println!(
        "wrote {} cells to {} (+ {})",
        cells.len(),
        out.display(),
        sidecar.display()
    );
    Ok(())
}

fn cmd_high_dim_table(common: &Common) -> Result<()> {
    let (cfg, resolved, seed) =
        resolve_config::<experiments::TableConfig>("high-dim-table", common)?;
    let rows = experiments::high_dim_table(&cfg)?;
    let mut csv = String::new();
    let _ = writeln!(csv, "# owls high-dim-table v{VERSION}");
    let _ = writeln!(csv, "# n={} m={} seed={}", cfg.n, cfg.m, cfg.seed);
    let _ = writeln!(csv, "method,family,dimension,{CELL_COLUMNS}");
    for row in &rows {
        let _ = write!(
            csv,
            "{},{},{},",
            row.method,
            row.family.name(),
            row.dimension
        );
        push_cell_fields(&mut csv, &row.cell);
        csv.push('\n');
    }
    let out = out_path(common, "high-dim-table.csv");
    write_file(&out, csv.as_bytes())?;
    let sidecar = write_sidecar(&out, "high-dim-table", seed, resolved)?;
    println!(
        "wrote {} rows to {} (+ {})",
        rows.len(),
        out.display(),
        sidecar.display()
    );
    Ok(())
}

fn cmd_error_study(common: &Common) -> Result<()> {
    let (cfg, resolved, seed) =
        resolve_config::<experiments::ErrorStudyConfig>("error-study", common)?;
    let rows = experiments::error_study(&cfg)?;
    let mut csv = String::new();
    let _ = writeln!(csv, "# owls error-study v{VERSION}");
    let _ = writeln!(
        csv,
        "# family={} d={} target={} variant={} r={} repetitions={} seed={}",
        cfg.family.name(),
        cfg.dimension,
        cfg.target.name(),
        serde_json::to_value(cfg.variant).unwrap()["kind"]
            .as_str()
            .unwrap(),
        fnum(cfg.r),
        cfg.repetitions,
        cfg.seed,
    );
    let _ = writeln!(
        csv,
        "m,n,repetitions,mean_error,median_error,p95_error,max_error,mean_square_error,best_l2"
    );
    for row in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            row.m,
            row.n,
            row.repetitions,
            fnum(row.mean_error),
            fnum(row.median_error),
            fnum(row.p95_error),
            fnum(row.max_error),
            fnum(row.mean_square_error),
            fnum(row.best_l2),
        );
    }
    let out = out_path(common, "error-study.csv");
    write_file(&out, csv.as_bytes())?;
    let sidecar = write_sidecar(&out, "error-study", seed, resolved)?;
    println!(
        "wrote {} rows to {} (+ {})",
        rows.len(),
        out.display(),
        sidecar.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(out: Option<&Path>) -> Result<i32> {
    let checks = experiments::run_verification();
    for check in &checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!("{status} {} — {}", check.name, check.detail);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if let Some(path) = out {
        let mut csv = String::new();
        let _ = writeln!(csv, "# owls verify v{VERSION}");
        csv.push_str("name,passed,detail\n");
        for check in &checks {
            let _ = writeln!(
                csv,
                "{},{},{}",
                check.name,
                check.passed,
                csv_quote(&check.detail)
            );
        }
        write_file(path, csv.as_bytes())?;
        write_sidecar(path, "verify", 0, serde_json::json!({}))?;
        println!("wrote {} checks to {}", checks.len(), path.display());
    }
    if failed > 0 {
        println!("{failed}/{} checks FAILED", checks.len());
        Ok(1)
    } else {
        println!("all {} checks passed", checks.len());
        Ok(0)
    }
}
