//! Experiment harness: stability grids over (n, m), high-dimension
//! condition tables, error studies against the best-approximation
//! benchmark, the sample-budget condition rule, and a verification suite.
//!
//! Everything is deterministic from a master seed: repetition `k` of a cell
//! (n, m) derives its seed from (master, n, m, k), so cells can run in any
//! order — or alone — and reproduce bit-identically.

use crate::basis::BasisFamily;
use crate::index_set::{IndexSet, SequenceStrategy};
use crate::lsq::{self, ErrorMethod, Variant};
use crate::measure::ApproximationSpace;
use crate::noise::{self, NoiseModel, Stochastic};
use crate::rng::{tag, Stream};
use crate::sampler::{sample_standard, Kernel, Sampler};
use crate::stats;
use crate::targets::Target;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

// ---------------------------------------------------------------------------
// Sample-budget condition rule
// ---------------------------------------------------------------------------

/// κ(r) = (1 - ln 2) / (2 + 2r): the sampling-rate constant in the
/// condition m ≤ κ·n/ln n that guarantees stability with probability
/// at least 1 - 2n^{-r}.
pub fn kappa(r: f64) -> f64 {
    (1.0 - std::f64::consts::LN_2) / (2.0 + 2.0 * r)
}

/// Result of checking the sample-budget condition at (m, n, r).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    /// Whether m ≤ κ·n / ln n holds.
    pub satisfied: bool,
    pub kappa: f64,
    /// Least n ≥ 2 satisfying the condition at this (m, r).
    pub minimal_n: usize,
}

/// Check m ≤ κ(r)·n/ln n and report the minimal satisfying budget.
pub fn condition_check(m: usize, n: usize, r: f64) -> ConditionCheck {
    debug_assert!(m >= 1 && n >= 2 && r > 0.0);
    let kappa = kappa(r);
    let satisfied = m as f64 <= kappa * n as f64 / (n as f64).ln();
    ConditionCheck {
        satisfied,
        kappa,
        minimal_n: minimal_n(m, r),
    }
}

/// Least n with m ≤ κ(r)·n/ln n, by doubling plus bisection (n/ln n is
/// increasing on the relevant range: the thresholds for m ≥ 1 sit far
/// beyond its minimum at n = e).
pub fn minimal_n(m: usize, r: f64) -> usize {
    let kappa = kappa(r);
    let ok = |n: usize| m as f64 <= kappa * n as f64 / (n as f64).ln();
    let mut hi = 4usize;
    while !ok(hi) {
        hi *= 2;
    }
    let mut lo = hi / 2; // not satisfied (or the initial 2)
    if lo < 2 {
        lo = 2;
    }
    if ok(lo) {
        return lo.max(2);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// c_δ = δ + (1 - δ)·ln(1 - δ), the exponent constant of the matrix
/// Chernoff tail bound.
pub fn chernoff_exponent(delta: f64) -> f64 {
    debug_assert!(delta > 0.0 && delta < 1.0);
    delta + (1.0 - delta) * (1.0 - delta).ln()
}

/// Theoretical tail bound 2m·exp(-c_δ·n/K) for Pr{‖G - I‖₂ > δ}, where K
/// bounds the weighted Christoffel product (K = m for optimal weights).
/// n = 0 gives the vacuous bound 2m.
pub fn chernoff_reference(m: usize, n: usize, k_const: f64, delta: f64) -> f64 {
    debug_assert!(k_const >= m as f64);
    2.0 * m as f64 * (-chernoff_exponent(delta) * n as f64 / k_const).exp()
}

// ---------------------------------------------------------------------------
// Stability grids
// ---------------------------------------------------------------------------

/// Sampling scheme for an experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Draw from the optimal measure, weight by m/k_m.
    Weighted,
    /// Draw iid from the reference measure, unit weights.
    Standard,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weighted" => Ok(Method::Weighted),
            "standard" => Ok(Method::Standard),
            _ => Err(Error::config(format!(
                "unknown method '{s}' (weighted|standard)"
            ))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Weighted => "weighted",
            Method::Standard => "standard",
        })
    }
}

fn default_dimension() -> usize {
    1
}

fn default_repetitions() -> usize {
    100
}

fn default_strategy() -> SequenceStrategy {
    SequenceStrategy::TotalDegreeLex
}

fn default_kernel() -> Kernel {
    Kernel::Auto
}

fn default_r_param() -> f64 {
    1.0
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

/// Configuration of a stability grid: the cross product of `ms` and `ns`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridConfig {
    pub family: BasisFamily,
    pub method: Method,
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    #[serde(default = "default_strategy")]
    pub strategy: SequenceStrategy,
    #[serde(default)]
    pub strategy_seed: u64,
    pub ms: Vec<usize>,
    pub ns: Vec<usize>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_kernel")]
    pub kernel: Kernel,
}

impl GridConfig {
    fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::config("repetitions must be at least 1"));
        }
        if self.ms.is_empty() || self.ns.is_empty() {
            return Err(Error::config("grid needs at least one m and one n"));
        }
        if self.dimension == 0 {
            return Err(Error::config("dimension must be at least 1"));
        }
        let max_m = *self.ms.iter().max().unwrap();
        let min_n = *self.ns.iter().min().unwrap();
        if self.ms.contains(&0) {
            return Err(Error::config("every m must be at least 1"));
        }
        if min_n < max_m {
            return Err(Error::config(format!(
                "every cell needs n ≥ m, but min n = {min_n} < max m = {max_m}"
            )));
        }
        Ok(())
    }
}

/// One grid cell: R repeated draws of (sample, Gramian) at fixed (n, m).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityCell {
    pub m: usize,
    pub n: usize,
    pub repetitions: usize,
    /// Repetitions with cond(G) ≤ 3.
    pub successes: usize,
    /// successes / repetitions.
    pub empirical_probability: f64,
    /// Arithmetic mean of cond(G); capped sentinels enter as-is (see
    /// `capped`), so wildly singular cells announce themselves.
    pub mean_cond: f64,
    /// Median of cond(G) — the robust companion to the raw mean.
    pub median_cond: f64,
    /// Repetitions whose condition number hit the cap (λ_min ≤ 0).
    pub capped: usize,
    /// Repetitions with ‖G - I‖₂ > 1/2 (the Chernoff event).
    pub exceed_half: usize,
    /// Mean of ‖G - I‖₂.
    pub mean_dist: f64,
}

/// Run one (n, m) cell: repetition k uses the seed derived from
/// (master, n, m, k), so any cell reproduces independently of the rest.
pub fn run_cell(
    space: &ApproximationSpace,
    method: Method,
    kernel: Kernel,
    n: usize,
    repetitions: usize,
    master_seed: u64,
) -> Result<StabilityCell> {
    if repetitions == 0 {
        return Err(Error::config("repetitions must be at least 1"));
    }
    let m = space.size();
    if n < m {
        return Err(Error::config(format!(
            "cell needs n ≥ m, got n = {n}, m = {m}"
        )));
    }
    let sampler = match method {
        Method::Weighted => Some(Sampler::new(space, kernel)?),
        Method::Standard => None,
    };
    let mut conds = Vec::with_capacity(repetitions);
    let mut successes = 0usize;
    let mut capped = 0usize;
    let mut exceed_half = 0usize;
    let mut dist_sum = 0.0;
    for k in 0..repetitions {
        let seed = Stream::derive(&[tag::REPETITION, master_seed, n as u64, m as u64, k as u64]);
        let sample = match &sampler {
            Some(s) => s.draw(n, seed)?,
            None => sample_standard(space, n, seed),
        };
        let stats = lsq::assemble(space, &sample)?.spectral_stats();
        if stats.cond <= 3.0 {
            successes += 1;
        }
        if stats.cond_capped {
            capped += 1;
        }
        if stats.dist_identity > 0.5 {
            exceed_half += 1;
        }
        dist_sum += stats.dist_identity;
        conds.push(stats.cond);
    }
    conds.sort_by(|a, b| a.total_cmp(b));
    let r = repetitions as f64;
    let median_cond = if repetitions % 2 == 1 {
        conds[repetitions / 2]
    } else {
        0.5 * (conds[repetitions / 2 - 1] + conds[repetitions / 2])
    };
    Ok(StabilityCell {
        m,
        n,
        repetitions,
        successes,
        empirical_probability: successes as f64 / r,
        mean_cond: conds.iter().sum::<f64>() / r,
        median_cond,
        capped,
        exceed_half,
        mean_dist: dist_sum / r,
    })
}

/// The size-m prefix space of the nested downward-closed sequence — the
/// common space construction of grids, tables, studies, and the CLI.
pub fn sequence_space(
    family: BasisFamily,
    dimension: usize,
    strategy: SequenceStrategy,
    strategy_seed: u64,
    m: usize,
) -> Result<ApproximationSpace> {
    let seq = IndexSet::nested_sequence(dimension, m, strategy, strategy_seed)?;
    ApproximationSpace::isotropic(family, seq.prefix(m)?)
}

/// All cells of the grid, row-major in (m, n).
pub fn stability_grid(cfg: &GridConfig) -> Result<Vec<StabilityCell>> {
    cfg.validate()?;
    let m_max = *cfg.ms.iter().max().unwrap();
    let seq = IndexSet::nested_sequence(cfg.dimension, m_max, cfg.strategy, cfg.strategy_seed)?;
    let mut cells = Vec::with_capacity(cfg.ms.len() * cfg.ns.len());
    for &m in &cfg.ms {
        let space = ApproximationSpace::isotropic(cfg.family, seq.prefix(m)?)?;
        for &n in &cfg.ns {
            cells.push(run_cell(
                &space,
                cfg.method,
                cfg.kernel,
                n,
                cfg.repetitions,
                cfg.seed,
            )?);
        }
    }
    Ok(cells)
}

// ---------------------------------------------------------------------------
// High-dimension table
// ---------------------------------------------------------------------------

/// Configuration of the d-sweep condition table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableConfig {
    pub dimensions: Vec<usize>,
    pub families: Vec<BasisFamily>,
    pub methods: Vec<Method>,
    pub n: usize,
    pub m: usize,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    /// Optional reduced repetition count for dimensions at or above
    /// `high_dim_threshold` (sequential-sampling cost grows with d).
    #[serde(default)]
    pub high_dim_repetitions: Option<usize>,
    #[serde(default = "default_high_dim_threshold")]
    pub high_dim_threshold: usize,
    #[serde(default = "default_strategy")]
    pub strategy: SequenceStrategy,
    #[serde(default)]
    pub strategy_seed: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_kernel")]
    pub kernel: Kernel,
}

fn default_high_dim_threshold() -> usize {
    50
}

/// One table row: a stability cell tagged by (method, family, dimension).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub method: Method,
    pub family: BasisFamily,
    pub dimension: usize,
    #[serde(flatten)]
    pub cell: StabilityCell,
}

/// Rows ordered method-major, then family, then dimension.
pub fn high_dim_table(cfg: &TableConfig) -> Result<Vec<TableRow>> {
    if cfg.repetitions == 0 {
        return Err(Error::config("repetitions must be at least 1"));
    }
    if cfg.n < cfg.m || cfg.m == 0 {
        return Err(Error::config("table needs n ≥ m ≥ 1"));
    }
    if cfg.dimensions.is_empty() || cfg.families.is_empty() || cfg.methods.is_empty() {
        return Err(Error::config(
            "table needs dimensions, families, and methods",
        ));
    }
    let mut rows = Vec::new();
    for &method in &cfg.methods {
        for &family in &cfg.families {
            for &d in &cfg.dimensions {
                let reps = match cfg.high_dim_repetitions {
                    Some(r) if d >= cfg.high_dim_threshold => r,
                    _ => cfg.repetitions,
                };
                let space = sequence_space(family, d, cfg.strategy, cfg.strategy_seed, cfg.m)?;
                let cell = run_cell(&space, method, cfg.kernel, cfg.n, reps, cfg.seed)?;
                rows.push(TableRow {
                    method,
                    family,
                    dimension: d,
                    cell,
                });
            }
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Error study
// ---------------------------------------------------------------------------

/// Configuration of an error study: sweep m, budget n = minimal_n(m, r),
/// fit the target R times, compare with the best-approximation error.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErrorStudyConfig {
    pub family: BasisFamily,
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    #[serde(default = "default_strategy")]
    pub strategy: SequenceStrategy,
    #[serde(default)]
    pub strategy_seed: u64,
    pub target: Target,
    pub ms: Vec<usize>,
    /// Confidence parameter of the budget rule n = minimal_n(m, r).
    #[serde(default = "default_r_param")]
    pub r: f64,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_variant")]
    pub variant: Variant,
    #[serde(default = "default_stochastic")]
    pub noise: Stochastic,
    #[serde(default = "default_kernel")]
    pub kernel: Kernel,
    /// Per-coordinate Gauss nodes for the L² error quadrature.
    #[serde(default = "default_error_nodes")]
    pub error_nodes: usize,
}

/// Error summary at one m.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorStudyRow {
    pub m: usize,
    pub n: usize,
    pub repetitions: usize,
    pub mean_error: f64,
    pub median_error: f64,
    pub p95_error: f64,
    pub max_error: f64,
    /// Mean of the squared errors — the quantity whose noise term scales
    /// like K̄σ²/n.
    pub mean_square_error: f64,
    /// Best-approximation error e_m(u) in L²(ρ), by quadrature.
    pub best_l2: f64,
    /// The raw per-repetition errors (not serialized; kept for tests and
    /// downstream tail counting).
    #[serde(skip)]
    pub runs: Vec<f64>,
}

/// The per-repetition L²(ρ) fit errors at one (space, n) cell. Repetition
/// k derives its seed from (master, n, m, k); the same derived seed keys
/// both the sample draw and the noise draws (distinct stream tags).
#[allow(clippy::too_many_arguments)]
pub fn error_runs(
    space: &ApproximationSpace,
    target: &Target,
    n: usize,
    repetitions: usize,
    master_seed: u64,
    variant: Variant,
    noise_model: &NoiseModel,
    kernel: Kernel,
    method: ErrorMethod,
) -> Result<Vec<f64>> {
    let sampler = Sampler::new(space, kernel)?;
    let m = space.size();
    let mut errors = Vec::with_capacity(repetitions);
    for k in 0..repetitions {
        let seed = Stream::derive(&[tag::REPETITION, master_seed, n as u64, m as u64, k as u64]);
        let sample = sampler.draw(n, seed)?;
        let y = noise::observe(space, target, &sample, noise_model, seed)?;
        let fit = lsq::fit(space, &sample, &y, variant)?;
        let err = lsq::l2_error(
            space,
            &fit,
            |x| {
                target
                    .eval(space, x)
                    .expect("target evaluable on the domain")
            },
            method,
        )?;
        errors.push(err);
    }
    Ok(errors)
}

/// Sweep the error study over `ms`.
pub fn error_study(cfg: &ErrorStudyConfig) -> Result<Vec<ErrorStudyRow>> {
    if cfg.repetitions == 0 {
        return Err(Error::config("repetitions must be at least 1"));
    }
    if cfg.ms.is_empty() {
        return Err(Error::config("error study needs at least one m"));
    }
    if !(cfg.r > 0.0) {
        return Err(Error::config("the budget parameter r must be positive"));
    }
    let m_max = *cfg.ms.iter().max().unwrap();
    let seq = IndexSet::nested_sequence(cfg.dimension, m_max, cfg.strategy, cfg.strategy_seed)?;
    let noise_model = NoiseModel {
        bias: Target::Zero,
        stochastic: cfg.noise,
        bound: cfg.noise.amplitude(),
    };
    let method = ErrorMethod::TensorQuadrature {
        nodes: cfg.error_nodes,
    };
    let mut rows = Vec::with_capacity(cfg.ms.len());
    for &m in &cfg.ms {
        let space = ApproximationSpace::isotropic(cfg.family, seq.prefix(m)?)?;
        let n = minimal_n(m, cfg.r);
        let mut runs = error_runs(
            &space,
            &cfg.target,
            n,
            cfg.repetitions,
            cfg.seed,
            cfg.variant,
            &noise_model,
            cfg.kernel,
            method,
        )?;
        let mean_error = runs.iter().sum::<f64>() / runs.len() as f64;
        let mean_square_error = runs.iter().map(|e| e * e).sum::<f64>() / runs.len() as f64;
        let mut sorted = runs.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let median_error = if sorted.len() % 2 == 1 {
            sorted[sorted.len() / 2]
        } else {
            0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
        };
        let p95_error =
            sorted[((sorted.len() as f64 * 0.95).ceil() as usize - 1).min(sorted.len() - 1)];
        let max_error = *sorted.last().unwrap();
        let best_l2 = lsq::best_approx_error(
            &space,
            |x| {
                cfg.target
                    .eval(&space, x)
                    .expect("target evaluable on the domain")
            },
            method,
        )?;
        runs.shrink_to_fit();
        rows.push(ErrorStudyRow {
            m,
            n,
            repetitions: cfg.repetitions,
            mean_error,
            median_error,
            p95_error,
            max_error,
            mean_square_error,
            best_l2,
            runs,
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Verification suite
// ---------------------------------------------------------------------------

/// Outcome of one named verification check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<String>) -> VerifyCheck {
    match f() {
        Ok(detail) => VerifyCheck {
            name,
            passed: true,
            detail,
        },
        Err(e) => VerifyCheck {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::invalid(msg()))
    }
}

/// Run the full invariant suite. Each check is self-contained and seeded;
/// the whole run takes well under a minute.
pub fn run_verification() -> Vec<VerifyCheck> {
    vec![
        check("weight-identity", verify_weight_identity),
        check("density-normalization", verify_density_normalization),
        check("conditional-telescoping", verify_conditional_telescoping),
        check("sampler-its-law", verify_sampler_its_law),
        check("sampler-kernel-agreement", verify_kernel_agreement),
        check("marginal-chi-square", verify_marginal_chi_square),
        check("gramian-concentration", verify_gramian_concentration),
        check("cond-dist-implication", verify_cond_dist_implication),
        check("exact-reproduction", verify_exact_reproduction),
        check("minimal-norm-oracle", verify_minimal_norm_oracle),
        check("estimator-variants", verify_estimator_variants),
        check("condition-rule-anchors", verify_condition_rule_anchors),
        check("chernoff-anchors", verify_chernoff_anchors),
        check("noise-contract", verify_noise_contract),
        check("provenance-determinism", verify_provenance_determinism),
    ]
}

/// True when every check passed.
pub fn all_passed(checks: &[VerifyCheck]) -> bool {
    checks.iter().all(|c| c.passed)
}

fn verify_weight_identity() -> Result<String> {
    let mut worst = 0.0f64;
    for family in BasisFamily::ALL {
        let space = ApproximationSpace::univariate(family, 40);
        let m = space.size() as f64;
        let mut stream = Stream::from_key(&[tag::MONTE_CARLO, 0x77695f31, family as u64]);
        for _ in 0..200 {
            let t = match family {
                BasisFamily::HermiteGaussian => stream.next_standard_normal(),
                _ => family.sample_reference(stream.next_open01()),
            };
            let k = space.christoffel(&[t])?;
            let w = space.optimal_weight(&[t])?;
            worst = worst.max((w * k - m).abs());
        }
    }
    let sp3 = ApproximationSpace::new(
        vec![
            BasisFamily::LegendreUniform,
            BasisFamily::ChebyshevArcsine,
            BasisFamily::HermiteGaussian,
        ],
        IndexSet::total_degree(3, 4),
    )?;
    let m = sp3.size() as f64;
    let mut stream = Stream::from_key(&[tag::MONTE_CARLO, 0x77695f32]);
    for _ in 0..200 {
        let x = [
            BasisFamily::LegendreUniform.sample_reference(stream.next_open01()),
            BasisFamily::ChebyshevArcsine.sample_reference(stream.next_open01()),
            stream.next_standard_normal(),
        ];
        worst = worst.max((sp3.optimal_weight(&x)? * sp3.christoffel(&x)? - m).abs());
    }
    ensure(worst < 1e-9, || format!("max |w·k - m| = {worst:.3e}"))?;
    Ok(format!("max |w·k - m| = {worst:.3e}"))
}

fn verify_density_normalization() -> Result<String> {
    let mut worst = 0.0f64;
    for family in BasisFamily::ALL {
        let space = ApproximationSpace::univariate(family, 7);
        let mass = crate::quadrature::tensor_integrate(space.families(), 64, |x| {
            space.optimal_density(x).expect("inside support") / space.families()[0].density(x[0])
        })?;
        worst = worst.max((mass - 1.0).abs());
    }
    let sp2 = ApproximationSpace::new(
        vec![BasisFamily::LegendreUniform, BasisFamily::HermiteGaussian],
        IndexSet::total_degree(2, 3),
    )?;
    let mass2 = crate::quadrature::tensor_integrate(sp2.families(), 48, |x| {
        let base: f64 = sp2
            .families()
            .iter()
            .zip(x)
            .map(|(f, &t)| f.density(t))
            .product();
        sp2.optimal_density(x).expect("inside support") / base
    })?;
    worst = worst.max((mass2 - 1.0).abs());
    ensure(worst < 1e-8, || format!("max |∫μ - 1| = {worst:.3e}"))?;
    Ok(format!("max |∫μ - 1| = {worst:.3e}"))
}

fn verify_conditional_telescoping() -> Result<String> {
    let sp = ApproximationSpace::new(
        vec![
            BasisFamily::LegendreUniform,
            BasisFamily::HermiteGaussian,
            BasisFamily::ChebyshevArcsine,
        ],
        IndexSet::total_degree(3, 3),
    )?;
    let points = [[0.3, -0.7, 0.2], [-0.9, 1.5, -0.4], [0.05, 0.0, 0.88]];
    let mut worst = 0.0f64;
    for x in &points {
        let mut product = 1.0;
        for q in 0..3 {
            product *= sp.conditional_mixture(q, &x[..q])?.density(x[q])?;
        }
        let joint = sp.optimal_density(x)?;
        worst = worst.max((product - joint).abs() / joint.abs().max(1e-300));
    }
    ensure(worst < 1e-12, || format!("max rel gap = {worst:.3e}"))?;
    Ok(format!("max rel telescoping gap = {worst:.3e}"))
}

fn verify_sampler_its_law() -> Result<String> {
    let sp = ApproximationSpace::univariate(BasisFamily::LegendreUniform, 2);
    let sampler = Sampler::new(&sp, Kernel::InverseTransform)?;
    let s = sampler.draw(20_000, 0x6b73)?;
    let mut vals: Vec<f64> = s.points.iter().map(|p| p[0]).collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    let ks = stats::ks_statistic(&vals, |t| t / 4.0 + t * t * t / 4.0 + 0.5);
    let crit = stats::ks_critical(vals.len(), 0.01);
    ensure(ks < crit, || format!("KS = {ks:.5} ≥ crit = {crit:.5}"))?;
    Ok(format!("KS = {ks:.5} < crit = {crit:.5}"))
}

fn verify_kernel_agreement() -> Result<String> {
    let sp = ApproximationSpace::univariate(BasisFamily::LegendreUniform, 5);
    let a = Sampler::new(&sp, Kernel::RejectionBounded)?.draw(8_000, 0x6167)?;
    let b = Sampler::new(&sp, Kernel::InverseTransform)?.draw(8_000, 0x6168)?;
    let mut xa: Vec<f64> = a.points.iter().map(|p| p[0]).collect();
    let mut xb: Vec<f64> = b.points.iter().map(|p| p[0]).collect();
    xa.sort_by(|x, y| x.total_cmp(y));
    xb.sort_by(|x, y| x.total_cmp(y));
    let ks = stats::ks_two_sample(&xa, &xb);
    let crit = stats::ks_two_sample_critical(xa.len(), xb.len(), 0.001);
    ensure(ks < crit, || {
        format!("two-sample KS = {ks:.5} ≥ crit = {crit:.5}")
    })?;
    Ok(format!("two-sample KS = {ks:.5} < crit = {crit:.5}"))
}

fn verify_marginal_chi_square() -> Result<String> {
    let sp =
        ApproximationSpace::isotropic(BasisFamily::LegendreUniform, IndexSet::total_degree(2, 1))?;
    let s = Sampler::new(&sp, Kernel::Auto)?.draw(20_000, 0x6d67)?;
    let bins = 50;
    let mut observed = vec![0usize; bins];
    for p in &s.points {
        let idx = (((p[0] + 1.0) / 2.0) * bins as f64).floor() as usize;
        observed[idx.min(bins - 1)] += 1;
    }
    // ψ(t) = (2 + 3t²)/6; bin mass = Ψ(b) - Ψ(a) with Ψ(t) = (2t + t³)/6 + 1/2.
    let psi_cdf = |t: f64| (2.0 * t + t * t * t) / 6.0 + 0.5;
    let expected: Vec<f64> = (0..bins)
        .map(|i| {
            let a = -1.0 + 2.0 * i as f64 / bins as f64;
            let b = -1.0 + 2.0 * (i + 1) as f64 / bins as f64;
            (psi_cdf(b) - psi_cdf(a)) * s.len() as f64
        })
        .collect();
    let chi2 = stats::chi_square_statistic(&observed, &expected);
    let crit = stats::chi_square_critical(bins - 1, 0.01);
    ensure(chi2 < crit, || format!("χ² = {chi2:.2} ≥ crit = {crit:.2}"))?;
    Ok(format!("χ² = {chi2:.2} < crit = {crit:.2}"))
}

fn verify_gramian_concentration() -> Result<String> {
    let sp = ApproximationSpace::univariate(BasisFamily::LegendreUniform, 8);
    let s = Sampler::new(&sp, Kernel::Auto)?.draw(4_000, 0x6763)?;
    let weighted = lsq::assemble(&sp, &s)?.spectral_stats().dist_identity;
    ensure(weighted < 0.25, || format!("weighted dist = {weighted:.4}"))?;
    let sp4 = ApproximationSpace::univariate(BasisFamily::LegendreUniform, 4);
    let st = sample_standard(&sp4, 20_000, 0x6764);
    let standard = lsq::assemble(&sp4, &st)?.spectral_stats().dist_identity;
    ensure(standard < 0.2, || format!("standard dist = {standard:.4}"))?;
    Ok(format!(
        "weighted dist = {weighted:.4}, standard dist = {standard:.4}"
    ))
}

fn verify_cond_dist_implication() -> Result<String> {
    let sp = ApproximationSpace::univariate(BasisFamily::ChebyshevArcsine, 6);
    let mut checked = 0;
    for k in 0..10 {
        let seed = Stream::derive(&[tag::REPETITION, 0x6364, k]);
        let s = Sampler::new(&sp, Kernel::Auto)?.draw(600, seed)?;
        let st = lsq::assemble(&sp, &s)?.spectral_stats();
        if st.dist_identity <= 0.5 {
            ensure(st.cond <= 3.0 + 1e-12, || {
                format!("dist = {} but cond = {}", st.dist_identity, st.cond)
            })?;
            checked += 1;
        }
    }
    ensure(checked > 0, || "no repetition had dist ≤ 1/2".to_string())?;
    Ok(format!(
        "implication held in {checked}/10 qualifying repetitions"
    ))
}

fn verify_exact_reproduction() -> Result<String> {
    let sp =
        ApproximationSpace::isotropic(BasisFamily::LegendreUniform, IndexSet::total_degree(2, 2))?;
    let mut worst = 0.0f64;
    for k in 0..3 {
        let target = Target::random_in_space(&sp, 500 + k);
        let seed = Stream::derive(&[tag::REPETITION, 0x7265, k]);
        let s = Sampler::new(&sp, Kernel::Auto)?.draw(80, seed)?;
        let y = noise::observe(&sp, &target, &s, &NoiseModel::noiseless(), seed)?;
        let f = lsq::fit(&sp, &s, &y, Variant::Plain)?;
        let truth = match &target {
            Target::InSpace(c) => c.clone(),
            _ => unreachable!(),
        };
        let num: f64 = f
            .coefficients
            .iter()
            .zip(&truth)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let den: f64 = truth.iter().map(|c| c * c).sum();
        worst = worst.max((num / den).sqrt());
    }
    ensure(worst < 1e-8, || {
        format!("max rel coeff error = {worst:.3e}")
    })?;
    Ok(format!("max rel coeff error = {worst:.3e}"))
}

fn verify_minimal_norm_oracle() -> Result<String> {
    let mut worst = 0.0f64;
    for trial in 0..20u64 {
        let mut stream = Stream::from_key(&[tag::MONTE_CARLO, 0x6d6e, trial]);
        let m = 3 + (trial % 4) as usize; // 3..=6
        let n_pts = 2.max(m - 2); // singular: fewer points than functions
        let sp = ApproximationSpace::univariate(BasisFamily::LegendreUniform, m);
        let points: Vec<Vec<f64>> = (0..n_pts)
            .map(|_| vec![2.0 * stream.next_open01() - 1.0])
            .collect();
        let weights: Vec<f64> = (0..n_pts).map(|_| 0.5 + stream.next_open01()).collect();
        let y: Vec<f64> = (0..n_pts).map(|_| stream.next_standard_normal()).collect();
        let sample = crate::sampler::WeightedSample {
            dim: 1,
            points,
            weights,
            meta: crate::sampler::SampleMeta {
                measure: crate::sampler::MeasureKind::Standard,
                kernel: None,
                seed: trial,
                space_fingerprint: sp.fingerprint(),
                basis_size: m,
            },
        };
        let sys = lsq::assemble(&sp, &sample)?;
        let got = lsq::solve_min_norm(&sys, &y)?;
        // Construction oracle: Q Λ⁺ Qᵀ b by hand.
        let (vals, vecs) = sys.gram().jacobi_eigen();
        let b = sys.rhs(&y)?;
        let lambda_max = vals.last().copied().unwrap();
        let mut want = vec![0.0; m];
        for j in 0..m {
            if vals[j] <= 1e-12 * lambda_max {
                continue;
            }
            let proj: f64 = (0..m).map(|i| vecs.get(i, j) * b[i]).sum();
            for (i, w) in want.iter_mut().enumerate() {
                *w += vecs.get(i, j) * proj / vals[j];
            }
        }
        for (g, w) in got.iter().zip(&want) {
            worst = worst.max((g - w).abs());
        }
    }
    ensure(worst < 1e-9, || format!("max |Δc| = {worst:.3e}"))?;
    Ok(format!("max |Δc| = {worst:.3e} over 20 singular systems"))
}

fn verify_estimator_variants() -> Result<String> {
    let sp = ApproximationSpace::univariate(BasisFamily::LegendreUniform, 4);
    let s = Sampler::new(&sp, Kernel::Auto)?.draw(200, 0x7661)?;
    let y: Vec<f64> = (0..s.len()).map(|i| 4.0 * s.point(i)[0]).collect();
    let plain = lsq::fit(&sp, &s, &y, Variant::Plain)?;
    let trunc = lsq::fit(&sp, &s, &y, Variant::Truncated { tau: 0.5 })?;
    ensure(plain.coefficients == trunc.coefficients, || {
        "truncation must not alter coefficients".to_string()
    })?;
    let v = trunc.evaluate(&sp, &[0.9])?;
    ensure(v.abs() <= 0.5 + 1e-15, || {
        format!("truncated value {v} escapes τ")
    })?;
    // A 2-point sample cannot control 4 basis functions: conditioned → 0.
    let tiny = crate::sampler::WeightedSample {
        dim: 1,
        points: vec![vec![-0.4], vec![0.3]],
        weights: vec![1.0, 1.0],
        meta: s.meta.clone(),
    };
    let cond = lsq::fit(&sp, &tiny, &[1.0, -1.0], Variant::Conditioned)?;
    ensure(
        cond.zeroed && cond.coefficients.iter().all(|&c| c == 0.0),
        || "conditioned variant failed to zero an unstable fit".to_string(),
    )?;
    Ok("plain/truncated/conditioned semantics verified".to_string())
}

fn verify_condition_rule_anchors() -> Result<String> {
    let k1 = kappa(1.0);
    ensure((k1 - 0.07671320486).abs() < 1e-11, || {
        format!("κ(1) = {k1}")
    })?;
    let table: Vec<usize> = (2..=8).map(|m| minimal_n(m, 1.0)).collect();
    let frozen = [127, 209, 297, 389, 484, 581, 681];
    ensure(table == frozen, || format!("minimal_n(2..8) = {table:?}"))?;
    let big = condition_check(200, 26559, 1.0);
    ensure(big.satisfied && big.minimal_n == 26559, || {
        format!("m=200 check: {big:?}")
    })?;
    ensure(!condition_check(200, 26558, 1.0).satisfied, || {
        "n = 26558 must fail the budget rule at m = 200".to_string()
    })?;
    ensure(!condition_check(1, 2, 1.0).satisfied, || {
        "m=1, n=2 must not satisfy the budget rule".to_string()
    })?;
    let incr = minimal_n(5, 0.5) < minimal_n(5, 1.0) && minimal_n(5, 1.0) < minimal_n(5, 2.0);
    ensure(incr, || "minimal_n must increase with r".to_string())?;
    Ok(format!("κ(1) = {k1:.11}, minimal_n table {table:?}"))
}

fn verify_chernoff_anchors() -> Result<String> {
    let c = chernoff_exponent(0.5);
    ensure((c - 0.15342640972).abs() < 1e-11, || format!("c_1/2 = {c}"))?;
    let bound = chernoff_reference(200, 26559, 200.0, 0.5);
    ensure((bound - 5.6706e-7).abs() < 1e-10, || {
        format!("bound = {bound:.6e}")
    })?;
    let vacuous = chernoff_reference(7, 0, 7.0, 0.5);
    ensure(vacuous == 14.0, || format!("n=0 bound = {vacuous}"))?;
    Ok(format!("c_1/2 = {c:.11}, tail bound = {bound:.4e}"))
}

fn verify_noise_contract() -> Result<String> {
    let sp = ApproximationSpace::univariate(BasisFamily::LegendreUniform, 3);
    let s = sample_standard(&sp, 50_000, 0x6e6f);
    let clean = noise::observe(&sp, &Target::Exp, &s, &NoiseModel::noiseless(), 7)?;
    for (yi, x) in clean.iter().zip(&s.points) {
        ensure(*yi == x[0].exp(), || {
            "noiseless observation differs from u".to_string()
        })?;
    }
    let bounded = noise::observe(&sp, &Target::Zero, &s, &NoiseModel::bounded_uniform(0.1), 7)?;
    let max = bounded.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    ensure(max <= 0.1, || format!("|η| reached {max} > a"))?;
    let gauss = noise::observe(&sp, &Target::Zero, &s, &NoiseModel::gaussian(0.5), 7)?;
    let n = gauss.len() as f64;
    let mean = gauss.iter().sum::<f64>() / n;
    let var = gauss.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    let sd_var = (2.0 * 0.0625 / (n - 1.0)).sqrt();
    ensure((var - 0.25).abs() < 3.0 * sd_var, || format!("var = {var}"))?;
    let again = noise::observe(&sp, &Target::Zero, &s, &NoiseModel::gaussian(0.5), 7)?;
    ensure(gauss == again, || {
        "noise draws must be reproducible".to_string()
    })?;
    Ok(format!("bounded max = {max:.4}, gaussian var = {var:.5}"))
}

fn verify_provenance_determinism() -> Result<String> {
    let sp = ApproximationSpace::new(
        vec![BasisFamily::LegendreUniform, BasisFamily::HermiteGaussian],
        IndexSet::total_degree(2, 3),
    )?;
    let sampler = Sampler::new(&sp, Kernel::Auto)?;
    let a = sampler.draw(150, 0x7072)?;
    let b = sampler.draw(150, 0x7072)?;
    ensure(a.points == b.points && a.weights == b.weights, || {
        "same-seed draws differ".to_string()
    })?;
    let c = sampler.draw(150, 0x7073)?;
    ensure(a.points != c.points, || {
        "different seeds produced identical draws".to_string()
    })?;
    let longer = sampler.draw(300, 0x7072)?;
    ensure(longer.points[..150] == a.points[..], || {
        "prefix stability violated".to_string()
    })?;
    Ok("same-seed identity, seed sensitivity, prefix stability".to_string())
}
