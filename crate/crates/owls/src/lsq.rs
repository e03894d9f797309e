//! Weighted least squares on a polynomial space.
//!
//! Given points x_1..x_n with weights w_i and data y_i, the estimator
//! minimizes (1/n) Σ_i w_i |v(x_i) - y_i|² over v ∈ V. In the orthonormal
//! basis the normal equations read G c = b with the Gramian
//!
//! ```text
//! G_{jk} = (1/n) Σ_i w_i Φ_j(x_i) Φ_k(x_i),    b_j = (1/n) Σ_i w_i y_i Φ_j(x_i).
//! ```
//!
//! Under the optimal measure E[G] = I, and ‖G - I‖₂ ≤ 1/2 forces
//! cond(G) ≤ 3. Three estimator variants are provided: `plain` (always
//! solve), `truncated` (same coefficients, evaluations clamped to a level
//! τ), and `conditioned` (identically zero whenever ‖G - I‖₂ > 1/2).

use crate::linalg::Matrix;
use crate::measure::ApproximationSpace;
use crate::quadrature;
use crate::rng::{tag, Stream};
use crate::sampler::WeightedSample;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Relative eigenvalue cutoff for minimal-norm (pseudo-inverse) solves.
pub const PSEUDO_CUTOFF: f64 = 1e-12;
/// Smallest eigenvalue for which the Cholesky fast path is attempted.
pub const CHOLESKY_FLOOR: f64 = 1e-8;
/// Condition numbers are capped here when the Gramian is numerically
/// singular (λ_min ≤ 0); the flag in [`SpectralStats`] records the event.
pub const COND_CAP: f64 = 1e300;

/// Estimator variant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Variant {
    /// Solve and evaluate as-is.
    Plain,
    /// Solve as-is; clamp evaluations to [-tau, tau]. Coefficients are kept.
    Truncated { tau: f64 },
    /// The zero function whenever ‖G - I‖₂ > 1/2; the plain fit otherwise.
    Conditioned,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "plain" {
            return Ok(Variant::Plain);
        }
        if s == "conditioned" {
            return Ok(Variant::Conditioned);
        }
        if let Some(rest) = s.strip_prefix("truncated:") {
            let tau: f64 = rest
                .parse()
                .map_err(|_| Error::config(format!("bad truncation level '{rest}'")))?;
            if !(tau > 0.0) {
                return Err(Error::config("truncation level must be positive"));
            }
            return Ok(Variant::Truncated { tau });
        }
        Err(Error::config(format!(
            "unknown variant '{s}' (expected plain, truncated:<tau>, conditioned)"
        )))
    }
}

/// Eigenvalue summary of a Gramian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralStats {
    /// Ascending eigenvalues of G.
    pub eigenvalues: Vec<f64>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// ‖G - I‖₂ = max(|λ_min - 1|, |λ_max - 1|).
    pub dist_identity: f64,
    /// λ_max / λ_min, capped at [`COND_CAP`] when λ_min ≤ 0.
    pub cond: f64,
    /// Whether the condition number hit the cap.
    pub cond_capped: bool,
}

impl SpectralStats {
    fn from_eigenvalues(eigenvalues: Vec<f64>) -> SpectralStats {
        let lambda_min = *eigenvalues.first().expect("nonempty spectrum");
        let lambda_max = *eigenvalues.last().expect("nonempty spectrum");
        let dist_identity = (lambda_max - 1.0).abs().max((lambda_min - 1.0).abs());
        let (cond, cond_capped) = if lambda_min > 0.0 {
            let c = lambda_max / lambda_min;
            if c.is_finite() && c < COND_CAP {
                (c, false)
            } else {
                (COND_CAP, true)
            }
        } else {
            (COND_CAP, true)
        };
        // ‖G - I‖ ≤ 1/2 pins the spectrum to [1/2, 3/2], hence cond ≤ 3.
        debug_assert!(dist_identity > 0.5 || cond <= 3.0 + 1e-12);
        SpectralStats {
            eigenvalues,
            lambda_min,
            lambda_max,
            dist_identity,
            cond,
            cond_capped,
        }
    }
}

/// Assembled normal equations: the Gramian plus the design matrix needed to
/// form right-hand sides for any data vector on the same points.
#[derive(Clone, Debug)]
pub struct NormalSystem {
    n: usize,
    m: usize,
    gram: Matrix,
    /// Row-major n×m basis evaluations Φ_j(x_i).
    design: Vec<f64>,
    weights: Vec<f64>,
}

impl NormalSystem {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn design_row(&self, i: usize) -> &[f64] {
        &self.design[i * self.m..(i + 1) * self.m]
    }

    /// b_j = (1/n) Σ_i w_i y_i Φ_j(x_i).
    pub fn rhs(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.n {
            return Err(Error::LengthMismatch {
                what: "data vector",
                expected: self.n,
                got: y.len(),
            });
        }
        let mut b = vec![0.0; self.m];
        for i in 0..self.n {
            let scale = self.weights[i] * y[i];
            if scale == 0.0 {
                continue;
            }
            let row = self.design_row(i);
            for (bj, &phi) in b.iter_mut().zip(row) {
                *bj += scale * phi;
            }
        }
        for bj in &mut b {
            *bj /= self.n as f64;
        }
        Ok(b)
    }

    /// Eigenvalue summary of the Gramian.
    pub fn spectral_stats(&self) -> SpectralStats {
        SpectralStats::from_eigenvalues(self.gram.jacobi_eigenvalues())
    }
}

/// Build the Gramian and design matrix for a sample on a space. The Gramian
/// is exactly symmetric by construction (upper triangle accumulated, then
/// mirrored).
pub fn assemble(space: &ApproximationSpace, sample: &WeightedSample) -> Result<NormalSystem> {
    if sample.dim != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            got: sample.dim,
        });
    }
    if sample.weights.len() != sample.points.len() {
        return Err(Error::LengthMismatch {
            what: "sample weights",
            expected: sample.points.len(),
            got: sample.weights.len(),
        });
    }
    let n = sample.len();
    let m = space.size();
    if n == 0 {
        return Err(Error::invalid("cannot assemble from an empty sample"));
    }
    let mut design = vec![0.0; n * m];
    let mut scratch = space.scratch();
    let mut upper = vec![0.0; m * m];
    for i in 0..n {
        let row = &mut design[i * m..(i + 1) * m];
        space.eval_tensor_into(sample.point(i), &mut scratch, row);
        let w = sample.weights[i];
        for j in 0..m {
            let wj = w * row[j];
            let dst = &mut upper[j * m + j..(j + 1) * m];
            let src = &row[j..];
            for (g, &phi) in dst.iter_mut().zip(src) {
                *g += wj * phi;
            }
        }
    }
    let mut gram = Matrix::zeros(m);
    let inv_n = 1.0 / n as f64;
    for j in 0..m {
        for k in j..m {
            let v = upper[j * m + k] * inv_n;
            gram.set(j, k, v);
            gram.set(k, j, v);
        }
    }
    Ok(NormalSystem {
        n,
        m,
        gram,
        design,
        weights: sample.weights.clone(),
    })
}

/// How the coefficient vector was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverPath {
    Cholesky,
    MinimalNorm,
    ConditionedZero,
}

/// A fitted estimator: coefficients in the orthonormal basis plus the
/// spectral diagnostics of the Gramian that produced them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub coefficients: Vec<f64>,
    pub variant: Variant,
    pub solver: SolverPath,
    pub spectral: SpectralStats,
    /// True when the conditioned variant zeroed the estimator.
    pub zeroed: bool,
}

impl FitResult {
    /// Evaluate the estimator at `x`. Truncation acts here, on the value;
    /// the coefficients are left untouched.
    pub fn evaluate(&self, space: &ApproximationSpace, x: &[f64]) -> Result<f64> {
        let vals = space.eval_tensor_basis(x)?;
        let raw: f64 = vals
            .iter()
            .zip(&self.coefficients)
            .map(|(v, c)| v * c)
            .sum();
        Ok(match self.variant {
            Variant::Truncated { tau } => raw.clamp(-tau, tau),
            _ => raw,
        })
    }

    /// ℓ² norm of the coefficient vector (= L²(ρ) norm of the plain
    /// estimator, by orthonormality).
    pub fn coefficient_norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// Minimal-norm solve of G c = b through the eigendecomposition, dropping
/// eigenvalues at or below `PSEUDO_CUTOFF · λ_max`.
pub fn solve_min_norm(system: &NormalSystem, y: &[f64]) -> Result<Vec<f64>> {
    let b = system.rhs(y)?;
    Ok(system.gram.pseudo_solve(&b, PSEUDO_CUTOFF))
}

/// Weighted least-squares fit of data `y` (one value per sample point).
pub fn fit(
    space: &ApproximationSpace,
    sample: &WeightedSample,
    y: &[f64],
    variant: Variant,
) -> Result<FitResult> {
    let system = assemble(space, sample)?;
    fit_system(&system, y, variant)
}

/// Fit from an already assembled system (lets callers reuse the Gramian).
pub fn fit_system(system: &NormalSystem, y: &[f64], variant: Variant) -> Result<FitResult> {
    let (vals, vecs) = system.gram.jacobi_eigen();
    let spectral = SpectralStats::from_eigenvalues(vals.clone());
    if matches!(variant, Variant::Conditioned) && spectral.dist_identity > 0.5 {
        return Ok(FitResult {
            coefficients: vec![0.0; system.m],
            variant,
            solver: SolverPath::ConditionedZero,
            spectral,
            zeroed: true,
        });
    }
    let b = system.rhs(y)?;
    let (coefficients, solver) = if spectral.lambda_min > CHOLESKY_FLOOR {
        match system.gram.cholesky_solve(&b) {
            Some(c) => (c, SolverPath::Cholesky),
            None => (pseudo_solve_with(&vals, &vecs, &b), SolverPath::MinimalNorm),
        }
    } else {
        (pseudo_solve_with(&vals, &vecs, &b), SolverPath::MinimalNorm)
    };
    Ok(FitResult {
        coefficients,
        variant,
        solver,
        spectral,
        zeroed: false,
    })
}

/// c = Q Λ⁺ Qᵀ b from a precomputed eigendecomposition.
fn pseudo_solve_with(vals: &[f64], vecs: &Matrix, b: &[f64]) -> Vec<f64> {
    let m = vals.len();
    let lambda_max = vals.last().copied().unwrap_or(0.0);
    if lambda_max <= 0.0 {
        return vec![0.0; m];
    }
    let cutoff = PSEUDO_CUTOFF * lambda_max;
    let mut c = vec![0.0; m];
    for j in 0..m {
        if vals[j] <= cutoff {
            continue;
        }
        let mut proj = 0.0;
        for (i, &bi) in b.iter().enumerate() {
            proj += vecs.get(i, j) * bi;
        }
        let scale = proj / vals[j];
        for (i, ci) in c.iter_mut().enumerate() {
            *ci += scale * vecs.get(i, j);
        }
    }
    c
}

/// How to take L²(ρ) norms of error functionals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum ErrorMethod {
    /// Tensor Gauss quadrature with `nodes` points per coordinate.
    TensorQuadrature { nodes: usize },
    /// Monte Carlo over the reference measure.
    MonteCarlo { n: usize, seed: u64 },
}

/// ‖fit - f‖_{L²(ρ)}, honoring the variant's evaluation rule.
pub fn l2_error(
    space: &ApproximationSpace,
    fit: &FitResult,
    f: impl Fn(&[f64]) -> f64,
    method: ErrorMethod,
) -> Result<f64> {
    let sq = match method {
        ErrorMethod::TensorQuadrature { nodes } => {
            quadrature::tensor_integrate(space.families(), nodes, |x| {
                let u = fit
                    .evaluate(space, x)
                    .expect("quadrature nodes lie inside the support");
                let d = u - f(x);
                d * d
            })?
        }
        ErrorMethod::MonteCarlo { n, seed } => {
            let mut total = 0.0;
            for x in reference_draws(space, n, seed) {
                let u = fit.evaluate(space, &x)?;
                let d = u - f(&x);
                total += d * d;
            }
            total / n as f64
        }
    };
    Ok(sq.max(0.0).sqrt())
}

/// Best-approximation error e(f) = ‖f - P_V f‖_{L²(ρ)}: the benchmark any
/// least-squares fit is compared against. Quadrature evaluates the
/// projection coefficients and ‖f‖² and uses Parseval; Monte Carlo
/// estimates the same quantities from reference draws.
pub fn best_approx_error(
    space: &ApproximationSpace,
    f: impl Fn(&[f64]) -> f64,
    method: ErrorMethod,
) -> Result<f64> {
    match method {
        ErrorMethod::TensorQuadrature { nodes } => {
            let d = space.dim();
            let m = space.size();
            let rules: Vec<_> = space
                .families()
                .iter()
                .map(|&fam| quadrature::family_rule(fam, nodes))
                .collect::<Vec<_>>();
            let mut scratch = space.scratch();
            let mut vals = vec![0.0; m];
            let mut coeff = vec![0.0; m];
            let mut f2 = 0.0;
            // Odometer over the tensor grid: one pass accumulates ‖f‖² and
            // every projection coefficient.
            let mut idx = vec![0usize; d];
            let mut x = vec![0.0; d];
            loop {
                let mut w = 1.0;
                for q in 0..d {
                    x[q] = rules[q].nodes[idx[q]];
                    w *= rules[q].weights[idx[q]];
                }
                let fx = f(&x);
                f2 += w * fx * fx;
                space.eval_tensor_into(&x, &mut scratch, &mut vals);
                let scale = w * fx;
                for (c, &v) in coeff.iter_mut().zip(&vals) {
                    *c += scale * v;
                }
                let mut q = 0;
                loop {
                    if q == d {
                        break;
                    }
                    idx[q] += 1;
                    if idx[q] < rules[q].nodes.len() {
                        break;
                    }
                    idx[q] = 0;
                    q += 1;
                }
                if q == d {
                    break;
                }
            }
            let proj_sq: f64 = coeff.iter().map(|c| c * c).sum();
            Ok((f2 - proj_sq).max(0.0).sqrt())
        }
        ErrorMethod::MonteCarlo { n, seed } => {
            let m = space.size();
            let mut scratch = space.scratch();
            let mut vals = vec![0.0; m];
            let mut coeff = vec![0.0; m];
            let mut f2 = 0.0;
            for x in reference_draws(space, n, seed) {
                let fx = f(&x);
                f2 += fx * fx;
                space.eval_tensor_into(&x, &mut scratch, &mut vals);
                for (c, &v) in coeff.iter_mut().zip(&vals) {
                    *c += fx * v;
                }
            }
            f2 /= n as f64;
            let proj_sq: f64 = coeff.iter().map(|c| (c / n as f64) * (c / n as f64)).sum();
            Ok((f2 - proj_sq).max(0.0).sqrt())
        }
    }
}

/// iid draws from the reference measure for Monte Carlo error estimates.
fn reference_draws(space: &ApproximationSpace, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut x = Vec::with_capacity(space.dim());
        for (q, fam) in space.families().iter().enumerate() {
            let mut stream = Stream::from_key(&[tag::MONTE_CARLO, seed, k as u64, q as u64]);
            let t = match fam {
                crate::basis::BasisFamily::HermiteGaussian => stream.next_standard_normal(),
                _ => fam.sample_reference(stream.next_open01()),
            };
            x.push(t);
        }
        out.push(x);
    }
    out
}
