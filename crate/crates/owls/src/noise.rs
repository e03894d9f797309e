//! Additive observation noise: y_i = u(x_i) + h(x_i) + η_i.
//!
//! The perturbation splits into a deterministic bias h (any registry
//! [`Target`]) and a centered stochastic part η — either bounded uniform
//! (|η| ≤ a almost surely) or Gaussian with variance σ². Draws are keyed
//! by (seed, sample index), so observations are reproducible and
//! independent of the point locations.

use crate::measure::ApproximationSpace;
use crate::rng::{tag, Stream};
use crate::sampler::WeightedSample;
use crate::targets::Target;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// The centered stochastic part of the noise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Stochastic {
    /// No random part.
    None,
    /// η uniform on [-a, a].
    BoundedUniform { a: f64 },
    /// η ~ N(0, σ²).
    Gaussian { sigma: f64 },
}

impl Stochastic {
    /// Almost-sure bound on |η|, when one exists.
    pub fn amplitude(&self) -> Option<f64> {
        match *self {
            Stochastic::None => Some(0.0),
            Stochastic::BoundedUniform { a } => Some(a),
            Stochastic::Gaussian { .. } => None,
        }
    }

    /// sup_x E(|η|² | x) — constant in x for both models.
    pub fn variance(&self) -> f64 {
        match *self {
            Stochastic::None => 0.0,
            Stochastic::BoundedUniform { a } => a * a / 3.0,
            Stochastic::Gaussian { sigma } => sigma * sigma,
        }
    }

    fn draw(&self, stream: &mut Stream) -> f64 {
        match *self {
            Stochastic::None => 0.0,
            Stochastic::BoundedUniform { a } => a * (2.0 * stream.next_open01() - 1.0),
            Stochastic::Gaussian { sigma } => sigma * stream.next_standard_normal(),
        }
    }
}

impl std::str::FromStr for Stochastic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "none" {
            return Ok(Stochastic::None);
        }
        let parse_level = |rest: &str, what: &str| -> Result<f64> {
            let v: f64 = rest
                .parse()
                .map_err(|_| Error::config(format!("bad {what} '{rest}'")))?;
            if !(v >= 0.0) {
                return Err(Error::config(format!("{what} must be nonnegative")));
            }
            Ok(v)
        };
        if let Some(rest) = s.strip_prefix("uniform:") {
            return Ok(Stochastic::BoundedUniform {
                a: parse_level(rest, "amplitude")?,
            });
        }
        if let Some(rest) = s.strip_prefix("gaussian:") {
            return Ok(Stochastic::Gaussian {
                sigma: parse_level(rest, "sigma")?,
            });
        }
        Err(Error::config(format!(
            "unknown noise '{s}' (expected none, uniform:<a>, gaussian:<sigma>)"
        )))
    }
}

/// Additive noise model: deterministic bias plus centered stochastic part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Deterministic perturbation h (use `Target::Zero` for none).
    pub bias: Target,
    pub stochastic: Stochastic,
    /// Almost-sure bound D on |h(x) + η| when both parts are bounded;
    /// `None` for Gaussian noise. Filled by [`NoiseModel::resolve_bound`].
    pub bound: Option<f64>,
}

impl NoiseModel {
    pub fn noiseless() -> NoiseModel {
        NoiseModel {
            bias: Target::Zero,
            stochastic: Stochastic::None,
            bound: Some(0.0),
        }
    }

    pub fn gaussian(sigma: f64) -> NoiseModel {
        NoiseModel {
            bias: Target::Zero,
            stochastic: Stochastic::Gaussian { sigma },
            bound: None,
        }
    }

    pub fn bounded_uniform(a: f64) -> NoiseModel {
        NoiseModel {
            bias: Target::Zero,
            stochastic: Stochastic::BoundedUniform { a },
            bound: Some(a),
        }
    }

    pub fn with_bias(mut self, bias: Target) -> NoiseModel {
        self.bias = bias;
        self.bound = None;
        self
    }

    /// Compute (and store) D = ‖h‖_∞ + a when the stochastic part is
    /// bounded; Gaussian noise has no almost-sure bound, so D stays
    /// `None`. The sup norm comes from `Target::sup_norm_estimate`.
    pub fn resolve_bound(&mut self, space: &ApproximationSpace) -> Result<Option<f64>> {
        self.bound = match self.stochastic.amplitude() {
            Some(a) => Some(self.bias.sup_norm_estimate(space)? + a),
            None => None,
        };
        Ok(self.bound)
    }

    /// Whether observations carry any perturbation at all.
    pub fn is_noiseless(&self) -> bool {
        self.bias == Target::Zero && self.stochastic == Stochastic::None
    }
}

/// Observations of a registry target under the model:
/// y_i = u(x_i) + h(x_i) + η_i, with η_i keyed by (seed, i).
pub fn observe(
    space: &ApproximationSpace,
    u: &Target,
    sample: &WeightedSample,
    model: &NoiseModel,
    seed: u64,
) -> Result<Vec<f64>> {
    let clean = u.eval_all(space, &sample.points)?;
    perturb(space, clean, sample, model, seed)
}

/// Observations of an arbitrary function under the model.
pub fn observe_fn(
    space: &ApproximationSpace,
    u: impl Fn(&[f64]) -> f64,
    sample: &WeightedSample,
    model: &NoiseModel,
    seed: u64,
) -> Result<Vec<f64>> {
    let clean = sample.points.iter().map(|x| u(x)).collect();
    perturb(space, clean, sample, model, seed)
}

fn perturb(
    space: &ApproximationSpace,
    mut y: Vec<f64>,
    sample: &WeightedSample,
    model: &NoiseModel,
    seed: u64,
) -> Result<Vec<f64>> {
    if model.is_noiseless() {
        return Ok(y);
    }
    if model.bias != Target::Zero {
        for (yi, x) in y.iter_mut().zip(&sample.points) {
            *yi += model.bias.eval(space, x)?;
        }
    }
    if model.stochastic != Stochastic::None {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut stream = Stream::from_key(&[tag::NOISE, seed, i as u64]);
            *yi += model.stochastic.draw(&mut stream);
        }
    }
    Ok(y)
}

/// K̄ = ∫ k_{m,w} dρ, the constant in the noise term of the expected-error
/// bound (noise contributes ≲ K̄ σ²/n). For the optimal weights
/// w = m/k_m the product w·k_m is identically m, and for unit weights
/// ∫ k_m dρ = m by orthonormality — so both sampling schemes give K̄ = m.
pub fn kbar(space: &ApproximationSpace) -> f64 {
    space.size() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisFamily;
    use crate::lsq::{fit, Variant};
    use crate::sampler::{sample_optimal, sample_standard, Kernel};

    fn space(m: usize) -> ApproximationSpace {
        ApproximationSpace::univariate(BasisFamily::LegendreUniform, m)
    }

    #[test]
    fn noiseless_observations_are_exact() {
        let sp = space(3);
        let s = sample_standard(&sp, 50, 1);
        let y = observe(&sp, &Target::Exp, &s, &NoiseModel::noiseless(), 9).unwrap();
        for (yi, x) in y.iter().zip(&s.points) {
            assert_eq!(*yi, x[0].exp());
        }
    }

    #[test]
    fn bounded_uniform_respects_amplitude() {
        let sp = space(3);
        let s = sample_standard(&sp, 20_000, 2);
        let model = NoiseModel::bounded_uniform(0.1);
        let y = observe(&sp, &Target::Zero, &s, &model, 5).unwrap();
        let max = y.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        assert!(max <= 0.1, "max |η| = {max}");
        assert!(max > 0.05, "draws suspiciously small: {max}");
    }

    #[test]
    fn gaussian_variance_matches() {
        // Sample variance of 10⁶ draws at σ = 0.5 concentrates around
        // 0.25 with standard deviation √(2σ⁴/(n-1)) ≈ 3.5e-4.
        let sp = space(2);
        let s = sample_standard(&sp, 1_000_000, 3);
        let model = NoiseModel::gaussian(0.5);
        let y = observe(&sp, &Target::Zero, &s, &model, 11).unwrap();
        let n = y.len() as f64;
        let mean = y.iter().sum::<f64>() / n;
        let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        let sd_of_var = (2.0 * 0.25f64 * 0.25 / (n - 1.0)).sqrt();
        assert!((var - 0.25).abs() < 3.0 * sd_of_var, "var = {var}");
        // Centering: the mean has standard deviation σ/√n = 5e-4.
        assert!(mean.abs() < 3.0 * 0.5 / n.sqrt(), "mean = {mean}");
    }

    #[test]
    fn uniform_noise_is_centered() {
        let sp = space(2);
        let s = sample_standard(&sp, 1_000_000, 4);
        let model = NoiseModel::bounded_uniform(0.3);
        let y = observe(&sp, &Target::Zero, &s, &model, 12).unwrap();
        let n = y.len() as f64;
        let mean = y.iter().sum::<f64>() / n;
        let sd = 0.3 / 3.0f64.sqrt();
        assert!(mean.abs() < 3.0 * sd / n.sqrt(), "mean = {mean}");
    }

    #[test]
    fn bias_only_shifts_by_h() {
        let sp = space(3);
        let s = sample_standard(&sp, 100, 6);
        let model = NoiseModel::noiseless().with_bias(Target::Runge);
        let y = observe(&sp, &Target::Exp, &s, &model, 1).unwrap();
        for (yi, x) in y.iter().zip(&s.points) {
            let want = x[0].exp() + 1.0 / (1.0 + 25.0 * x[0] * x[0]);
            assert!((yi - want).abs() < 1e-15);
        }
    }

    #[test]
    fn draws_keyed_by_seed_and_index_not_points() {
        let sp = space(2);
        let a = sample_standard(&sp, 200, 7);
        let b = sample_standard(&sp, 200, 8); // different points
        let model = NoiseModel::gaussian(1.0);
        let ya = observe(&sp, &Target::Zero, &a, &model, 42).unwrap();
        let yb = observe(&sp, &Target::Zero, &b, &model, 42).unwrap();
        assert_eq!(ya, yb, "η must depend only on (seed, index)");
        let yc = observe(&sp, &Target::Zero, &a, &model, 43).unwrap();
        assert_ne!(ya, yc);
        // Re-running is bit-identical.
        let ya2 = observe(&sp, &Target::Zero, &a, &model, 42).unwrap();
        assert_eq!(ya, ya2);
    }

    #[test]
    fn bound_resolution() {
        let sp = space(3);
        let mut m = NoiseModel::bounded_uniform(0.1).with_bias(Target::Exp);
        let d = m.resolve_bound(&sp).unwrap().unwrap();
        assert!((d - (1.0f64.exp() + 0.1)).abs() < 1e-9, "D = {d}");
        let mut g = NoiseModel::gaussian(0.2);
        assert_eq!(g.resolve_bound(&sp).unwrap(), None);
        let mut z = NoiseModel::noiseless();
        assert_eq!(z.resolve_bound(&sp).unwrap(), Some(0.0));
    }

    #[test]
    fn parsing_stochastic() {
        assert_eq!("none".parse::<Stochastic>().unwrap(), Stochastic::None);
        assert_eq!(
            "uniform:0.25".parse::<Stochastic>().unwrap(),
            Stochastic::BoundedUniform { a: 0.25 }
        );
        assert_eq!(
            "gaussian:0.5".parse::<Stochastic>().unwrap(),
            Stochastic::Gaussian { sigma: 0.5 }
        );
        assert!("gaussian:-1".parse::<Stochastic>().is_err());
        assert!("laplace:1".parse::<Stochastic>().is_err());
    }

    #[test]
    fn fitted_noise_error_scales_with_sigma_squared() {
        // u ≡ 0, h ≡ 0: the fitted coefficients are pure noise and their
        // squared norm is the squared L²(ρ) error (Parseval). The mean
        // over repetitions must scale like σ², i.e. log-log slope 2.
        let sp = space(5);
        let sigmas = [0.1, 0.2, 0.4];
        let mut log_mse = Vec::new();
        for (si, &sigma) in sigmas.iter().enumerate() {
            let model = NoiseModel::gaussian(sigma);
            let mut total = 0.0;
            let reps = 60;
            for rep in 0..reps {
                let seed = Stream::derive(&[tag::REPETITION, 900, si as u64, rep]);
                let s = sample_optimal(&sp, 400, seed, Kernel::Auto).unwrap();
                let y = observe(&sp, &Target::Zero, &s, &model, seed ^ 0xa5a5).unwrap();
                let f = fit(&sp, &s, &y, Variant::Plain).unwrap();
                total += f.coefficients.iter().map(|c| c * c).sum::<f64>();
            }
            log_mse.push((total / reps as f64).ln());
        }
        // Least-squares slope of ln MSE against ln σ over the three points.
        let xs: Vec<f64> = sigmas.iter().map(|s| s.ln()).collect();
        let xbar = xs.iter().sum::<f64>() / 3.0;
        let ybar = log_mse.iter().sum::<f64>() / 3.0;
        let num: f64 = xs
            .iter()
            .zip(&log_mse)
            .map(|(x, y)| (x - xbar) * (y - ybar))
            .sum();
        let den: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
        let slope = num / den;
        assert!((slope - 2.0).abs() < 0.3, "slope = {slope}");
    }
}
