//! Built-in target functions for fits and experiments.
//!
//! A small closed registry (no expression parsing): the constant zero,
//! `exp(x_1 + … + x_d)`, the Runge bump `1/(1 + 25‖x‖²)`, and arbitrary
//! members of the approximation space given by their coefficient vector in
//! the orthonormal basis. Targets are named by strings (`zero`, `exp`,
//! `runge`, `inVm:c0,c1,...`) so experiment configs can carry them.

use crate::measure::ApproximationSpace;
use crate::rng::{tag, Stream};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// A target function on the tensor-product domain of a space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Target {
    /// f ≡ 0.
    Zero,
    /// f(x) = exp(x_1 + … + x_d).
    Exp,
    /// f(x) = 1 / (1 + 25 ‖x‖²).
    Runge,
    /// f = Σ_j c_j Φ_j in the orthonormal basis of a space. Shorter
    /// coefficient vectors are padded with zeros at evaluation time.
    InSpace(Vec<f64>),
}

impl Target {
    /// Evaluate at a point of the space's domain.
    pub fn eval(&self, space: &ApproximationSpace, x: &[f64]) -> Result<f64> {
        if x.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: x.len(),
            });
        }
        match self {
            Target::Zero => Ok(0.0),
            Target::Exp => Ok(x.iter().sum::<f64>().exp()),
            Target::Runge => Ok(1.0 / (1.0 + 25.0 * x.iter().map(|t| t * t).sum::<f64>())),
            Target::InSpace(c) => {
                if c.len() > space.size() {
                    return Err(Error::LengthMismatch {
                        what: "in-space coefficients",
                        expected: space.size(),
                        got: c.len(),
                    });
                }
                let vals = space.eval_tensor_basis(x)?;
                Ok(vals.iter().zip(c).map(|(v, ci)| v * ci).sum())
            }
        }
    }

    /// Evaluate at every point of a list (e.g. the points of a sample).
    pub fn eval_all(&self, space: &ApproximationSpace, points: &[Vec<f64>]) -> Result<Vec<f64>> {
        points.iter().map(|x| self.eval(space, x)).collect()
    }

    /// Estimated sup norm over the working box of the space (the true
    /// support for bounded families, the truncation box for Gaussian
    /// coordinates). Dense grid in one dimension; corners plus a seeded
    /// uniform scatter otherwise. An estimate from below, adequate for
    /// noise bounds and truncation levels.
    pub fn sup_norm_estimate(&self, space: &ApproximationSpace) -> Result<f64> {
        if let Target::Zero = self {
            return Ok(0.0);
        }
        let d = space.dim();
        let boxes: Vec<(f64, f64)> = space
            .families()
            .iter()
            .zip(space.degree_profile())
            .map(|(&fam, &deg)| fam.working_support(deg))
            .collect();
        let mut best = 0.0f64;
        let mut consider = |x: &[f64]| -> Result<()> {
            let v = self.eval(space, x)?.abs();
            if v > best {
                best = v;
            }
            Ok(())
        };
        if d == 1 {
            let (lo, hi) = boxes[0];
            let n = 100_000;
            for i in 0..=n {
                let t = lo + (hi - lo) * i as f64 / n as f64;
                consider(&[t])?;
            }
        } else {
            // All corners (d ≤ 20 keeps this finite in practice), the
            // center, and a fixed-seed uniform scatter over the box.
            if d <= 20 {
                for mask in 0u64..(1u64 << d) {
                    let x: Vec<f64> = (0..d)
                        .map(|q| {
                            if mask >> q & 1 == 1 {
                                boxes[q].1
                            } else {
                                boxes[q].0
                            }
                        })
                        .collect();
                    consider(&x)?;
                }
            }
            let center: Vec<f64> = boxes.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect();
            consider(&center)?;
            let mut stream = Stream::from_key(&[tag::TARGET, 0x5355_5045]);
            for _ in 0..100_000 {
                let x: Vec<f64> = boxes
                    .iter()
                    .map(|&(lo, hi)| lo + (hi - lo) * stream.next_open01())
                    .collect();
                consider(&x)?;
            }
        }
        Ok(best)
    }

    /// A random in-space target with standard normal coefficients, for
    /// reproduction experiments.
    pub fn random_in_space(space: &ApproximationSpace, seed: u64) -> Target {
        let mut stream = Stream::from_key(&[tag::TARGET, seed]);
        Target::InSpace(
            (0..space.size())
                .map(|_| stream.next_standard_normal())
                .collect(),
        )
    }

    /// Registry name (parses back via `FromStr`).
    pub fn name(&self) -> String {
        match self {
            Target::Zero => "zero".into(),
            Target::Exp => "exp".into(),
            Target::Runge => "runge".into(),
            Target::InSpace(c) => {
                let coeffs: Vec<String> = c.iter().map(|v| format!("{v}")).collect();
                format!("inVm:{}", coeffs.join(","))
            }
        }
    }
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.name())
    }
}

impl std::str::FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => return Ok(Target::Zero),
            "exp" => return Ok(Target::Exp),
            "runge" => return Ok(Target::Runge),
            _ => {}
        }
        let rest = s
            .strip_prefix("inVm:")
            .or_else(|| s.strip_prefix("invm:"))
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown target '{s}' (expected zero, exp, runge, or inVm:c0,c1,...)"
                ))
            })?;
        let coeffs: Vec<f64> = rest
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::config(format!("bad coefficient '{tok}' in '{s}'")))
            })
            .collect::<Result<_>>()?;
        if coeffs.is_empty() {
            return Err(Error::config("inVm target needs at least one coefficient"));
        }
        Ok(Target::InSpace(coeffs))
    }
}

impl TryFrom<String> for Target {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Target> for String {
    fn from(t: Target) -> String {
        t.name()
    }
}
