//! Univariate orthonormal polynomial families and their measures.
//!
//! Each family fixes a probability measure ρ on its support and the basis
//! `{φ_0, φ_1, …}` that is orthonormal in L²(ρ) with φ_0 ≡ 1:
//!
//! * `legendre_uniform` — ρ = dt/2 on [-1, 1], φ_j = sqrt(2j+1) P_j with P_j
//!   the classical Legendre polynomials (P_j(1) = 1), so ‖φ_j‖_∞ = sqrt(2j+1);
//! * `chebyshev_arcsine` — ρ = dt/(π sqrt(1-t²)) on (-1, 1), φ_0 = 1 and
//!   φ_j = sqrt(2) T_j for j ≥ 1, so ‖φ_j‖_∞ ≤ sqrt(2);
//! * `hermite_gaussian` — ρ the standard Gaussian, φ_j the orthonormal
//!   probabilists' Hermite polynomials (unbounded on ℝ).
//!
//! Besides evaluation, each family exposes its density, the sup-norm bound
//! used by rejection-sampling envelopes, and the weighted square primitive
//! `P_j(t) = ∫_{inf supp}^t ρ(s) φ_j(s)² ds`, the CDF building block of
//! inverse-transform sampling.

use crate::quadrature;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisFamily {
    LegendreUniform,
    ChebyshevArcsine,
    HermiteGaussian,
}

impl fmt::Display for BasisFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for BasisFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "legendre_uniform" | "uniform" | "legendre" => Ok(BasisFamily::LegendreUniform),
            "chebyshev_arcsine" | "chebyshev" | "arcsine" => Ok(BasisFamily::ChebyshevArcsine),
            "hermite_gaussian" | "gaussian" | "hermite" => Ok(BasisFamily::HermiteGaussian),
            other => Err(Error::config(format!("unknown basis family '{other}'"))),
        }
    }
}

impl BasisFamily {
    pub const ALL: [BasisFamily; 3] = [
        BasisFamily::LegendreUniform,
        BasisFamily::ChebyshevArcsine,
        BasisFamily::HermiteGaussian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BasisFamily::LegendreUniform => "legendre_uniform",
            BasisFamily::ChebyshevArcsine => "chebyshev_arcsine",
            BasisFamily::HermiteGaussian => "hermite_gaussian",
        }
    }

    /// Support of ρ as a closed interval; ±∞ for the Gaussian line.
    pub fn support(self) -> (f64, f64) {
        match self {
            BasisFamily::LegendreUniform | BasisFamily::ChebyshevArcsine => (-1.0, 1.0),
            BasisFamily::HermiteGaussian => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn is_bounded(self) -> bool {
        !matches!(self, BasisFamily::HermiteGaussian)
    }

    pub fn contains(self, t: f64) -> bool {
        let (lo, hi) = self.support();
        t >= lo && t <= hi
    }

    /// Density of ρ with respect to Lebesgue measure; zero outside a bounded
    /// support, +∞ at the arcsine endpoints where the density diverges.
    pub fn density(self, t: f64) -> f64 {
        match self {
            BasisFamily::LegendreUniform => {
                if (-1.0..=1.0).contains(&t) {
                    0.5
                } else {
                    0.0
                }
            }
            BasisFamily::ChebyshevArcsine => {
                if !(-1.0..=1.0).contains(&t) {
                    0.0
                } else {
                    1.0 / (std::f64::consts::PI * (1.0 - t * t).sqrt())
                }
            }
            BasisFamily::HermiteGaussian => {
                (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt()
            }
        }
    }

    /// Evaluate φ_0 … φ_{j_max} at `t` into `out` (length j_max + 1).
    /// No domain check; callers on the hot path guarantee membership.
    pub fn eval_into(self, t: f64, out: &mut [f64]) {
        let jmax = out.len() - 1;
        match self {
            BasisFamily::LegendreUniform => {
                out[0] = 1.0;
                if jmax >= 1 {
                    out[1] = t;
                }
                for j in 2..=jmax {
                    let jf = j as f64;
                    out[j] = ((2.0 * jf - 1.0) * t * out[j - 1] - (jf - 1.0) * out[j - 2]) / jf;
                }
                for (j, v) in out.iter_mut().enumerate() {
                    *v *= ((2 * j + 1) as f64).sqrt();
                }
            }
            BasisFamily::ChebyshevArcsine => {
                out[0] = 1.0;
                if jmax >= 1 {
                    out[1] = t;
                }
                for j in 2..=jmax {
                    out[j] = 2.0 * t * out[j - 1] - out[j - 2];
                }
                let s = std::f64::consts::SQRT_2;
                for v in out.iter_mut().skip(1) {
                    *v *= s;
                }
            }
            BasisFamily::HermiteGaussian => {
                out[0] = 1.0;
                if jmax >= 1 {
                    out[1] = t;
                }
                for j in 1..jmax {
                    let jf = j as f64;
                    out[j + 1] = (t * out[j] - jf.sqrt() * out[j - 1]) / (jf + 1.0).sqrt();
                }
            }
        }
    }

    /// Evaluate `[φ_0(t), …, φ_{j_max}(t)]`, checking the domain.
    pub fn eval_basis(self, j_max: usize, t: f64) -> Result<Vec<f64>> {
        if !self.contains(t) || t.is_nan() {
            return Err(Error::OutOfSupport {
                family: self.name(),
                value: t,
            });
        }
        let mut out = vec![0.0; j_max + 1];
        self.eval_into(t, &mut out);
        Ok(out)
    }

    /// ‖φ_j‖_{L∞} on the support; an error for the unbounded Gaussian family.
    pub fn sup_norm_bound(self, j: usize) -> Result<f64> {
        match self {
            BasisFamily::LegendreUniform => Ok(((2 * j + 1) as f64).sqrt()),
            BasisFamily::ChebyshevArcsine => Ok(if j == 0 {
                1.0
            } else {
                std::f64::consts::SQRT_2
            }),
            BasisFamily::HermiteGaussian => Err(Error::Unbounded {
                op: "sup_norm_bound",
                family: self.name(),
            }),
        }
    }

    /// Truncation radius for Gaussian-line numerics with degrees up to `j`:
    /// the mass of ρ·φ_j² outside [-R, R] is far below 1e-13 (checked in
    /// tests), so tables and quadrature may restrict to the interval.
    pub fn truncation_radius(self, j: usize) -> f64 {
        match self {
            BasisFamily::HermiteGaussian => 10.0f64.max((4.0 * j as f64 + 4.0).sqrt() + 8.0),
            _ => 1.0,
        }
    }

    /// Finite working support for degree-`j` numerics: the true support for
    /// bounded families, [-R_j, R_j] on the Gaussian line.
    pub fn working_support(self, j: usize) -> (f64, f64) {
        if self.is_bounded() {
            self.support()
        } else {
            let r = self.truncation_radius(j);
            (-r, r)
        }
    }

    /// Weighted square primitive `P_j(t) = ∫_{inf supp}^{t} ρ(s) φ_j(s)² ds`:
    /// a CDF in `t`, increasing from 0 to 1. Inputs beyond the support clamp
    /// to the endpoints.
    pub fn weighted_square_primitive(self, j: usize, t: f64) -> Result<f64> {
        if t.is_nan() {
            return Err(Error::OutOfSupport {
                family: self.name(),
                value: t,
            });
        }
        match self {
            BasisFamily::ChebyshevArcsine => {
                // Trigonometric closed form: with a = arccos(t),
                // ∫ 2cos²(jθ)/π dθ telescopes to 1 - a/π - sin(2ja)/(2πj).
                let tc = t.clamp(-1.0, 1.0);
                let a = tc.acos();
                if j == 0 {
                    Ok(1.0 - a / std::f64::consts::PI)
                } else {
                    let jf = j as f64;
                    Ok(1.0
                        - a / std::f64::consts::PI
                        - (2.0 * jf * a).sin() / (2.0 * std::f64::consts::PI * jf))
                }
            }
            BasisFamily::LegendreUniform => {
                let tc = t.clamp(-1.0, 1.0);
                // ρ φ_j² is a polynomial of degree 2j: a (j+1)-node
                // Gauss–Legendre rule on [-1, t] integrates it exactly.
                let mut buf = vec![0.0; j + 1];
                let val = quadrature::composite_gl(-1.0, tc, 2.0, j + 1, |s| {
                    self.eval_into(s, &mut buf);
                    0.5 * buf[j] * buf[j]
                });
                Ok(val.clamp(0.0, 1.0))
            }
            BasisFamily::HermiteGaussian => {
                let r = self.truncation_radius(j);
                if t <= -r {
                    return Ok(0.0);
                }
                let hi = t.min(r);
                let mut buf = vec![0.0; j + 1];
                // Panels short relative to the oscillation wavelength
                // ~2π/sqrt(2j) keep 16-node panels accurate to ~1e-14.
                let panel = (1.5 / ((j as f64) + 1.0).sqrt()).min(0.25);
                let val = quadrature::composite_gl(-r, hi, panel, 16, |s| {
                    self.eval_into(s, &mut buf);
                    self.density(s) * buf[j] * buf[j]
                });
                Ok(val.clamp(0.0, 1.0))
            }
        }
    }

    /// Draw from ρ by inverting its CDF at `u ∈ (0, 1)`.
    pub fn sample_reference(self, u: f64) -> f64 {
        debug_assert!(u > 0.0 && u < 1.0);
        match self {
            BasisFamily::LegendreUniform => 2.0 * u - 1.0,
            BasisFamily::ChebyshevArcsine => (std::f64::consts::PI * (u - 0.5)).sin(),
            BasisFamily::HermiteGaussian => {
                unreachable!("Gaussian reference draws use two uniforms; see Stream")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::family_rule;

    const FAMS: [BasisFamily; 3] = BasisFamily::ALL;

    #[test]
    fn pinned_evaluations() {
        let v = BasisFamily::LegendreUniform.eval_basis(1, 1.0).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-15);
        assert!((v[1] - 3.0f64.sqrt()).abs() < 1e-15); // 1.7320508…
        let h = BasisFamily::HermiteGaussian.eval_basis(2, 2.0).unwrap();
        assert!((h[0] - 1.0).abs() < 1e-15);
        assert!((h[1] - 2.0).abs() < 1e-15);
        assert!((h[2] - 3.0 / 2.0f64.sqrt()).abs() < 1e-15); // 2.1213203…
    }

    #[test]
    fn pinned_densities() {
        assert!(
            (BasisFamily::ChebyshevArcsine.density(0.0) - 1.0 / std::f64::consts::PI).abs() < 1e-15
        );
        assert!((BasisFamily::HermiteGaussian.density(0.0) - 0.3989422804014327).abs() < 1e-15);
        assert_eq!(BasisFamily::LegendreUniform.density(1.5), 0.0);
        assert_eq!(BasisFamily::ChebyshevArcsine.density(-2.0), 0.0);
        assert!(BasisFamily::ChebyshevArcsine.density(1.0).is_infinite());
    }

    #[test]
    fn pinned_sup_norm_bounds() {
        assert!(
            (BasisFamily::ChebyshevArcsine.sup_norm_bound(5).unwrap() - 2.0f64.sqrt()).abs()
                < 1e-15
        );
        assert!(
            (BasisFamily::LegendreUniform.sup_norm_bound(2).unwrap() - 5.0f64.sqrt()).abs() < 1e-15
        );
        assert!((BasisFamily::LegendreUniform.sup_norm_bound(0).unwrap() - 1.0).abs() < 1e-15);
        assert!(BasisFamily::HermiteGaussian.sup_norm_bound(3).is_err());
    }

    #[test]
    fn pinned_primitives() {
        let leg = BasisFamily::LegendreUniform;
        assert!((leg.weighted_square_primitive(0, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((leg.weighted_square_primitive(1, 0.0).unwrap() - 0.5).abs() < 1e-12);
        // ∫_{-1}^{1/2} (1/2)(3s²) ds = (1/2)[s³] = 0.5625
        assert!((leg.weighted_square_primitive(1, 0.5).unwrap() - 0.5625).abs() < 1e-12);
    }

    #[test]
    fn eval_rejects_out_of_support() {
        assert!(BasisFamily::LegendreUniform.eval_basis(3, 1.0001).is_err());
        assert!(BasisFamily::ChebyshevArcsine
            .eval_basis(3, -1.0001)
            .is_err());
        assert!(BasisFamily::HermiteGaussian.eval_basis(3, 1e6).is_ok());
    }

    #[test]
    fn orthonormality_under_own_measure() {
        // Gauss rules with 25 nodes are exact for products up to degree 49.
        for fam in FAMS {
            let rule = family_rule(fam, 25);
            let jmax = 20;
            let mut vals = vec![vec![0.0; jmax + 1]; rule.nodes.len()];
            for (i, &x) in rule.nodes.iter().enumerate() {
                fam.eval_into(x, &mut vals[i]);
            }
            for j in 0..=jmax {
                for k in j..=jmax {
                    let mut s = 0.0;
                    for (i, &w) in rule.weights.iter().enumerate() {
                        s += w * vals[i][j] * vals[i][k];
                    }
                    let expect = if j == k { 1.0 } else { 0.0 };
                    assert!((s - expect).abs() < 1e-10, "{fam}: <φ_{j}, φ_{k}> = {s}");
                }
            }
        }
    }

    #[test]
    fn recurrence_matches_closed_forms() {
        let grid: Vec<f64> = (0..41).map(|i| -1.0 + i as f64 / 20.0).collect();
        for &t in &grid {
            let l = BasisFamily::LegendreUniform.eval_basis(3, t).unwrap();
            let exp_l = [
                1.0,
                3.0f64.sqrt() * t,
                5.0f64.sqrt() * 0.5 * (3.0 * t * t - 1.0),
                7.0f64.sqrt() * 0.5 * (5.0 * t * t * t - 3.0 * t),
            ];
            let c = BasisFamily::ChebyshevArcsine.eval_basis(3, t).unwrap();
            let s2 = std::f64::consts::SQRT_2;
            let exp_c = [
                1.0,
                s2 * t,
                s2 * (2.0 * t * t - 1.0),
                s2 * (4.0 * t * t * t - 3.0 * t),
            ];
            let h = BasisFamily::HermiteGaussian.eval_basis(3, 2.0 * t).unwrap();
            let ht = 2.0 * t;
            let exp_h = [
                1.0,
                ht,
                (ht * ht - 1.0) / 2.0f64.sqrt(),
                (ht * ht * ht - 3.0 * ht) / 6.0f64.sqrt(),
            ];
            for j in 0..=3 {
                assert!((l[j] - exp_l[j]).abs() < 1e-12);
                assert!((c[j] - exp_c[j]).abs() < 1e-12);
                assert!((h[j] - exp_h[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn primitives_are_cdfs() {
        for fam in FAMS {
            for j in [0usize, 1, 2, 5, 11] {
                let (lo, hi) = fam.working_support(j);
                let top = fam.weighted_square_primitive(j, hi).unwrap();
                assert!((top - 1.0).abs() < 1e-10, "{fam} j={j}: P(sup) = {top}");
                let bottom = fam.weighted_square_primitive(j, lo).unwrap();
                assert!(bottom.abs() < 1e-12);
                let mut prev = 0.0;
                for i in 0..=40 {
                    let t = lo + (hi - lo) * i as f64 / 40.0;
                    let p = fam.weighted_square_primitive(j, t).unwrap();
                    assert!(p >= prev - 1e-12, "{fam} j={j}: not monotone at {t}");
                    prev = p;
                }
            }
        }
    }

    #[test]
    fn primitive_matches_independent_quadrature() {
        // Fine composite quadrature of the integrand, independent of the
        // closed forms and node-count choices in the implementation. The
        // arcsine family has its own endpoint-singularity-free oracle below.
        for fam in [BasisFamily::LegendreUniform, BasisFamily::HermiteGaussian] {
            for j in [0usize, 1, 3, 7] {
                let (lo, hi) = fam.working_support(j);
                for frac in [0.15, 0.5, 0.62, 0.97] {
                    let t = lo + (hi - lo) * frac;
                    let mut buf = vec![0.0; j + 1];
                    let oracle = quadrature::composite_gl(lo, t, 0.05, 10, |s| {
                        fam.eval_into(s, &mut buf);
                        fam.density(s) * buf[j] * buf[j]
                    });
                    let got = fam.weighted_square_primitive(j, t).unwrap();
                    assert!(
                        (got - oracle).abs() < 1e-10,
                        "{fam} j={j} t={t}: {got} vs oracle {oracle}"
                    );
                }
            }
        }
    }

    #[test]
    fn chebyshev_primitive_matches_angular_oracle() {
        // Independent check of the arcsine closed form via quadrature in the
        // θ variable, where the substitution t = cos θ removes the endpoint
        // singularity: ∫_a^π φ_j(cos θ)² dθ / π with a = arccos t.
        let fam = BasisFamily::ChebyshevArcsine;
        for j in [0usize, 1, 2, 6, 13] {
            for t in [-0.97, -0.7, 0.0, 0.3, 0.9, 0.999] {
                let a = f64::acos(t);
                let oracle = quadrature::composite_gl(a, std::f64::consts::PI, 0.01, 8, |th| {
                    let phi2 = if j == 0 {
                        1.0
                    } else {
                        2.0 * (j as f64 * th).cos().powi(2)
                    };
                    phi2 / std::f64::consts::PI
                });
                let got = fam.weighted_square_primitive(j, t).unwrap();
                assert!((got - oracle).abs() < 1e-12, "j={j} t={t}");
            }
        }
    }

    #[test]
    fn gaussian_truncation_tail_is_negligible() {
        // Mass of ρ·φ_j² on [R, R+10] (the dominated tail) must sit far
        // below the 1e-13 budget.
        let fam = BasisFamily::HermiteGaussian;
        for j in [0usize, 5, 40] {
            let r = fam.truncation_radius(j);
            let mut buf = vec![0.0; j + 1];
            let tail = quadrature::composite_gl(r, r + 10.0, 0.1, 12, |s| {
                fam.eval_into(s, &mut buf);
                fam.density(s) * buf[j] * buf[j]
            });
            assert!(2.0 * tail < 1e-14, "j={j}: tail {tail}");
        }
    }

    #[test]
    fn density_normalizes_under_family_rule() {
        for fam in FAMS {
            let rule = family_rule(fam, 30);
            let total: f64 = rule.weights.iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "{fam}");
        }
        // Cross-check the Gaussian density against plain Lebesgue quadrature.
        let fam = BasisFamily::HermiteGaussian;
        let mass = quadrature::composite_gl(-10.0, 10.0, 0.25, 12, |s| fam.density(s));
        assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn names_round_trip() {
        for fam in FAMS {
            let parsed: BasisFamily = fam.name().parse().unwrap();
            assert_eq!(parsed, fam);
        }
        assert!("legendre_uniformx".parse::<BasisFamily>().is_err());
    }
}
