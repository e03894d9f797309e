//! Tensor-product approximation spaces, the Christoffel function, and the
//! optimal sampling measure.
//!
//! For a downward-closed Λ with |Λ| = m over families (ρ_1, …, ρ_d), the
//! space is V = span{Φ_ν = ∏_q φ_{ν_q}}. The (inverse) Christoffel function
//!
//! ```text
//! k(x) = Σ_{ν∈Λ} Φ_ν(x)²
//! ```
//!
//! defines the optimal sampling density dμ = (k/m) dρ and the matching
//! weight w = m/k, with w·k ≡ m and ∫ k dρ = m. Because Λ is downward
//! closed and the univariate bases are orthonormal, μ factorizes into
//! per-coordinate conditionals, each a convex mixture of the densities
//! ρ_q·φ_k² — the basis of both samplers.

use crate::basis::BasisFamily;
use crate::index_set::IndexSet;
use crate::rng::Stream;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// A polynomial space: per-coordinate measure/basis families plus a
/// downward-closed index set. Construction validates dimensions; all
/// evaluation paths then work on flattened indices.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "SpaceDef", into = "SpaceDef")]
pub struct ApproximationSpace {
    families: Vec<BasisFamily>,
    indices: IndexSet,
    flat: Vec<usize>,
    profile: Vec<usize>,
}

/// Serialized form: just the defining data; caches rebuild on load.
#[derive(Serialize, Deserialize)]
struct SpaceDef {
    families: Vec<BasisFamily>,
    indices: IndexSet,
}

impl TryFrom<SpaceDef> for ApproximationSpace {
    type Error = Error;

    fn try_from(def: SpaceDef) -> Result<Self> {
        ApproximationSpace::new(def.families, def.indices)
    }
}

impl From<ApproximationSpace> for SpaceDef {
    fn from(sp: ApproximationSpace) -> Self {
        SpaceDef {
            families: sp.families,
            indices: sp.indices,
        }
    }
}

impl ApproximationSpace {
    pub fn new(families: Vec<BasisFamily>, indices: IndexSet) -> Result<Self> {
        if families.is_empty() {
            return Err(Error::invalid("at least one coordinate required"));
        }
        if families.len() != indices.dim() {
            return Err(Error::MixedDimensions(families.len(), indices.dim()));
        }
        if !indices.check_downward_closed()? {
            let witness = indices.members().first().cloned().unwrap_or_default();
            return Err(Error::NotDownwardClosed(witness));
        }
        let d = families.len();
        let mut flat = Vec::with_capacity(indices.len() * d);
        for nu in indices.members() {
            flat.extend_from_slice(nu);
        }
        let profile = indices.degree_profile();
        Ok(ApproximationSpace {
            families,
            indices,
            flat,
            profile,
        })
    }

    /// Convenience: the same family in every coordinate.
    pub fn isotropic(family: BasisFamily, indices: IndexSet) -> Result<Self> {
        let d = indices.dim();
        ApproximationSpace::new(vec![family; d], indices)
    }

    /// Univariate space with Λ = {0, …, m-1}.
    pub fn univariate(family: BasisFamily, m: usize) -> Self {
        ApproximationSpace::new(vec![family], IndexSet::univariate(m))
            .expect("univariate sets are always valid")
    }

    pub fn dim(&self) -> usize {
        self.families.len()
    }

    /// Number of basis functions m = |Λ|.
    pub fn size(&self) -> usize {
        self.indices.len()
    }

    pub fn families(&self) -> &[BasisFamily] {
        &self.families
    }

    pub fn indices(&self) -> &IndexSet {
        &self.indices
    }

    /// Per-coordinate maximal degrees λ_q.
    pub fn degree_profile(&self) -> &[usize] {
        &self.profile
    }

    /// Whether `x` lies in the support of the product measure.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(&self.families)
                .all(|(&t, fam)| fam.contains(t) && !t.is_nan())
    }

    /// Stable identifier for provenance records: digests the families and
    /// the index-set members.
    pub fn fingerprint(&self) -> u64 {
        let mut words: Vec<u64> = Vec::with_capacity(2 + self.flat.len());
        words.push(0x53_5041_4345u64); // "SPACE"
        for fam in &self.families {
            words.push(match fam {
                BasisFamily::LegendreUniform => 1,
                BasisFamily::ChebyshevArcsine => 2,
                BasisFamily::HermiteGaussian => 3,
            });
        }
        words.push(self.indices.len() as u64);
        words.extend(self.flat.iter().map(|&j| j as u64));
        Stream::derive(&words)
    }

    /// Scratch buffer for the unchecked evaluation path.
    pub fn scratch(&self) -> TensorScratch {
        let mut offsets = Vec::with_capacity(self.dim() + 1);
        let mut total = 0usize;
        for &lam in &self.profile {
            offsets.push(total);
            total += lam + 1;
        }
        offsets.push(total);
        TensorScratch {
            table: vec![0.0; total],
            offsets,
        }
    }

    /// Evaluate all Φ_ν(x) into `out` (length m); no domain checks.
    pub fn eval_tensor_into(&self, x: &[f64], scratch: &mut TensorScratch, out: &mut [f64]) {
        let d = self.dim();
        for q in 0..d {
            let (lo, hi) = (scratch.offsets[q], scratch.offsets[q + 1]);
            self.families[q].eval_into(x[q], &mut scratch.table[lo..hi]);
        }
        if d == 1 {
            for (i, v) in out.iter_mut().enumerate() {
                *v = scratch.table[self.flat[i]];
            }
            return;
        }
        for (i, v) in out.iter_mut().enumerate() {
            let nu = &self.flat[i * d..(i + 1) * d];
            let mut p = 1.0;
            for q in 0..d {
                p *= scratch.table[scratch.offsets[q] + nu[q]];
            }
            *v = p;
        }
    }

    /// Evaluate `[Φ_ν(x)]_{ν∈Λ}` with domain checking.
    pub fn eval_tensor_basis(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        let mut scratch = self.scratch();
        let mut out = vec![0.0; self.size()];
        self.eval_tensor_into(x, &mut scratch, &mut out);
        Ok(out)
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        for (q, (&t, fam)) in x.iter().zip(&self.families).enumerate() {
            if !fam.contains(t) || t.is_nan() {
                let _ = q;
                return Err(Error::OutOfSupport {
                    family: fam.name(),
                    value: t,
                });
            }
        }
        Ok(())
    }

    /// Inverse Christoffel function k(x) = Σ_ν Φ_ν(x)².
    pub fn christoffel(&self, x: &[f64]) -> Result<f64> {
        let vals = self.eval_tensor_basis(x)?;
        Ok(vals.iter().map(|v| v * v).sum())
    }

    /// Optimal weight w(x) = m / k(x).
    pub fn optimal_weight(&self, x: &[f64]) -> Result<f64> {
        Ok(self.size() as f64 / self.christoffel(x)?)
    }

    /// Density of the reference product measure ρ at `x` (Lebesgue).
    pub fn reference_density(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        Ok(x.iter()
            .zip(&self.families)
            .map(|(&t, fam)| fam.density(t))
            .product())
    }

    /// Density of the optimal measure μ = (k/m) ρ at `x` (Lebesgue).
    pub fn optimal_density(&self, x: &[f64]) -> Result<f64> {
        let k = self.christoffel(x)?;
        Ok(k / self.size() as f64 * self.reference_density(x)?)
    }

    /// Degree-occupation counts of coordinate `q`: entry k holds
    /// #{ν ∈ Λ : ν_q = k} / m, for k = 0, …, λ_q. Nonzero everywhere by
    /// downward closure; sums to 1.
    pub fn coordinate_counts(&self, q: usize) -> Vec<f64> {
        let d = self.dim();
        let m = self.size();
        let mut counts = vec![0.0; self.profile[q] + 1];
        for i in 0..m {
            counts[self.flat[i * d + q]] += 1.0;
        }
        for c in &mut counts {
            *c /= m as f64;
        }
        counts
    }

    /// Marginal density ψ_q of the optimal measure in coordinate `q`
    /// (all other coordinates integrated out under orthonormality):
    /// ψ_q(t) = ρ_q(t) Σ_k c_k φ_k(t)² with the occupation counts c_k.
    pub fn marginal(&self, q: usize, t: f64) -> Result<f64> {
        if q >= self.dim() {
            return Err(Error::invalid(format!("coordinate {q} out of range")));
        }
        ConditionalMixture {
            family: self.families[q],
            coeffs: self.coordinate_counts(q),
        }
        .density(t)
    }

    /// Conditional mixture of coordinate `q` (0-based) given the first `q`
    /// coordinates of a draw. With α_ν = ∏_{r<q} φ_{ν_r}(x_r)², the
    /// conditional density of x_q is ρ_q(t) Σ_k c_k φ_k(t)² where
    /// c_k = Σ_{ν_q = k} α_ν / Σ_ν α_ν. For q = 0 this is the occupation
    /// mixture (α ≡ 1).
    pub fn conditional_mixture(&self, q: usize, prefix: &[f64]) -> Result<ConditionalMixture> {
        if q >= self.dim() {
            return Err(Error::invalid(format!("coordinate {q} out of range")));
        }
        if prefix.len() != q {
            return Err(Error::LengthMismatch {
                what: "conditional prefix",
                expected: q,
                got: prefix.len(),
            });
        }
        let family = self.families[q];
        if q == 0 {
            return Ok(ConditionalMixture {
                family,
                coeffs: self.coordinate_counts(0),
            });
        }
        for (r, &t) in prefix.iter().enumerate() {
            if !self.families[r].contains(t) || t.is_nan() {
                return Err(Error::OutOfSupport {
                    family: self.families[r].name(),
                    value: t,
                });
            }
        }
        let d = self.dim();
        let m = self.size();
        // Per-coordinate value tables for the prefix.
        let mut tables: Vec<Vec<f64>> = Vec::with_capacity(q);
        for r in 0..q {
            let mut tab = vec![0.0; self.profile[r] + 1];
            self.families[r].eval_into(prefix[r], &mut tab);
            tables.push(tab);
        }
        let mut coeffs = vec![0.0; self.profile[q] + 1];
        let mut total = 0.0;
        for i in 0..m {
            let nu = &self.flat[i * d..(i + 1) * d];
            let mut alpha = 1.0;
            for r in 0..q {
                let v = tables[r][nu[r]];
                alpha *= v * v;
            }
            coeffs[nu[q]] += alpha;
            total += alpha;
        }
        if !(total > 0.0) {
            // All prefix factors vanished (measure-zero event); fall back to
            // the occupation mixture, which is still a valid conditional a.e.
            return Ok(ConditionalMixture {
                family,
                coeffs: self.coordinate_counts(q),
            });
        }
        for c in &mut coeffs {
            *c /= total;
        }
        Ok(ConditionalMixture { family, coeffs })
    }

    /// Fresh incremental prefix state for one sequential draw (α_ν ≡ 1).
    pub fn prefix_state(&self) -> PrefixState {
        PrefixState {
            alphas: vec![1.0; self.size()],
            absorbed: 0,
        }
    }

    /// Absorb the sampled value of coordinate `state.absorbed`, updating
    /// every α_ν by the factor φ_{ν_r}(t)². Equivalent to recomputing the
    /// products from the full prefix (same multiplication order), so the
    /// downstream mixtures are bit-identical to `conditional_mixture`.
    pub fn absorb_coordinate(&self, state: &mut PrefixState, t: f64) -> Result<()> {
        let r = state.absorbed;
        if r >= self.dim() {
            return Err(Error::invalid("prefix state already saturated"));
        }
        if !self.families[r].contains(t) || t.is_nan() {
            return Err(Error::OutOfSupport {
                family: self.families[r].name(),
                value: t,
            });
        }
        let mut tab = vec![0.0; self.profile[r] + 1];
        self.families[r].eval_into(t, &mut tab);
        let d = self.dim();
        for (i, alpha) in state.alphas.iter_mut().enumerate() {
            let v = tab[self.flat[i * d + r]];
            *alpha *= v * v;
        }
        state.absorbed += 1;
        Ok(())
    }

    /// Conditional mixture of the next unabsorbed coordinate. Matches
    /// `conditional_mixture(state.absorbed, prefix)` exactly.
    pub fn conditional_mixture_from_state(
        &self,
        state: &PrefixState,
    ) -> Result<ConditionalMixture> {
        let q = state.absorbed;
        if q >= self.dim() {
            return Err(Error::invalid("prefix state already saturated"));
        }
        let family = self.families[q];
        if q == 0 {
            return Ok(ConditionalMixture {
                family,
                coeffs: self.coordinate_counts(0),
            });
        }
        let d = self.dim();
        let mut coeffs = vec![0.0; self.profile[q] + 1];
        let mut total = 0.0;
        for (i, &alpha) in state.alphas.iter().enumerate() {
            coeffs[self.flat[i * d + q]] += alpha;
            total += alpha;
        }
        if !(total > 0.0) {
            return Ok(ConditionalMixture {
                family,
                coeffs: self.coordinate_counts(q),
            });
        }
        for c in &mut coeffs {
            *c /= total;
        }
        Ok(ConditionalMixture { family, coeffs })
    }
}

/// Running prefix products α_ν = ∏_{r<absorbed} φ_{ν_r}(x_r)² for one
/// sequential draw.
#[derive(Clone, Debug)]
pub struct PrefixState {
    alphas: Vec<f64>,
    absorbed: usize,
}

impl PrefixState {
    /// Number of coordinates absorbed so far.
    pub fn absorbed(&self) -> usize {
        self.absorbed
    }
}

/// Reusable per-point evaluation buffer (per-coordinate value tables).
#[derive(Clone, Debug)]
pub struct TensorScratch {
    table: Vec<f64>,
    offsets: Vec<usize>,
}

/// A convex mixture Σ_k c_k · (ρ φ_k²) over one coordinate's degrees:
/// the conditional (and marginal) law of a single coordinate under the
/// optimal measure.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalMixture {
    pub family: BasisFamily,
    /// c_0, …, c_λ — nonnegative, summing to 1.
    pub coeffs: Vec<f64>,
}

impl ConditionalMixture {
    pub fn max_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Mixture polynomial part Σ_k c_k φ_k(t)² (no reference density).
    pub fn square_sum(&self, t: f64) -> Result<f64> {
        let fam = self.family;
        if !fam.contains(t) || t.is_nan() {
            return Err(Error::OutOfSupport {
                family: fam.name(),
                value: t,
            });
        }
        let mut buf = vec![0.0; self.coeffs.len()];
        fam.eval_into(t, &mut buf);
        Ok(self.coeffs.iter().zip(&buf).map(|(c, v)| c * v * v).sum())
    }

    /// Lebesgue density ρ(t) Σ_k c_k φ_k(t)²; zero outside the support.
    pub fn density(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.family.support();
        if t < lo || t > hi {
            return Ok(0.0);
        }
        Ok(self.family.density(t) * self.square_sum(t)?)
    }

    /// CDF Φ(t) = Σ_k c_k P_k(t) with P_k the weighted square primitives.
    pub fn cdf(&self, t: f64) -> Result<f64> {
        let mut total = 0.0;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c != 0.0 {
                total += c * self.family.weighted_square_primitive(k, t)?;
            }
        }
        Ok(total.clamp(0.0, 1.0))
    }

    /// Rejection envelope constant M = max_k sup‖φ_k‖²_∞ over represented
    /// degrees: mixture density ≤ M·ρ pointwise, and proposals from ρ are
    /// accepted with probability exactly 1/M. Errors for unbounded families.
    pub fn envelope_constant(&self) -> Result<f64> {
        let mut m: f64 = 0.0;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c > 0.0 {
                let b = self.family.sup_norm_bound(k)?;
                m = m.max(b * b);
            }
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{family_rule, tensor_integrate};
    use crate::rng::{tag, Stream};

    fn legendre_d1_m2() -> ApproximationSpace {
        ApproximationSpace::univariate(BasisFamily::LegendreUniform, 2)
    }

    /// Λ = {(0,0), (1,0), (0,1)} over uniform [-1,1]².
    fn legendre_td21() -> ApproximationSpace {
        ApproximationSpace::isotropic(BasisFamily::LegendreUniform, IndexSet::total_degree(2, 1))
            .unwrap()
    }

    #[test]
    fn christoffel_worked_example() {
        let sp = legendre_d1_m2();
        // k(t) = 1 + 3t²: k(1) = 4, k(0.5) = 1.75.
        assert!((sp.christoffel(&[1.0]).unwrap() - 4.0).abs() < 1e-14);
        assert!((sp.christoffel(&[0.5]).unwrap() - 1.75).abs() < 1e-14);
        // w = m/k at 0.5: 2/1.75 = 8/7.
        assert!((sp.optimal_weight(&[0.5]).unwrap() - 8.0 / 7.0).abs() < 1e-14);
        // μ(0.5) = (k/m)·ρ = (1.75/2)·0.5 = 0.4375.
        assert!((sp.optimal_density(&[0.5]).unwrap() - 0.4375).abs() < 1e-14);
    }

    #[test]
    fn weight_and_density_are_consistent() {
        // w(x)·μ(x) = ρ(x) pointwise, any space.
        let sp = ApproximationSpace::isotropic(
            BasisFamily::ChebyshevArcsine,
            IndexSet::total_degree(2, 4),
        )
        .unwrap();
        let mut s = Stream::from_key(&[tag::MONTE_CARLO, 31]);
        for _ in 0..50 {
            let x = [2.0 * s.next_open01() - 1.0, 2.0 * s.next_open01() - 1.0];
            let lhs = sp.optimal_weight(&x).unwrap() * sp.optimal_density(&x).unwrap();
            let rhs = sp.reference_density(&x).unwrap();
            assert!((lhs - rhs).abs() < 1e-12 * rhs.max(1.0));
        }
    }

    #[test]
    fn christoffel_integrates_to_m() {
        // ∫ k dρ = m for tensor spaces across families and sets.
        let cases: Vec<ApproximationSpace> = vec![
            ApproximationSpace::univariate(BasisFamily::LegendreUniform, 7),
            ApproximationSpace::univariate(BasisFamily::HermiteGaussian, 5),
            legendre_td21(),
            ApproximationSpace::isotropic(
                BasisFamily::ChebyshevArcsine,
                IndexSet::hyperbolic_cross(3, 4),
            )
            .unwrap(),
            ApproximationSpace::new(
                vec![BasisFamily::LegendreUniform, BasisFamily::HermiteGaussian],
                IndexSet::total_degree(2, 3),
            )
            .unwrap(),
        ];
        for sp in cases {
            let nodes = sp.degree_profile().iter().map(|l| l + 2).max().unwrap();
            let mut scratch = sp.scratch();
            let mut vals = vec![0.0; sp.size()];
            let total = tensor_integrate(sp.families(), nodes, |x| {
                sp.eval_tensor_into(x, &mut scratch, &mut vals);
                vals.iter().map(|v| v * v).sum()
            })
            .unwrap();
            assert!(
                (total - sp.size() as f64).abs() < 1e-9,
                "space m={}: ∫k = {total}",
                sp.size()
            );
        }
    }

    #[test]
    fn occupation_counts_and_marginal() {
        let sp = legendre_td21();
        // Coordinate 0: degrees (0,1,0) across members → c = (2/3, 1/3).
        let c = sp.coordinate_counts(0);
        assert!((c[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((c[1] - 1.0 / 3.0).abs() < 1e-15);
        // ψ_1(0) = ρ(0)·(c_0·1 + c_1·3·0) = 0.5·(2/3) = 1/3.
        assert!((sp.marginal(0, 0.0).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        // ψ_1(t) = (2 + 3t²)/6 against a couple of points.
        for t in [-0.9, 0.2, 0.7] {
            let expect = (2.0 + 3.0 * t * t) / 6.0;
            assert!((sp.marginal(0, t).unwrap() - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn first_coordinate_mixture_is_occupation() {
        let sp = legendre_d1_m2();
        let mix = sp.conditional_mixture(0, &[]).unwrap();
        assert_eq!(mix.coeffs.len(), 2);
        assert!((mix.coeffs[0] - 0.5).abs() < 1e-15);
        assert!((mix.coeffs[1] - 0.5).abs() < 1e-15);
        // Its CDF is Φ(t) = t/4 + t³/4 + 1/2.
        for t in [-1.0, -0.3, 0.0, 0.5, 1.0] {
            let expect = t / 4.0 + t * t * t / 4.0 + 0.5;
            assert!((mix.cdf(t).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn conditional_mixture_worked_example() {
        let sp = legendre_td21();
        // Given x_1 = 1: α = (1, 3, 1) over {(0,0),(1,0),(0,1)} →
        // c = (4/5, 1/5) for coordinate 2.
        let mix = sp.conditional_mixture(1, &[1.0]).unwrap();
        assert!((mix.coeffs[0] - 0.8).abs() < 1e-14);
        assert!((mix.coeffs[1] - 0.2).abs() < 1e-14);
        // Given x_1 = 0: α = (1, 0, 1) → c = (1/2, 1/2).
        let mix0 = sp.conditional_mixture(1, &[0.0]).unwrap();
        assert!((mix0.coeffs[0] - 0.5).abs() < 1e-14);
        assert!((mix0.coeffs[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn incremental_state_matches_fresh_conditionals_exactly() {
        // The running-product path must be bit-identical to recomputing
        // every conditional from the prefix (same multiplication order).
        let sp = ApproximationSpace::new(
            vec![
                BasisFamily::LegendreUniform,
                BasisFamily::ChebyshevArcsine,
                BasisFamily::HermiteGaussian,
                BasisFamily::LegendreUniform,
            ],
            IndexSet::total_degree(4, 3),
        )
        .unwrap();
        let point = [0.37, -0.62, 1.4, 0.05];
        let mut state = sp.prefix_state();
        for q in 0..4 {
            let inc = sp.conditional_mixture_from_state(&state).unwrap();
            let fresh = sp.conditional_mixture(q, &point[..q]).unwrap();
            assert_eq!(inc.coeffs, fresh.coeffs, "coordinate {q}");
            assert_eq!(inc.family, fresh.family);
            if q + 1 < 4 {
                sp.absorb_coordinate(&mut state, point[q]).unwrap();
            }
        }
        assert_eq!(state.absorbed(), 3);
    }

    #[test]
    fn conditionals_telescope_to_joint_density() {
        // ∏_q cond_q(x_q | x_{<q}) = μ(x) for random points.
        let spaces = vec![
            ApproximationSpace::isotropic(
                BasisFamily::LegendreUniform,
                IndexSet::total_degree(3, 3),
            )
            .unwrap(),
            ApproximationSpace::new(
                vec![BasisFamily::ChebyshevArcsine, BasisFamily::LegendreUniform],
                IndexSet::hyperbolic_cross(2, 5),
            )
            .unwrap(),
        ];
        let mut s = Stream::from_key(&[tag::MONTE_CARLO, 77]);
        for sp in spaces {
            for _ in 0..25 {
                let x: Vec<f64> = (0..sp.dim()).map(|_| 1.8 * s.next_open01() - 0.9).collect();
                let mut product = 1.0;
                for q in 0..sp.dim() {
                    let mix = sp.conditional_mixture(q, &x[..q]).unwrap();
                    product *= mix.density(x[q]).unwrap();
                }
                let joint = sp.optimal_density(&x).unwrap();
                assert!(
                    (product - joint).abs() < 1e-12 * joint.max(1.0),
                    "telescoping failed: {product} vs {joint}"
                );
            }
        }
    }

    #[test]
    fn conditional_coeffs_normalized_and_nonnegative() {
        let sp = ApproximationSpace::isotropic(
            BasisFamily::HermiteGaussian,
            IndexSet::total_degree(3, 4),
        )
        .unwrap();
        let mut s = Stream::from_key(&[tag::MONTE_CARLO, 78]);
        for _ in 0..20 {
            let x: Vec<f64> = (0..3).map(|_| s.next_standard_normal()).collect();
            for q in 0..3 {
                let mix = sp.conditional_mixture(q, &x[..q]).unwrap();
                let sum: f64 = mix.coeffs.iter().sum();
                assert!((sum - 1.0).abs() < 1e-12);
                assert!(mix.coeffs.iter().all(|&c| c >= 0.0));
            }
        }
    }

    #[test]
    fn mixture_density_normalizes() {
        // ∫ mixture = Σ c_k ∫ ρ φ_k² = 1; checked by the family Gauss rule
        // applied to the polynomial part.
        let sp = legendre_td21();
        let mix = sp.conditional_mixture(1, &[0.6]).unwrap();
        let rule = family_rule(mix.family, mix.max_degree() + 1);
        let total: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&t, &w)| w * mix.square_sum(t).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixture_cdf_matches_density_quadrature() {
        let sp = ApproximationSpace::univariate(BasisFamily::HermiteGaussian, 4);
        let mix = sp.conditional_mixture(0, &[]).unwrap();
        for t in [-2.2, -0.5, 0.0, 1.3] {
            let got = mix.cdf(t).unwrap();
            let oracle =
                crate::quadrature::composite_gl(-12.0, t, 0.05, 10, |s| mix.density(s).unwrap());
            assert!((got - oracle).abs() < 1e-10, "t={t}: {got} vs {oracle}");
        }
    }

    #[test]
    fn envelope_constants() {
        let leg = legendre_td21();
        // λ_1 = 1 → M = sup‖φ_1‖² = 3.
        let m1 = leg
            .conditional_mixture(0, &[])
            .unwrap()
            .envelope_constant()
            .unwrap();
        assert!((m1 - 3.0).abs() < 1e-14);
        let cheb = ApproximationSpace::univariate(BasisFamily::ChebyshevArcsine, 6);
        let m2 = cheb
            .conditional_mixture(0, &[])
            .unwrap()
            .envelope_constant()
            .unwrap();
        assert!((m2 - 2.0).abs() < 1e-14);
        let herm = ApproximationSpace::univariate(BasisFamily::HermiteGaussian, 3);
        assert!(herm
            .conditional_mixture(0, &[])
            .unwrap()
            .envelope_constant()
            .is_err());
    }

    #[test]
    fn rejects_bad_construction() {
        let r = ApproximationSpace::new(
            vec![BasisFamily::LegendreUniform],
            IndexSet::total_degree(2, 1),
        );
        assert!(matches!(r, Err(Error::MixedDimensions(1, 2))));
    }

    #[test]
    fn rejects_out_of_domain_points() {
        let sp = legendre_td21();
        assert!(sp.christoffel(&[0.0, 1.5]).is_err());
        assert!(sp.christoffel(&[0.0]).is_err());
        assert!(sp.conditional_mixture(1, &[2.0]).is_err());
    }

    #[test]
    fn fingerprint_distinguishes_spaces() {
        let a = legendre_td21();
        let b = ApproximationSpace::isotropic(
            BasisFamily::ChebyshevArcsine,
            IndexSet::total_degree(2, 1),
        )
        .unwrap();
        let c = ApproximationSpace::isotropic(
            BasisFamily::LegendreUniform,
            IndexSet::total_degree(2, 2),
        )
        .unwrap();
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_ne!(a.fingerprint(), c.fingerprint());
        assert_eq!(a.fingerprint(), legendre_td21().fingerprint());
    }

    #[test]
    fn serde_round_trip_rebuilds_caches() {
        let sp = legendre_td21();
        let js = serde_json::to_string(&sp).unwrap();
        let back: ApproximationSpace = serde_json::from_str(&js).unwrap();
        assert_eq!(back.degree_profile(), sp.degree_profile());
        assert_eq!(back.fingerprint(), sp.fingerprint());
        assert!(
            (back.christoffel(&[0.5, 0.5]).unwrap() - sp.christoffel(&[0.5, 0.5]).unwrap()).abs()
                < 1e-15
        );
        // Hand-written JSON with a closure violation is rejected on load.
        let bad = r#"{"families":["legendre_uniform","legendre_uniform"],"indices":[[0,0],[1,1]]}"#;
        assert!(serde_json::from_str::<ApproximationSpace>(bad).is_err());
    }
}
