//! Multi-index sets for tensor-product polynomial spaces.
//!
//! An approximation space in dimension d is spanned by `{Φ_ν : ν ∈ Λ}` with
//! Φ_ν(x) = ∏_q φ_{ν_q}(x_q). All algorithms here require Λ to be
//! *downward closed* (lower sets): ν ∈ Λ and μ ≤ ν componentwise implies
//! μ ∈ Λ. Downward closure guarantees 1 ∈ span and keeps the sequential
//! conditional factorization of the optimal density valid.

use crate::rng::{tag, Stream};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// A single multi-index ν = (ν_1, …, ν_d).
pub type MultiIndex = Vec<usize>;

/// How [`IndexSet::nested_sequence`] grows a nested family Λ_1 ⊂ Λ_2 ⊂ ….
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceStrategy {
    /// Canonical order: total degree ascending, ties broken lexicographically
    /// (descending componentwise comparison), so every prefix is downward
    /// closed and the sequence is deterministic.
    TotalDegreeLex,
    /// Random admissible growth: each step adds a uniformly chosen index
    /// whose addition keeps the set downward closed.
    RandomAdmissible,
}

impl std::str::FromStr for SequenceStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "total_degree_lex" => Ok(SequenceStrategy::TotalDegreeLex),
            "random_admissible" => Ok(SequenceStrategy::RandomAdmissible),
            other => Err(Error::config(format!(
                "unknown sequence strategy '{other}'"
            ))),
        }
    }
}

/// A downward-closed multi-index set with a fixed member order.
///
/// Members are stored in the order the set was grown (so nested sequences
/// keep the prefix property); [`IndexSet::from_members`] normalizes to the
/// canonical graded order instead. The JSON form is a plain array of
/// arrays; loading validates closure but keeps the stored order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<MultiIndex>", into = "Vec<MultiIndex>")]
pub struct IndexSet {
    members: Vec<MultiIndex>,
}

impl TryFrom<Vec<MultiIndex>> for IndexSet {
    type Error = Error;

    fn try_from(members: Vec<MultiIndex>) -> Result<Self> {
        IndexSet::from_ordered_members(members)
    }
}

impl From<IndexSet> for Vec<MultiIndex> {
    fn from(set: IndexSet) -> Self {
        set.members
    }
}

/// Canonical comparison: grade (total degree) ascending, then lexicographic
/// on the reversed comparison of components (higher leading entries first
/// within a grade, matching the univariate convention that Λ_m = {0,…,m-1}
/// enumerates degree by degree).
fn canonical_cmp(a: &[usize], b: &[usize]) -> std::cmp::Ordering {
    let ga: usize = a.iter().sum();
    let gb: usize = b.iter().sum();
    ga.cmp(&gb).then_with(|| b.cmp(a))
}

impl IndexSet {
    /// Build from explicit members: validates downward closure, deduplicates,
    /// and sorts into the canonical graded order.
    pub fn from_members(members: Vec<MultiIndex>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::invalid("index set must be nonempty"));
        }
        let d = members[0].len();
        if d == 0 {
            return Err(Error::invalid("multi-indices must have dimension >= 1"));
        }
        let mut set: Vec<MultiIndex> = members;
        set.sort_by(|a, b| canonical_cmp(a, b));
        set.dedup();
        let out = IndexSet { members: set };
        if !out.check_downward_closed()? {
            let witness = out.first_missing_parent().expect("closure witness");
            return Err(Error::NotDownwardClosed(witness));
        }
        Ok(out)
    }

    /// Build from members in a caller-chosen order: validates dimensions,
    /// duplicates, and downward closure, but preserves the given order
    /// (used when loading grown sequences whose prefix structure matters).
    pub fn from_ordered_members(members: Vec<MultiIndex>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::invalid("index set must be nonempty"));
        }
        if members[0].is_empty() {
            return Err(Error::invalid("multi-indices must have dimension >= 1"));
        }
        let mut seen = BTreeSet::new();
        for nu in &members {
            if !seen.insert(nu.clone()) {
                return Err(Error::invalid(format!("duplicate multi-index {nu:?}")));
            }
        }
        let out = IndexSet { members };
        if !out.check_downward_closed()? {
            let witness = out.first_missing_parent().expect("closure witness");
            return Err(Error::NotDownwardClosed(witness));
        }
        Ok(out)
    }

    /// The univariate set Λ = {0, 1, …, m-1} (d = 1).
    pub fn univariate(m: usize) -> Self {
        IndexSet {
            members: (0..m.max(1)).map(|j| vec![j]).collect(),
        }
    }

    /// Total-degree set {ν : |ν| ≤ w} in dimension `d`, canonical order.
    pub fn total_degree(d: usize, w: usize) -> Self {
        fn rec(d: usize, w: usize, prefix: &mut MultiIndex, out: &mut Vec<MultiIndex>) {
            if d == 0 {
                out.push(prefix.clone());
                return;
            }
            let used: usize = prefix.iter().sum();
            for k in 0..=(w - used) {
                prefix.push(k);
                rec(d - 1, w, prefix, out);
                prefix.pop();
            }
        }
        let mut members = Vec::new();
        rec(d, w, &mut Vec::new(), &mut members);
        members.sort_by(|a, b| canonical_cmp(a, b));
        IndexSet { members }
    }

    /// Hyperbolic-cross style set {ν : ∏ (ν_q + 1) ≤ w + 1}.
    pub fn hyperbolic_cross(d: usize, w: usize) -> Self {
        fn rec(d: usize, budget: usize, prefix: &mut MultiIndex, out: &mut Vec<MultiIndex>) {
            if d == 0 {
                out.push(prefix.clone());
                return;
            }
            let mut k = 0usize;
            while (k + 1) <= budget {
                prefix.push(k);
                rec(d - 1, budget / (k + 1), prefix, out);
                prefix.pop();
                k += 1;
            }
        }
        let mut members = Vec::new();
        rec(d, w + 1, &mut Vec::new(), &mut members);
        members.sort_by(|a, b| canonical_cmp(a, b));
        IndexSet { members }
    }

    /// A nested sequence Λ_1 ⊂ … ⊂ Λ_{m_max} in dimension `d`; the returned
    /// set holds the full Λ_{m_max}, and every prefix of `members()` of
    /// length m equals Λ_m. `seed` only matters for random growth.
    pub fn nested_sequence(
        d: usize,
        m_max: usize,
        strategy: SequenceStrategy,
        seed: u64,
    ) -> Result<Self> {
        if d == 0 || m_max == 0 {
            return Err(Error::invalid(
                "nested_sequence requires d >= 1 and m_max >= 1",
            ));
        }
        match strategy {
            SequenceStrategy::TotalDegreeLex => {
                // Enumerate by grades until m_max members are collected.
                let mut members: Vec<MultiIndex> = Vec::with_capacity(m_max);
                let mut grade = 0usize;
                while members.len() < m_max {
                    let mut layer = compositions(d, grade);
                    layer.sort_by(|a, b| canonical_cmp(a, b));
                    for nu in layer {
                        members.push(nu);
                        if members.len() == m_max {
                            break;
                        }
                    }
                    grade += 1;
                }
                Ok(IndexSet { members })
            }
            SequenceStrategy::RandomAdmissible => {
                let mut stream = Stream::from_key(&[tag::SEQUENCE, seed, d as u64]);
                let mut have: BTreeSet<MultiIndex> = BTreeSet::new();
                let mut members: Vec<MultiIndex> = Vec::with_capacity(m_max);
                let root = vec![0usize; d];
                have.insert(root.clone());
                members.push(root);
                while members.len() < m_max {
                    // Admissible frontier: ν ∉ Λ with all parents ν - e_q ∈ Λ.
                    let mut frontier: BTreeSet<MultiIndex> = BTreeSet::new();
                    for nu in &members {
                        for q in 0..d {
                            let mut cand = nu.clone();
                            cand[q] += 1;
                            if have.contains(&cand) {
                                continue;
                            }
                            let admissible = (0..d).all(|r| {
                                if cand[r] == 0 {
                                    return true;
                                }
                                let mut parent = cand.clone();
                                parent[r] -= 1;
                                have.contains(&parent)
                            });
                            if admissible {
                                frontier.insert(cand);
                            }
                        }
                    }
                    let frontier: Vec<MultiIndex> = frontier.into_iter().collect();
                    let pick = stream.next_below(frontier.len());
                    let nu = frontier[pick].clone();
                    have.insert(nu.clone());
                    members.push(nu);
                }
                Ok(IndexSet { members })
            }
        }
    }

    pub fn members(&self) -> &[MultiIndex] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members[0].len()
    }

    /// Prefix Λ_m of the stored order (for nested sequences).
    pub fn prefix(&self, m: usize) -> Result<IndexSet> {
        if m == 0 || m > self.len() {
            return Err(Error::invalid(format!(
                "prefix length {m} out of range 1..={}",
                self.len()
            )));
        }
        Ok(IndexSet {
            members: self.members[..m].to_vec(),
        })
    }

    /// Largest degree appearing in coordinate `q`.
    pub fn max_degree(&self, q: usize) -> usize {
        self.members.iter().map(|nu| nu[q]).max().unwrap_or(0)
    }

    /// Per-coordinate maximal degrees (λ_1, …, λ_d).
    pub fn degree_profile(&self) -> Vec<usize> {
        (0..self.dim()).map(|q| self.max_degree(q)).collect()
    }

    /// Whether the set is downward closed; errors if members mix dimensions.
    pub fn check_downward_closed(&self) -> Result<bool> {
        let d = self.dim();
        if let Some(nu) = self.members.iter().find(|nu| nu.len() != d) {
            return Err(Error::MixedDimensions(d, nu.len()));
        }
        Ok(self.first_missing_parent().is_none())
    }

    fn first_missing_parent(&self) -> Option<MultiIndex> {
        let have: BTreeSet<&MultiIndex> = self.members.iter().collect();
        for nu in &self.members {
            for q in 0..nu.len() {
                if nu[q] == 0 {
                    continue;
                }
                let mut parent = nu.clone();
                parent[q] -= 1;
                if !have.contains(&parent) {
                    return Some(nu.clone());
                }
            }
        }
        None
    }
}

/// Standalone downward-closure check on raw members (empty sets pass).
pub fn is_downward_closed(members: &[MultiIndex]) -> Result<bool> {
    if members.is_empty() {
        return Ok(true);
    }
    let d = members[0].len();
    if let Some(nu) = members.iter().find(|nu| nu.len() != d) {
        return Err(Error::MixedDimensions(d, nu.len()));
    }
    let have: BTreeSet<&MultiIndex> = members.iter().collect();
    for nu in members {
        for q in 0..d {
            if nu[q] == 0 {
                continue;
            }
            let mut parent = nu.clone();
            parent[q] -= 1;
            if !have.contains(&parent) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// All ν ∈ ℕ^d with |ν| = grade (weak compositions), in recursion order.
fn compositions(d: usize, grade: usize) -> Vec<MultiIndex> {
    fn rec(d: usize, left: usize, prefix: &mut MultiIndex, out: &mut Vec<MultiIndex>) {
        if d == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(d - 1, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, grade, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn univariate_is_degree_range() {
        let s = IndexSet::univariate(4);
        assert_eq!(s.members(), &[vec![0], vec![1], vec![2], vec![3]]);
        assert!(s.check_downward_closed().unwrap());
    }

    #[test]
    fn total_degree_counts_match_binomials() {
        // |Λ| = C(w + d, d).
        assert_eq!(IndexSet::total_degree(2, 2).len(), 6);
        assert_eq!(IndexSet::total_degree(3, 2).len(), 10);
        assert_eq!(IndexSet::total_degree(4, 3).len(), 35);
    }

    #[test]
    fn canonical_order_is_graded() {
        let s = IndexSet::total_degree(2, 2);
        assert_eq!(
            s.members(),
            &[
                vec![0, 0],
                vec![1, 0],
                vec![0, 1],
                vec![2, 0],
                vec![1, 1],
                vec![0, 2]
            ]
        );
    }

    #[test]
    fn from_members_normalizes_and_validates() {
        let s =
            IndexSet::from_members(vec![vec![0, 1], vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(s.members(), &[vec![0, 0], vec![1, 0], vec![0, 1]]);
        let bad = IndexSet::from_members(vec![vec![0, 0], vec![2, 0]]);
        assert!(matches!(bad, Err(Error::NotDownwardClosed(_))));
    }

    #[test]
    fn mixed_dimensions_detected() {
        let r = is_downward_closed(&[vec![0, 0], vec![0]]);
        assert!(matches!(r, Err(Error::MixedDimensions(2, 1))));
    }

    #[test]
    fn closure_checker_spots_holes() {
        assert!(is_downward_closed(&[vec![0], vec![1], vec![2]]).unwrap());
        assert!(!is_downward_closed(&[vec![0], vec![2]]).unwrap());
        assert!(!is_downward_closed(&[vec![0, 0], vec![1, 1]]).unwrap());
        assert!(is_downward_closed(&[]).unwrap());
    }

    #[test]
    fn hyperbolic_cross_small_case() {
        // w = 3: products (ν1+1)(ν2+1) ≤ 4.
        let s = IndexSet::hyperbolic_cross(2, 3);
        let expect: BTreeSet<MultiIndex> = [
            vec![0, 0],
            vec![1, 0],
            vec![0, 1],
            vec![2, 0],
            vec![0, 2],
            vec![1, 1],
            vec![3, 0],
            vec![0, 3],
        ]
        .into_iter()
        .collect();
        let got: BTreeSet<MultiIndex> = s.members().iter().cloned().collect();
        assert_eq!(got, expect);
        assert!(s.check_downward_closed().unwrap());
    }

    #[test]
    fn nested_sequence_prefixes_are_downward_closed() {
        for strategy in [
            SequenceStrategy::TotalDegreeLex,
            SequenceStrategy::RandomAdmissible,
        ] {
            let s = IndexSet::nested_sequence(3, 25, strategy, 11).unwrap();
            assert_eq!(s.len(), 25);
            for m in 1..=s.len() {
                let p = s.prefix(m).unwrap();
                assert!(
                    p.check_downward_closed().unwrap(),
                    "{strategy:?}: prefix {m} not downward closed"
                );
            }
        }
    }

    #[test]
    fn nested_sequence_univariate_is_degree_order() {
        for strategy in [
            SequenceStrategy::TotalDegreeLex,
            SequenceStrategy::RandomAdmissible,
        ] {
            let s = IndexSet::nested_sequence(1, 6, strategy, 3).unwrap();
            assert_eq!(
                s.members(),
                &[vec![0], vec![1], vec![2], vec![3], vec![4], vec![5]],
                "{strategy:?}"
            );
        }
    }

    #[test]
    fn deterministic_growth_matches_canonical_enumeration() {
        let s = IndexSet::nested_sequence(2, 6, SequenceStrategy::TotalDegreeLex, 0).unwrap();
        assert_eq!(
            s.members(),
            &[
                vec![0, 0],
                vec![1, 0],
                vec![0, 1],
                vec![2, 0],
                vec![1, 1],
                vec![0, 2]
            ]
        );
    }

    #[test]
    fn random_growth_is_seed_deterministic() {
        let a = IndexSet::nested_sequence(3, 30, SequenceStrategy::RandomAdmissible, 42).unwrap();
        let b = IndexSet::nested_sequence(3, 30, SequenceStrategy::RandomAdmissible, 42).unwrap();
        let c = IndexSet::nested_sequence(3, 30, SequenceStrategy::RandomAdmissible, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn json_round_trip_is_array_of_arrays() {
        let s = IndexSet::total_degree(2, 1);
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(js, "[[0,0],[1,0],[0,1]]");
        let back: IndexSet = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);
        // Grown order survives the round trip (prefix property intact).
        let grown =
            IndexSet::nested_sequence(2, 12, SequenceStrategy::RandomAdmissible, 5).unwrap();
        let js2 = serde_json::to_string(&grown).unwrap();
        let back2: IndexSet = serde_json::from_str(&js2).unwrap();
        assert_eq!(back2.members(), grown.members());
        // Closure violations are rejected at load time.
        assert!(serde_json::from_str::<IndexSet>("[[0],[2]]").is_err());
        assert!(serde_json::from_str::<IndexSet>("[[0],[0]]").is_err());
    }

    #[test]
    fn degree_profile_reports_componentwise_max() {
        let s = IndexSet::from_members(vec![
            vec![0, 0],
            vec![1, 0],
            vec![2, 0],
            vec![0, 1],
            vec![1, 1],
        ])
        .unwrap();
        assert_eq!(s.degree_profile(), vec![2, 1]);
    }

    proptest! {
        #[test]
        fn prop_total_degree_sets_are_downward_closed(d in 1usize..4, w in 0usize..6) {
            let s = IndexSet::total_degree(d, w);
            prop_assert!(s.check_downward_closed().unwrap());
            // Every member obeys the defining constraint and all constrained
            // indices are present.
            let bound: usize = s.members().iter().map(|nu| nu.iter().sum::<usize>()).max().unwrap();
            prop_assert_eq!(bound, w);
        }

        #[test]
        fn prop_random_growth_prefixes_closed(seed in 0u64..200, m in 1usize..40) {
            let s = IndexSet::nested_sequence(2, m, SequenceStrategy::RandomAdmissible, seed).unwrap();
            for k in 1..=m {
                prop_assert!(s.prefix(k).unwrap().check_downward_closed().unwrap());
            }
        }

        #[test]
        fn prop_removing_nonmaximal_breaks_closure(d in 1usize..3, w in 1usize..4, pick in 0usize..100) {
            let s = IndexSet::total_degree(d, w);
            // Remove one interior (non-maximal) member: closure must fail
            // unless nothing references it.
            let interior: Vec<usize> = (0..s.len())
                .filter(|&i| {
                    let nu = &s.members()[i];
                    nu.iter().sum::<usize>() < w
                })
                .collect();
            let idx = interior[pick % interior.len()];
            let members: Vec<MultiIndex> = s
                .members()
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != idx)
                .map(|(_, nu)| nu.clone())
                .collect();
            prop_assert!(!is_downward_closed(&members).unwrap());
        }
    }
}
