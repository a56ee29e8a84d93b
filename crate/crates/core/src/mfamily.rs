//! The countable lattice `M` of subsets of `ℕ` that are finite or all of `ℕ`.
//!
//! `M` is d-reduced but not Boolean, and has a quotient (by the closed
//! congruence of the ideal of sets avoiding one point) that is the
//! three-element chain, which is not d-reduced. Everything here is exact:
//! finite sets are stored sparsely, cofinite sets as a finite exception list
//! with a polarity flag, and no truncation of `ℕ` is ever made. (Truncating
//! to a window `{0..k}` with a glued top would merge the pseudocomplements of
//! the window maximum and the top.)
//!
//! Ideals of the finite part of `M` correspond to arbitrary subsets `S ⊆ ℕ`
//! via `S ↦ {x finite : x ⊆ S}`; this module represents the finite and
//! cofinite `S`, plus the improper ideal containing `ℕ` itself.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::lattice::{build_lattice, Lattice, LatticeError, Limits};
use crate::poset::Poset;

pub type Nat = u64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MError {
    #[error("sample pair {index} has equal components")]
    DuplicatePair { index: usize },
    #[error("the ideal {0} is not of the form fin-of co{{…}}")]
    NotCofinite(String),
    #[error("size limit exceeded for {what}: {actual} > {limit}")]
    SizeLimitExceeded { what: &'static str, limit: usize, actual: usize },
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// A subset of `ℕ` that is finite, or cofinite with the listed exceptions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NatSet {
    listed: BTreeSet<Nat>,
    cofinite: bool,
}

impl NatSet {
    pub fn finite(items: impl IntoIterator<Item = Nat>) -> NatSet {
        NatSet {
            listed: items.into_iter().collect(),
            cofinite: false,
        }
    }

    /// `ℕ` minus the given points.
    pub fn cofinite(missing: impl IntoIterator<Item = Nat>) -> NatSet {
        NatSet {
            listed: missing.into_iter().collect(),
            cofinite: true,
        }
    }

    pub fn naturals() -> NatSet {
        NatSet::cofinite([])
    }

    pub fn is_finite(&self) -> bool {
        !self.cofinite
    }

    /// The listed points: the members if finite, the missing points if cofinite.
    pub fn listed(&self) -> &BTreeSet<Nat> {
        &self.listed
    }

    pub fn contains(&self, n: Nat) -> bool {
        self.listed.contains(&n) != self.cofinite
    }

    pub fn complement(&self) -> NatSet {
        NatSet {
            listed: self.listed.clone(),
            cofinite: !self.cofinite,
        }
    }

    pub fn is_subset(&self, other: &NatSet) -> bool {
        match (self.cofinite, other.cofinite) {
            (false, false) => self.listed.is_subset(&other.listed),
            (false, true) => self.listed.is_disjoint(&other.listed),
            (true, false) => false,
            (true, true) => other.listed.is_subset(&self.listed),
        }
    }

    /// Whether the finite set `s` lies inside this set.
    pub fn contains_all(&self, s: &BTreeSet<Nat>) -> bool {
        s.iter().all(|&n| self.contains(n))
    }
}

impl fmt::Display for NatSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cofinite {
            write!(f, "co")?;
        }
        write!(f, "{}", fmt_set(&self.listed))
    }
}

fn fmt_set(s: &BTreeSet<Nat>) -> String {
    let items: Vec<String> = s.iter().map(|n| n.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

/// An element of `M`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MElement {
    Fin(BTreeSet<Nat>),
    /// `ℕ` itself, the top of `M`.
    Top,
}

impl MElement {
    pub fn fin(items: impl IntoIterator<Item = Nat>) -> MElement {
        MElement::Fin(items.into_iter().collect())
    }

    pub fn empty() -> MElement {
        MElement::Fin(BTreeSet::new())
    }

    pub fn is_top(&self) -> bool {
        matches!(self, MElement::Top)
    }

    pub fn meet(&self, other: &MElement) -> MElement {
        match (self, other) {
            (MElement::Top, x) | (x, MElement::Top) => x.clone(),
            (MElement::Fin(a), MElement::Fin(b)) => MElement::Fin(a & b),
        }
    }

    pub fn join(&self, other: &MElement) -> MElement {
        match (self, other) {
            (MElement::Top, _) | (_, MElement::Top) => MElement::Top,
            (MElement::Fin(a), MElement::Fin(b)) => MElement::Fin(a | b),
        }
    }

    pub fn leq(&self, other: &MElement) -> bool {
        match (self, other) {
            (_, MElement::Top) => true,
            (MElement::Top, MElement::Fin(_)) => false,
            (MElement::Fin(a), MElement::Fin(b)) => a.is_subset(b),
        }
    }
}

impl fmt::Display for MElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MElement::Fin(s) => write!(f, "{}", fmt_set(s)),
            MElement::Top => write!(f, "TOP"),
        }
    }
}

fn parse_braced(input: &str) -> Result<BTreeSet<Nat>, MError> {
    let err = |reason: &str| MError::Parse {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    let body = input
        .trim()
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| err("expected {…}"))?;
    body.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Nat>().map_err(|e| err(&e.to_string())))
        .collect()
}

impl FromStr for MElement {
    type Err = MError;

    /// `"{1,2,7}"` or `"TOP"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().eq_ignore_ascii_case("top") {
            Ok(MElement::Top)
        } else {
            parse_braced(s).map(MElement::Fin)
        }
    }
}

/// An ideal of `M`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MIdealRep {
    /// `{Fin(x) : x ⊆ S}`.
    FinOf(NatSet),
    /// All of `M`, including `ℕ`.
    AllOfM,
}

impl MIdealRep {
    pub fn contains(&self, x: &MElement) -> bool {
        match (self, x) {
            (MIdealRep::AllOfM, _) => true,
            (MIdealRep::FinOf(_), MElement::Top) => false,
            (MIdealRep::FinOf(s), MElement::Fin(x)) => s.contains_all(x),
        }
    }

    /// Inclusion of ideals.
    pub fn is_subset(&self, other: &MIdealRep) -> bool {
        match (self, other) {
            (_, MIdealRep::AllOfM) => true,
            (MIdealRep::AllOfM, MIdealRep::FinOf(_)) => false,
            (MIdealRep::FinOf(s), MIdealRep::FinOf(t)) => s.is_subset(t),
        }
    }
}

impl fmt::Display for MIdealRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MIdealRep::FinOf(s) => write!(f, "fin-of {s}"),
            MIdealRep::AllOfM => write!(f, "all"),
        }
    }
}

impl FromStr for MIdealRep {
    type Err = MError;

    /// `"fin-of {…}"`, `"fin-of co{…}"` or `"all"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("all") {
            return Ok(MIdealRep::AllOfM);
        }
        let rest = t.strip_prefix("fin-of").ok_or_else(|| MError::Parse {
            input: s.to_string(),
            reason: "expected `fin-of {…}`, `fin-of co{…}` or `all`".into(),
        })?;
        let rest = rest.trim();
        match rest.strip_prefix("co") {
            Some(body) => parse_braced(body).map(|m| MIdealRep::FinOf(NatSet::cofinite(m))),
            None => parse_braced(rest).map(|m| MIdealRep::FinOf(NatSet::finite(m))),
        }
    }
}

/// `(↓a)*` in the ideal frame of `M`: the ideal of everything disjoint from `a`.
pub fn m_pseudocomplement_principal(a: &MElement) -> MIdealRep {
    match a {
        // Everything, including ℕ, meets ∅ in ∅.
        MElement::Fin(s) if s.is_empty() => MIdealRep::AllOfM,
        MElement::Fin(s) => MIdealRep::FinOf(NatSet::cofinite(s.iter().copied())),
        // x ∧ ℕ = x, so only ∅ qualifies.
        MElement::Top => MIdealRep::FinOf(NatSet::finite([])),
    }
}

/// Membership of `(x, y)` in the closed congruence of the ideal `s`:
/// `x ∨ i = y ∨ i` for some `i` in the ideal.
pub fn m_nabla_related(s: &MIdealRep, x: &MElement, y: &MElement) -> bool {
    match (s, x, y) {
        (MIdealRep::AllOfM, _, _) => true,
        (_, MElement::Top, MElement::Top) => true,
        // A finite set joined with finite sets never reaches ℕ.
        (_, MElement::Top, _) | (_, _, MElement::Top) => false,
        (MIdealRep::FinOf(t), MElement::Fin(a), MElement::Fin(b)) => {
            t.contains_all(&(a ^ b))
        }
    }
}

/// Explicit witness search for [`m_nabla_related`] with a finite-or-cofinite
/// ideal: tries every `i ⊆ x ∪ y` inside the ideal and returns one with
/// `x ∨ i = y ∨ i`. Exponential in `|x ∪ y|`; meant for small sets.
pub fn m_nabla_witness(s: &NatSet, x: &BTreeSet<Nat>, y: &BTreeSet<Nat>) -> Option<BTreeSet<Nat>> {
    let pool: Vec<Nat> = x.union(y).copied().collect();
    assert!(pool.len() < 24, "witness search is exponential in |x ∪ y|");
    (0u32..1 << pool.len())
        .map(|mask| {
            pool.iter()
                .enumerate()
                .filter(|&(k, _)| mask >> k & 1 == 1)
                .map(|(_, &p)| p)
                .collect::<BTreeSet<Nat>>()
        })
        .filter(|i| s.contains_all(i))
        .find(|i| (x | i) == (y | i))
}

/// Membership of `(x, y)` in the clear congruence of `↓a`: for every
/// `z ∈ M`, `x ∧ z <= a` exactly when `y ∧ z <= a`.
///
/// The quantifier over `M` is decided on [`m_partial_probes`]. For finite
/// `z` and any `w`, `w ∧ z <= a` holds iff it holds for every singleton
/// `{p} ⊆ z` (if `w` is finite it says `z` misses `w ∖ a`; if `w = ℕ` it says
/// `z ⊆ a`). So two elements disagree on some finite `z` iff they disagree
/// on a singleton, and all points outside the support `a ∪ x ∪ y` behave
/// alike, so one fresh point stands in for them. `z = ℕ` is probed directly.
pub fn m_partial_related(a: &MElement, x: &MElement, y: &MElement) -> bool {
    m_partial_probes(a, x, y)
        .iter()
        .all(|z| x.meet(z).leq(a) == y.meet(z).leq(a))
}

/// The probe elements used by [`m_partial_related`]: a singleton for every
/// point of the support, a singleton of one fresh point, and `ℕ`.
pub fn m_partial_probes(a: &MElement, x: &MElement, y: &MElement) -> Vec<MElement> {
    let support = m_support([a, x, y]);
    let fresh = support.last().map_or(0, |&m| m + 1);
    support
        .iter()
        .chain(std::iter::once(&fresh))
        .map(|&p| MElement::fin([p]))
        .chain(std::iter::once(MElement::Top))
        .collect()
}

/// Union of the finite sets among the given elements.
pub fn m_support<'e>(elements: impl IntoIterator<Item = &'e MElement>) -> BTreeSet<Nat> {
    let mut out = BTreeSet::new();
    for e in elements {
        if let MElement::Fin(s) = e {
            out.extend(s.iter().copied());
        }
    }
    out
}

/// The complement of `x` in `M`, if it has one.
pub fn m_complement(x: &MElement) -> Option<MElement> {
    match x {
        // A finite complement would make x ∪ c finite, never ℕ; the only other
        // candidate is ℕ itself, which meets x in x.
        MElement::Fin(s) if s.is_empty() => Some(MElement::Top),
        MElement::Fin(_) => None,
        MElement::Top => Some(MElement::empty()),
    }
}

/// `M / ∇I` for `I = fin-of co F` with `F` finite.
#[derive(Clone, Debug)]
pub struct MQuotient {
    lattice: Lattice,
    support: Vec<Nat>,
    masks: Vec<u64>,
}

impl MQuotient {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// The finite set `F` whose subsets index the non-top classes.
    pub fn support(&self) -> &[Nat] {
        &self.support
    }

    /// The class of `x`: `x ∩ F` for finite `x`, the top class for `ℕ`.
    pub fn class_of(&self, x: &MElement) -> usize {
        match x {
            MElement::Top => self.lattice.top(),
            MElement::Fin(s) => {
                let mask = self
                    .support
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| s.contains(p))
                    .fold(0u64, |m, (k, _)| m | 1 << k);
                self.masks
                    .iter()
                    .position(|&m| m == mask)
                    .expect("every subset of the support is a class")
            }
        }
    }

    /// A representative of class `c`.
    pub fn representative(&self, c: usize) -> MElement {
        if c == self.lattice.top() {
            return MElement::Top;
        }
        let mask = self.masks[c];
        MElement::fin(
            self.support
                .iter()
                .enumerate()
                .filter(|&(k, _)| mask >> k & 1 == 1)
                .map(|(_, &p)| p),
        )
    }
}

/// Builds `M / ∇I` for a cofinite `I = fin-of co F`. Two finite sets are
/// identified iff they agree on `F`; `ℕ` stays alone, so the result is the
/// powerset of `F` with a new top adjoined.
pub fn m_quotient_cofinite(s: &MIdealRep, limits: &Limits) -> Result<MQuotient, MError> {
    let f = match s {
        MIdealRep::FinOf(t) if !t.is_finite() => t.listed(),
        other => return Err(MError::NotCofinite(other.to_string())),
    };
    if f.len() > limits.max_m_support {
        return Err(MError::SizeLimitExceeded {
            what: "finite complement of the ideal",
            limit: limits.max_m_support,
            actual: f.len(),
        });
    }
    let support: Vec<Nat> = f.iter().copied().collect();
    let mut masks: Vec<u64> = (0..1u64 << support.len()).collect();
    masks.sort_unstable_by_key(|&m| (m.count_ones(), m));
    let count = masks.len() + 1;
    let table: Vec<Vec<bool>> = (0..count)
        .map(|i| {
            (0..count)
                .map(|j| j == count - 1 || (i < masks.len() && masks[i] & !masks[j] == 0))
                .collect()
        })
        .collect();
    let built = build_lattice(&Poset::from_relation(&table)?, limits)?;
    debug_assert!(built.permutation.iter().enumerate().all(|(i, &p)| i == p));
    Ok(MQuotient {
        lattice: built.lattice,
        support,
        masks,
    })
}

/// Evidence that `M` is d-reduced on a sample, and that it is not Boolean.
#[derive(Clone, Debug)]
pub struct MWitnessReport {
    pub pairs_checked: usize,
    /// Distinct sampled pairs whose principal ideals share a pseudocomplement.
    pub collisions: Vec<(MElement, MElement)>,
    pub non_boolean: NonBooleanWitness,
}

impl MWitnessReport {
    pub fn passed(&self) -> bool {
        self.collisions.is_empty() && self.non_boolean.holds()
    }
}

/// Case analysis showing `{0}` has no complement in `M`.
#[derive(Clone, Debug)]
pub struct NonBooleanWitness {
    pub element: MElement,
    /// `{0} ∧ ℕ`, which must be nonempty for `ℕ` to fail as a complement.
    pub meet_with_top: MElement,
    /// Sampled finite candidates `c`; each `{0} ∨ c` is finite, hence not `ℕ`.
    pub finite_candidates_checked: usize,
    pub finite_candidate_reached_top: bool,
}

impl NonBooleanWitness {
    pub fn holds(&self) -> bool {
        self.meet_with_top != MElement::empty()
            && !self.finite_candidate_reached_top
            && m_complement(&self.element).is_none()
    }
}

/// Checks `(↓x)* ≠ (↓y)*` for every sampled pair and records the
/// non-Booleanness witness for `{0}`.
pub fn m_d_reduced_witness(samples: &[(MElement, MElement)]) -> Result<MWitnessReport, MError> {
    let mut collisions = Vec::new();
    for (index, (x, y)) in samples.iter().enumerate() {
        if x == y {
            return Err(MError::DuplicatePair { index });
        }
        if m_pseudocomplement_principal(x) == m_pseudocomplement_principal(y) {
            collisions.push((x.clone(), y.clone()));
        }
    }
    let element = MElement::fin([0]);
    let candidates = m_support(samples.iter().flat_map(|(x, y)| [x, y]));
    let finite: Vec<MElement> = samples
        .iter()
        .flat_map(|(x, y)| [x, y])
        .filter(|c| !c.is_top())
        .cloned()
        .chain(std::iter::once(MElement::Fin(candidates)))
        .collect();
    let reached = finite.iter().any(|c| element.join(c).is_top());
    Ok(MWitnessReport {
        pairs_checked: samples.len(),
        collisions,
        non_boolean: NonBooleanWitness {
            meet_with_top: element.meet(&MElement::Top),
            element,
            finite_candidates_checked: finite.len(),
            finite_candidate_reached_top: reached,
        },
    })
}

/// A finite subset of `{0..universe}` with at most `max_size` points.
pub fn sample_finite(rng: &mut impl Rng, universe: Nat, max_size: usize) -> BTreeSet<Nat> {
    let size = rng.gen_range(0..=max_size);
    (0..size).map(|_| rng.gen_range(0..universe)).collect()
}

/// `count` seeded pairs of distinct elements of `M`. Elements are `ℕ` with
/// probability 1/16, otherwise finite subsets of `{0..63}` with at most
/// eight points.
pub fn sample_m_pairs(seed: u64, count: usize) -> Vec<(MElement, MElement)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        if rng.gen_ratio(1, 16) {
            MElement::Top
        } else {
            MElement::Fin(sample_finite(rng, 64, 8))
        }
    };
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        if x != y {
            out.push((x, y));
        }
    }
    out
}
