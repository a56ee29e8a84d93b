//! Finite partial orders: validation, linear extensions, downset enumeration
//! and enumeration up to isomorphism.

use std::collections::{BTreeSet, HashSet};

use fixedbitset::FixedBitSet;
use itertools::Itertools;

use crate::iso;
use crate::lattice::{LatticeError, Limits, OrderViolation};

/// A finite partially ordered set on the points `0..n`.
///
/// `up[i]` holds every `j` with `i <= j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    n: usize,
    up: Vec<FixedBitSet>,
}

impl Poset {
    /// Validates an explicit order table, `leq[i][j]` meaning `i <= j`.
    pub fn from_relation(leq: &[Vec<bool>]) -> Result<Poset, LatticeError> {
        let n = leq.len();
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for (i, row) in leq.iter().enumerate() {
            if row.len() != n {
                return Err(LatticeError::Malformed(format!(
                    "row {i} of the order table has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &b) in row.iter().enumerate() {
                up[i].set(j, b);
            }
        }
        let p = Poset { n, up };
        p.check_partial_order()?;
        Ok(p)
    }

    /// Builds the reflexive-transitive closure of a covering relation given
    /// as `(lower, upper)` pairs.
    pub fn from_covers(n: usize, covers: &[(usize, usize)]) -> Result<Poset, LatticeError> {
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for (i, row) in up.iter_mut().enumerate() {
            row.insert(i);
        }
        for &(a, b) in covers {
            for idx in [a, b] {
                if idx >= n {
                    return Err(LatticeError::ElementOutOfRange { index: idx, n });
                }
            }
            up[a].insert(b);
        }
        // Warshall closure on bit rows.
        for k in 0..n {
            let row_k = up[k].clone();
            for (i, row) in up.iter_mut().enumerate() {
                if i != k && row.contains(k) {
                    row.union_with(&row_k);
                }
            }
        }
        let p = Poset { n, up };
        p.check_partial_order()?;
        Ok(p)
    }

    pub fn chain(k: usize) -> Poset {
        let up = (0..k)
            .map(|i| {
                let mut row = FixedBitSet::with_capacity(k);
                row.insert_range(i..k);
                row
            })
            .collect();
        Poset { n: k, up }
    }

    pub fn antichain(k: usize) -> Poset {
        let up = (0..k)
            .map(|i| {
                let mut row = FixedBitSet::with_capacity(k);
                row.insert(i);
                row
            })
            .collect();
        Poset { n: k, up }
    }

    /// Side-by-side union; the points of `other` are shifted past those of `self`.
    pub fn disjoint_union(&self, other: &Poset) -> Poset {
        let n = self.n + other.n;
        let mut up = Vec::with_capacity(n);
        for row in &self.up {
            let mut r = FixedBitSet::with_capacity(n);
            r.extend(row.ones());
            up.push(r);
        }
        for row in &other.up {
            let mut r = FixedBitSet::with_capacity(n);
            r.extend(row.ones().map(|j| j + self.n));
            up.push(r);
        }
        Poset { n, up }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.up[i].contains(j)
    }

    pub fn up_set(&self, i: usize) -> &FixedBitSet {
        &self.up[i]
    }

    pub fn order_table(&self) -> Vec<Vec<bool>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.leq(i, j)).collect())
            .collect()
    }

    /// Strictly-below elements of `i` that have nothing strictly between.
    pub fn lower_covers(&self, i: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&j| j != i && self.leq(j, i))
            .filter(|&j| {
                !(0..self.n).any(|k| k != i && k != j && self.leq(j, k) && self.leq(k, i))
            })
            .collect()
    }

    /// Covering pairs `(lower, upper)` in lexicographic order.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = (0..self.n)
            .flat_map(|i| self.lower_covers(i).into_iter().map(move |j| (j, i)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Smallest-index-first topological order. Returns `order` with
    /// `order[k]` the old label placed at position `k`; the identity when the
    /// labels already form a linear extension.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut indegree: Vec<usize> = (0..self.n)
            .map(|i| (0..self.n).filter(|&j| j != i && self.leq(j, i)).count())
            .collect();
        let mut ready: BTreeSet<usize> = (0..self.n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(i) = ready.pop_first() {
            order.push(i);
            for j in self.up[i].ones() {
                if j != i {
                    indegree[j] -= 1;
                    if indegree[j] == 0 {
                        ready.insert(j);
                    }
                }
            }
        }
        order
    }

    /// True when `i <= j` implies `i` is numerically at most `j`.
    pub fn is_naturally_labeled(&self) -> bool {
        (0..self.n).all(|i| self.up[i].ones().all(|j| j >= i))
    }

    /// Relabels so that old point `i` becomes `new_label[i]`.
    pub fn relabel(&self, new_label: &[usize]) -> Poset {
        let mut up = vec![FixedBitSet::with_capacity(self.n); self.n];
        for i in 0..self.n {
            for j in self.up[i].ones() {
                up[new_label[i]].insert(new_label[j]);
            }
        }
        Poset { n: self.n, up }
    }

    /// Every downset as a bit mask over the points, sorted by size then mask.
    /// Fails once more than `limit` downsets exist.
    pub fn downset_masks(&self, limit: usize) -> Result<Vec<u64>, LatticeError> {
        if self.n > 64 {
            return Err(LatticeError::SizeLimitExceeded {
                what: "poset points for downset enumeration",
                limit: 64,
                actual: self.n,
            });
        }
        let order = self.linear_extension();
        let below: Vec<u64> = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .filter(|&j| j != i && self.leq(j, i))
                    .fold(0u64, |m, j| m | (1 << j))
            })
            .collect();
        let mut out = Vec::new();
        // Points are decided in linear-extension order, so a point's
        // predecessors are always settled before the point itself.
        let mut stack = vec![(0usize, 0u64)];
        while let Some((depth, mask)) = stack.pop() {
            if depth == self.n {
                out.push(mask);
                if out.len() > limit {
                    return Err(LatticeError::SizeLimitExceeded {
                        what: "lattice elements",
                        limit,
                        actual: out.len(),
                    });
                }
                continue;
            }
            let p = order[depth];
            stack.push((depth + 1, mask));
            if below[p] & !mask == 0 {
                stack.push((depth + 1, mask | (1 << p)));
            }
        }
        out.sort_unstable_by_key(|&m| (m.count_ones(), m));
        Ok(out)
    }

    fn check_partial_order(&self) -> Result<(), LatticeError> {
        let n = self.n;
        for i in 0..n {
            if !self.leq(i, i) {
                return Err(LatticeError::NotAPartialOrder(OrderViolation::Reflexivity { a: i }));
            }
        }
        for i in 0..n {
            for j in self.up[i].ones() {
                if j != i && self.leq(j, i) {
                    return Err(LatticeError::NotAPartialOrder(OrderViolation::Antisymmetry {
                        a: i,
                        b: j,
                    }));
                }
                if !self.up[j].is_subset(&self.up[i]) {
                    let c = self.up[j].difference(&self.up[i]).next().unwrap_or(j);
                    return Err(LatticeError::NotAPartialOrder(OrderViolation::Transitivity {
                        a: i,
                        b: j,
                        c,
                    }));
                }
            }
        }
        Ok(())
    }

    /// Order-isomorphism test by exhaustive search.
    pub fn is_isomorphic(&self, other: &Poset) -> bool {
        self.n == other.n
            && iso::find_order_isomorphism(self.n, |i, j| self.leq(i, j), |i, j| other.leq(i, j))
                .is_some()
    }

    /// The smallest row-major bit code of the strict order over all
    /// relabelings. Equal codes mean isomorphic posets.
    fn canonical_code(&self) -> u64 {
        let n = self.n;
        let strict: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| self.up[i].ones().filter(move |&j| j != i).map(move |j| (i, j)))
            .collect();
        (0..n)
            .permutations(n)
            .map(|perm| {
                strict
                    .iter()
                    .fold(0u64, |code, &(i, j)| code | 1 << (perm[i] * n + perm[j]))
            })
            .min()
            .unwrap_or(0)
    }
}

/// All posets on exactly `points` points, one per isomorphism class, in a
/// deterministic order. Counts: 1, 1, 2, 5, 16, 63 for 0..=5 points.
pub fn enumerate_posets(points: usize, limits: &Limits) -> Result<Vec<Poset>, LatticeError> {
    if points > limits.max_poset_points {
        return Err(LatticeError::SizeLimitExceeded {
            what: "poset points",
            limit: limits.max_poset_points,
            actual: points,
        });
    }
    let n = points;
    let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
    let mut seen: HashSet<u64> = HashSet::new();
    let mut out = Vec::new();
    // Every poset has a natural labeling, so strict relations among i < j suffice.
    for bits in 0u64..(1u64 << pairs.len()) {
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for (i, row) in up.iter_mut().enumerate() {
            row.insert(i);
        }
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if bits >> k & 1 == 1 {
                up[i].insert(j);
            }
        }
        let transitive = (0..n).all(|i| up[i].ones().all(|j| up[j].is_subset(&up[i])));
        if !transitive {
            continue;
        }
        let p = Poset { n, up };
        let code = p.canonical_code();
        if seen.insert(code) {
            out.push(p);
        }
    }
    Ok(out)
}

/// All posets with at most `max_points` points, grouped by size.
pub fn enumerate_posets_up_to(max_points: usize, limits: &Limits) -> Result<Vec<Poset>, LatticeError> {
    let mut out = Vec::new();
    for k in 0..=max_points {
        out.extend(enumerate_posets(k, limits)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covers_of_chain() {
        assert_eq!(Poset::chain(3).covers(), vec![(0, 1), (1, 2)]);
        assert!(Poset::antichain(3).covers().is_empty());
    }

    #[test]
    fn cycle_is_rejected() {
        let err = Poset::from_covers(2, &[(0, 1), (1, 0)]).unwrap_err();
        assert!(matches!(err, LatticeError::NotAPartialOrder(OrderViolation::Antisymmetry { .. })));
    }

    #[test]
    fn missing_transitive_pair_is_rejected() {
        let leq = vec![
            vec![true, true, false],
            vec![false, true, true],
            vec![false, false, true],
        ];
        assert!(matches!(
            Poset::from_relation(&leq),
            Err(LatticeError::NotAPartialOrder(OrderViolation::Transitivity { a: 0, b: 1, c: 2 }))
        ));
    }

    #[test]
    fn linear_extension_of_reversed_chain() {
        let p = Poset::from_covers(3, &[(2, 1), (1, 0)]).unwrap();
        assert_eq!(p.linear_extension(), vec![2, 1, 0]);
        assert_eq!(Poset::chain(4).linear_extension(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn downsets_of_antichain_are_all_subsets() {
        let masks = Poset::antichain(3).downset_masks(100).unwrap();
        assert_eq!(masks.len(), 8);
        assert_eq!(masks[0], 0);
        assert_eq!(masks[7], 0b111);
    }

    #[test]
    fn poset_counts_small() {
        let limits = Limits::default();
        let counts: Vec<usize> = (0..=4)
            .map(|k| enumerate_posets(k, &limits).unwrap().len())
            .collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 16]);
    }

    #[test]
    fn poset_point_cap() {
        assert!(matches!(
            enumerate_posets(6, &Limits::default()),
            Err(LatticeError::SizeLimitExceeded { .. })
        ));
    }
}
