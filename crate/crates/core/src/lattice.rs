//! Finite bounded distributive lattices stored as precomputed order, join and
//! meet tables.
//!
//! Elements are the indices `0..n`, always numbered along a linear extension
//! of the order: `a <= b` implies `a` is numerically at most `b`, so the bottom
//! is `0` and the top is `n - 1`. Non-distributive input is rejected when the
//! lattice is built.

use std::collections::HashMap;
use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::iso;
use crate::poset::Poset;

/// Size caps. These are configuration, not properties of the algorithms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest lattice any constructor will produce.
    pub max_elements: usize,
    /// Largest lattice accepted by the isomorphism search.
    pub max_iso: usize,
    /// Largest poset accepted by poset enumeration.
    pub max_poset_points: usize,
    /// Largest lattice whose congruence frame will be enumerated.
    pub max_frame_elements: usize,
    /// Largest congruence frame that will be enumerated.
    pub max_congruences: usize,
    /// Largest finite complement `F` accepted when quotienting the
    /// countable lattice by the ideal of subsets of `ℕ ∖ F`.
    pub max_m_support: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_elements: 4096,
            max_iso: 24,
            max_poset_points: 5,
            max_frame_elements: 128,
            max_congruences: 1 << 12,
            max_m_support: 8,
        }
    }
}

/// Elements are stored as `u16` in the tables.
const HARD_MAX_ELEMENTS: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderViolation {
    Reflexivity { a: usize },
    Antisymmetry { a: usize, b: usize },
    /// `a <= b <= c` but not `a <= c`.
    Transitivity { a: usize, b: usize, c: usize },
}

impl fmt::Display for OrderViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderViolation::Reflexivity { a } => write!(f, "{a} <= {a} is missing"),
            OrderViolation::Antisymmetry { a, b } => write!(f, "{a} <= {b} and {b} <= {a}"),
            OrderViolation::Transitivity { a, b, c } => {
                write!(f, "{a} <= {b} <= {c} but not {a} <= {c}")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Join,
    Meet,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("not a partial order: {0}")]
    NotAPartialOrder(OrderViolation),
    #[error("not a lattice: {a} and {b} have no {bound:?}")]
    NotALattice { a: usize, b: usize, bound: Bound },
    #[error("not distributive: x={x}, y={y}, z={z} gives x∧(y∨z) ≠ (x∧y)∨(x∧z)")]
    NotDistributive { x: usize, y: usize, z: usize },
    #[error("size limit exceeded for {what}: {actual} > {limit}")]
    SizeLimitExceeded { what: &'static str, limit: usize, actual: usize },
    #[error("a lattice needs at least one element")]
    EmptyCarrier,
    #[error("element {index} out of range for {n} elements")]
    ElementOutOfRange { index: usize, n: usize },
    #[error("malformed order table: {0}")]
    Malformed(String),
    #[error("table inconsistency: {0}")]
    Inconsistent(String),
}

/// A finite bounded distributive lattice.
#[derive(Clone, PartialEq, Eq)]
pub struct Lattice {
    n: usize,
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
    join: Vec<u16>,
    meet: Vec<u16>,
    fingerprint: u64,
}

/// Result of [`build_lattice`]: the lattice plus the relabeling applied to
/// the input points (`permutation[input] = element`).
#[derive(Clone, Debug)]
pub struct BuiltLattice {
    pub lattice: Lattice,
    pub permutation: Vec<usize>,
}

/// Validates an order and turns it into a lattice, relabeling the points
/// along a linear extension.
///
/// Errors carry the labels of the input, not the relabeled ones.
pub fn build_lattice(order: &Poset, limits: &Limits) -> Result<BuiltLattice, LatticeError> {
    let n = order.len();
    if n == 0 {
        return Err(LatticeError::EmptyCarrier);
    }
    check_size(n, limits)?;
    let ext = order.linear_extension();
    let mut permutation = vec![0; n];
    for (new, &old) in ext.iter().enumerate() {
        permutation[old] = new;
    }
    let relabeled = order.relabel(&permutation);
    let up: Vec<FixedBitSet> = (0..n).map(|i| relabeled.up_set(i).clone()).collect();
    let lattice = Lattice::from_up_sets(up).map_err(|e| match e {
        LatticeError::NotALattice { a, b, bound } => LatticeError::NotALattice {
            a: ext[a],
            b: ext[b],
            bound,
        },
        other => other,
    })?;
    if let Some((x, y, z)) = lattice.distributivity_violation() {
        return Err(LatticeError::NotDistributive {
            x: ext[x],
            y: ext[y],
            z: ext[z],
        });
    }
    Ok(BuiltLattice {
        lattice,
        permutation,
    })
}

fn check_size(n: usize, limits: &Limits) -> Result<(), LatticeError> {
    let limit = limits.max_elements.min(HARD_MAX_ELEMENTS);
    if n > limit {
        return Err(LatticeError::SizeLimitExceeded {
            what: "lattice elements",
            limit,
            actual: n,
        });
    }
    Ok(())
}

impl Lattice {
    /// Computes join and meet tables from up-sets that are already labeled
    /// along a linear extension.
    fn from_up_sets(up: Vec<FixedBitSet>) -> Result<Lattice, LatticeError> {
        let n = up.len();
        let mut down = vec![FixedBitSet::with_capacity(n); n];
        for (i, row) in up.iter().enumerate() {
            for j in row.ones() {
                down[j].insert(i);
            }
        }
        let mut join = vec![0u16; n * n];
        let mut meet = vec![0u16; n * n];
        for a in 0..n {
            for b in a..n {
                let mut ub = up[a].clone();
                ub.intersect_with(&up[b]);
                // In a linear extension the least upper bound, if any, has the
                // smallest index among the upper bounds.
                let lub = ub
                    .ones()
                    .next()
                    .filter(|&c| ub.is_subset(&up[c]))
                    .ok_or(LatticeError::NotALattice { a, b, bound: Bound::Join })?;
                let mut lb = down[a].clone();
                lb.intersect_with(&down[b]);
                let glb = lb
                    .ones()
                    .last()
                    .filter(|&c| lb.is_subset(&down[c]))
                    .ok_or(LatticeError::NotALattice { a, b, bound: Bound::Meet })?;
                join[a * n + b] = lub as u16;
                join[b * n + a] = lub as u16;
                meet[a * n + b] = glb as u16;
                meet[b * n + a] = glb as u16;
            }
        }
        Ok(Lattice::assemble(n, up, down, join, meet))
    }

    /// Builds a lattice from known-good order and operations. Callers
    /// guarantee the labeling is a linear extension and the operations are
    /// the lattice operations of `leq`.
    fn from_fns(
        n: usize,
        leq: impl Fn(usize, usize) -> bool,
        join_fn: impl Fn(usize, usize) -> usize,
        meet_fn: impl Fn(usize, usize) -> usize,
    ) -> Lattice {
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        let mut down = vec![FixedBitSet::with_capacity(n); n];
        let mut join = vec![0u16; n * n];
        let mut meet = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                if leq(a, b) {
                    up[a].insert(b);
                    down[b].insert(a);
                }
                join[a * n + b] = join_fn(a, b) as u16;
                meet[a * n + b] = meet_fn(a, b) as u16;
            }
        }
        Lattice::assemble(n, up, down, join, meet)
    }

    fn assemble(
        n: usize,
        up: Vec<FixedBitSet>,
        down: Vec<FixedBitSet>,
        join: Vec<u16>,
        meet: Vec<u16>,
    ) -> Lattice {
        let mut h = DefaultHasher::new();
        n.hash(&mut h);
        join.hash(&mut h);
        meet.hash(&mut h);
        Lattice {
            n,
            up,
            down,
            join,
            meet,
            fingerprint: h.finish(),
        }
    }

    /// Validates an order and builds the lattice with default limits,
    /// discarding the relabeling.
    pub fn from_poset(order: &Poset) -> Result<Lattice, LatticeError> {
        build_lattice(order, &Limits::default()).map(|b| b.lattice)
    }

    /// The chain `0 < 1 < … < n-1`.
    pub fn chain(n: usize) -> Result<Lattice, LatticeError> {
        Lattice::chain_with(n, &Limits::default())
    }

    pub fn chain_with(n: usize, limits: &Limits) -> Result<Lattice, LatticeError> {
        if n == 0 {
            return Err(LatticeError::EmptyCarrier);
        }
        check_size(n, limits)?;
        Ok(Lattice::from_fns(n, |a, b| a <= b, usize::max, usize::min))
    }

    /// The powerset of a `k`-element set; element `i` is the subset with bit mask `i`.
    pub fn boolean_algebra(k: usize) -> Result<Lattice, LatticeError> {
        Lattice::boolean_algebra_with(k, &Limits::default())
    }

    pub fn boolean_algebra_with(k: usize, limits: &Limits) -> Result<Lattice, LatticeError> {
        if k >= usize::BITS as usize - 1 {
            return Err(LatticeError::SizeLimitExceeded {
                what: "lattice elements",
                limit: limits.max_elements,
                actual: usize::MAX,
            });
        }
        let n = 1usize << k;
        check_size(n, limits)?;
        Ok(Lattice::from_fns(n, |a, b| a & !b == 0, |a, b| a | b, |a, b| a & b))
    }

    /// The lattice of downsets of `p` ordered by inclusion.
    pub fn downset_lattice(p: &Poset) -> Result<Lattice, LatticeError> {
        Lattice::downset_lattice_with(p, &Limits::default())
    }

    pub fn downset_lattice_with(p: &Poset, limits: &Limits) -> Result<Lattice, LatticeError> {
        let masks = p.downset_masks(limits.max_elements.min(HARD_MAX_ELEMENTS))?;
        let index: HashMap<u64, usize> = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        Ok(Lattice::from_fns(
            masks.len(),
            |a, b| masks[a] & !masks[b] == 0,
            |a, b| index[&(masks[a] | masks[b])],
            |a, b| index[&(masks[a] & masks[b])],
        ))
    }

    /// Componentwise product; `(a, b)` becomes element `a * |B| + b`.
    pub fn product(a: &Lattice, b: &Lattice) -> Result<Lattice, LatticeError> {
        Lattice::product_with(a, b, &Limits::default())
    }

    pub fn product_with(a: &Lattice, b: &Lattice, limits: &Limits) -> Result<Lattice, LatticeError> {
        let nb = b.len();
        let n = a.len().saturating_mul(nb);
        check_size(n, limits)?;
        let split = |x: usize| (x / nb, x % nb);
        Ok(Lattice::from_fns(
            n,
            |x, y| {
                let ((xa, xb), (ya, yb)) = (split(x), split(y));
                a.leq(xa, ya) && b.leq(xb, yb)
            },
            |x, y| {
                let ((xa, xb), (ya, yb)) = (split(x), split(y));
                a.join(xa, ya) * nb + b.join(xb, yb)
            },
            |x, y| {
                let ((xa, xb), (ya, yb)) = (split(x), split(y));
                a.meet(xa, ya) * nb + b.meet(xb, yb)
            },
        ))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    /// Always false: a lattice has a bottom.
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn bottom(&self) -> usize {
        0
    }

    #[inline]
    pub fn top(&self) -> usize {
        self.n - 1
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.n + b] as usize
    }

    #[inline]
    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.n + b] as usize
    }

    pub fn up_set(&self, a: usize) -> &FixedBitSet {
        &self.up[a]
    }

    pub fn down_set(&self, a: usize) -> &FixedBitSet {
        &self.down[a]
    }

    /// Content hash of the operation tables. Congruences remember the
    /// fingerprint of the lattice they were built on.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn check_element(&self, a: usize) -> Result<(), LatticeError> {
        if a < self.n {
            Ok(())
        } else {
            Err(LatticeError::ElementOutOfRange { index: a, n: self.n })
        }
    }

    pub fn order_table(&self) -> Vec<Vec<bool>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.leq(i, j)).collect())
            .collect()
    }

    pub fn to_poset(&self) -> Poset {
        Poset::from_relation(&self.order_table()).expect("lattice order is a partial order")
    }

    /// Hasse diagram edges `(lower, upper)`.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in self.up[a].ones().filter(|&b| b != a) {
                let between = self.up[a]
                    .intersection(&self.down[b])
                    .any(|c| c != a && c != b);
                if !between {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// First triple violating distributivity, if any.
    pub fn distributivity_violation(&self) -> Option<(usize, usize, usize)> {
        for x in 0..self.n {
            for y in 0..self.n {
                let xy = self.meet(x, y);
                for z in y + 1..self.n {
                    if self.meet(x, self.join(y, z)) != self.join(xy, self.meet(x, z)) {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }

    /// Full recheck of every structural invariant: the labeling is a linear
    /// extension, the tables are the least upper and greatest lower bounds of
    /// the order, the bounds are `0` and `n - 1`, and distributivity holds.
    pub fn check_invariants(&self) -> Result<(), LatticeError> {
        let n = self.n;
        let poset = Poset::from_relation(&self.order_table())?;
        if !poset.is_naturally_labeled() {
            return Err(LatticeError::Inconsistent("labels are not a linear extension".into()));
        }
        for a in 0..n {
            if !self.leq(0, a) || !self.leq(a, n - 1) {
                return Err(LatticeError::Inconsistent(format!("{a} escapes the bounds")));
            }
            for b in 0..n {
                let j = self.join(a, b);
                let ub_ok = self.leq(a, j)
                    && self.leq(b, j)
                    && (0..n).all(|c| !(self.leq(a, c) && self.leq(b, c)) || self.leq(j, c));
                let m = self.meet(a, b);
                let lb_ok = self.leq(m, a)
                    && self.leq(m, b)
                    && (0..n).all(|c| !(self.leq(c, a) && self.leq(c, b)) || self.leq(c, m));
                if !ub_ok || !lb_ok {
                    return Err(LatticeError::Inconsistent(format!(
                        "tables disagree with the order at ({a}, {b})"
                    )));
                }
            }
        }
        if let Some((x, y, z)) = self.distributivity_violation() {
            return Err(LatticeError::NotDistributive { x, y, z });
        }
        Ok(())
    }

    /// The largest `x` with `a ∧ x <= b`.
    ///
    /// This is the arrow of `L` itself; for a finite lattice every ideal is
    /// principal, so it is also the arrow `↓a → ↓b` between principal ideals
    /// in the ideal frame.
    pub fn heyting_arrow(&self, a: usize, b: usize) -> usize {
        // The join of all candidates is again a candidate by distributivity.
        (0..self.n)
            .filter(|&x| self.leq(self.meet(a, x), b))
            .fold(0, |acc, x| self.join(acc, x))
    }

    pub fn pseudocomplement(&self, a: usize) -> usize {
        self.heyting_arrow(a, 0)
    }

    pub fn double_pseudocomplement(&self, a: usize) -> usize {
        self.pseudocomplement(self.pseudocomplement(a))
    }

    /// The complement of `a`, unique when it exists in a distributive lattice.
    pub fn complement(&self, a: usize) -> Option<usize> {
        let candidate = self.pseudocomplement(a);
        (self.join(a, candidate) == self.top()).then_some(candidate)
    }

    pub fn is_boolean(&self) -> bool {
        (0..self.n).all(|a| self.complement(a).is_some())
    }

    /// Non-bottom elements that are not the join of the elements strictly below them.
    pub fn join_irreducibles(&self) -> Vec<usize> {
        (1..self.n)
            .filter(|&j| {
                let below = self.down[j]
                    .ones()
                    .filter(|&x| x != j)
                    .fold(0, |acc, x| self.join(acc, x));
                below != j
            })
            .collect()
    }

    /// The join-irreducibles as a poset, together with the element behind each point.
    pub fn join_irreducible_poset(&self) -> (Poset, Vec<usize>) {
        let ji = self.join_irreducibles();
        let table: Vec<Vec<bool>> = ji
            .iter()
            .map(|&a| ji.iter().map(|&b| self.leq(a, b)).collect())
            .collect();
        let poset = Poset::from_relation(&table).expect("restriction of a partial order");
        (poset, ji)
    }

    /// Every downset of the order (fails for more than 64 elements or more
    /// than `limit` downsets).
    pub fn downsets(&self, limit: usize) -> Result<Vec<Downset>, LatticeError> {
        let masks = self.to_poset().downset_masks(limit)?;
        Ok(masks
            .into_iter()
            .map(|m| {
                let mut members = FixedBitSet::with_capacity(self.n);
                members.extend((0..self.n).filter(|&i| m >> i & 1 == 1));
                Downset { members }
            })
            .collect())
    }

    /// Every nonempty downset closed under binary joins, found by deciding
    /// elements bottom-up: including `x` forces `x ∨ y` for every included
    /// `y`, excluding `x` forces its whole up-set out. Requires `n <= 64`.
    pub fn ideals(&self, limit: usize) -> Result<Vec<Downset>, LatticeError> {
        if self.n > 64 {
            return Err(LatticeError::SizeLimitExceeded {
                what: "ideal search (elements)",
                limit: 64,
                actual: self.n,
            });
        }
        let mask = |s: &FixedBitSet| s.ones().fold(0u64, |m, i| m | 1 << i);
        let downs: Vec<u64> = (0..self.n).map(|i| mask(&self.down[i])).collect();
        let ups: Vec<u64> = (0..self.n).map(|i| mask(&self.up[i])).collect();
        let mut found: Vec<u64> = Vec::new();
        let mut stack = vec![(0usize, 0u64, 0u64)];
        while let Some((k, inc, exc)) = stack.pop() {
            if k == self.n {
                if inc != 0 {
                    found.push(inc);
                    if found.len() > limit {
                        return Err(LatticeError::SizeLimitExceeded {
                            what: "ideals",
                            limit,
                            actual: found.len(),
                        });
                    }
                }
                continue;
            }
            if exc >> k & 1 == 1 {
                stack.push((k + 1, inc, exc));
                continue;
            }
            let forced = inc >> k & 1 == 1;
            if !forced && ups[k] & inc == 0 {
                stack.push((k + 1, inc, exc | ups[k]));
            }
            // Everything below k has already been decided.
            if downs[k] & !(1u64 << k) & !inc != 0 {
                continue;
            }
            let mut next = inc | 1 << k;
            for y in (0..k).filter(|&y| inc >> y & 1 == 1) {
                next |= 1 << self.join(k, y);
            }
            if next & exc == 0 {
                stack.push((k + 1, next, exc));
            }
        }
        found.sort_unstable_by_key(|&m| (m.count_ones(), m));
        Ok(found
            .into_iter()
            .map(|m| {
                let mut members = FixedBitSet::with_capacity(self.n);
                members.extend((0..self.n).filter(|&i| m >> i & 1 == 1));
                Downset { members }
            })
            .collect())
    }

    /// The frame of ideals (nonempty directed downsets) ordered by inclusion,
    /// together with the largest member of each ideal.
    pub fn ideal_frame(&self, limits: &Limits) -> Result<(Lattice, Vec<usize>), LatticeError> {
        let ideals = self.ideals(limits.max_elements)?;
        let table: Vec<Vec<bool>> = ideals
            .iter()
            .map(|a| ideals.iter().map(|b| a.members.is_subset(&b.members)).collect())
            .collect();
        let built = build_lattice(&Poset::from_relation(&table)?, limits)?;
        let mut generators = vec![0; ideals.len()];
        for (old, d) in ideals.iter().enumerate() {
            generators[built.permutation[old]] = d.maximum(self).unwrap_or(0);
        }
        Ok((built.lattice, generators))
    }
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lattice")
            .field("n", &self.n)
            .field("covers", &self.covers())
            .finish()
    }
}

/// Exact isomorphism test for lattices of at most `limits.max_iso` elements.
pub fn is_isomorphic(a: &Lattice, b: &Lattice, limits: &Limits) -> Result<bool, LatticeError> {
    Ok(find_isomorphism(a, b, limits)?.is_some())
}

/// An order isomorphism `a -> b` as an element map, if one exists.
pub fn find_isomorphism(
    a: &Lattice,
    b: &Lattice,
    limits: &Limits,
) -> Result<Option<Vec<usize>>, LatticeError> {
    for l in [a, b] {
        if l.len() > limits.max_iso {
            return Err(LatticeError::SizeLimitExceeded {
                what: "isomorphism test",
                limit: limits.max_iso,
                actual: l.len(),
            });
        }
    }
    if a.len() != b.len() {
        return Ok(None);
    }
    Ok(iso::find_order_isomorphism(a.len(), |i, j| a.leq(i, j), |i, j| b.leq(i, j)))
}

/// A downward-closed set of lattice elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Downset {
    members: FixedBitSet,
}

impl Downset {
    pub fn principal(l: &Lattice, a: usize) -> Downset {
        Downset {
            members: l.down_set(a).clone(),
        }
    }

    /// Returns `None` unless `members` is downward closed.
    pub fn from_members(l: &Lattice, members: impl IntoIterator<Item = usize>) -> Option<Downset> {
        let mut set = FixedBitSet::with_capacity(l.len());
        set.extend(members);
        set.ones()
            .all(|a| l.down_set(a).is_subset(&set))
            .then_some(Downset { members: set })
    }

    pub fn contains(&self, a: usize) -> bool {
        self.members.contains(a)
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.ones()
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Nonempty and closed under binary joins.
    pub fn is_directed(&self, l: &Lattice) -> bool {
        !self.is_empty()
            && self
                .members
                .ones()
                .all(|a| self.members.ones().all(|b| self.members.contains(l.join(a, b))))
    }

    /// The largest member, if the downset has one.
    pub fn maximum(&self, l: &Lattice) -> Option<usize> {
        let top = self.members.ones().last()?;
        self.members.ones().all(|a| l.leq(a, top)).then_some(top)
    }
}
