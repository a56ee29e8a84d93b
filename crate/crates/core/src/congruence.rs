//! Congruences of a finite distributive lattice.
//!
//! A [`Congruence`] is a partition of the carrier stored as a label array in
//! which every element points at the smallest member of its block, so two
//! congruences on the same lattice are equal exactly when their arrays are.
//!
//! All "ideal" arguments are element generators: in a finite lattice every
//! ideal is principal, so the closed congruence of an ideal `↓i` is simply
//! `∇i` and the clear congruence of `↓i` is [`Congruences::clear_of_ideal`].

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::Hash;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::lattice::{build_lattice, Lattice, LatticeError, Limits};
use crate::poset::Poset;

/// Partition enumeration in the oracle is only attempted up to this size.
pub const ORACLE_MAX_ELEMENTS: usize = 7;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CongruenceError {
    #[error("congruences live on different lattices")]
    HostMismatch,
    #[error("the congruences are not comparable in the required direction")]
    NotComparable,
    #[error("not a congruence: {a} ~ {b} but translating by {x} separates them")]
    NotACongruence { a: usize, b: usize, x: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("size limit exceeded for {what}: {actual} > {limit}")]
    SizeLimitExceeded { what: &'static str, limit: usize, actual: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// An equivalence relation on a lattice that respects joins and meets.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Congruence {
    host: u64,
    part: Vec<u16>,
}

impl Congruence {
    /// Groups elements by a key; each block is labeled by its first element.
    fn from_keys<K: Hash + Eq>(l: &Lattice, key: impl Fn(usize) -> K) -> Congruence {
        Congruence::group(l.fingerprint(), l.len(), key)
    }

    fn group<K: Hash + Eq>(host: u64, n: usize, key: impl Fn(usize) -> K) -> Congruence {
        let mut first: HashMap<K, u16> = HashMap::with_capacity(n);
        let part = (0..n)
            .map(|i| *first.entry(key(i)).or_insert(i as u16))
            .collect();
        Congruence { host, part }
    }

    /// Validates an arbitrary labeling (equal labels mean same block).
    pub fn from_labels<K: Hash + Eq + Clone>(l: &Lattice, labels: &[K]) -> Result<Congruence, CongruenceError> {
        if labels.len() != l.len() {
            return Err(CongruenceError::InvalidPartition(format!(
                "{} labels for {} elements",
                labels.len(),
                l.len()
            )));
        }
        let c = Congruence::from_keys(l, |i| labels[i].clone());
        c.check_compatible(l)?;
        Ok(c)
    }

    /// Validates a list of blocks covering every element exactly once.
    pub fn from_blocks(l: &Lattice, blocks: &[Vec<usize>]) -> Result<Congruence, CongruenceError> {
        let mut label = vec![usize::MAX; l.len()];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(CongruenceError::InvalidPartition(format!("block {b} is empty")));
            }
            for &x in block {
                l.check_element(x)?;
                if label[x] != usize::MAX {
                    return Err(CongruenceError::InvalidPartition(format!(
                        "element {x} appears in more than one block"
                    )));
                }
                label[x] = b;
            }
        }
        if let Some(x) = label.iter().position(|&b| b == usize::MAX) {
            return Err(CongruenceError::InvalidPartition(format!("element {x} is in no block")));
        }
        Congruence::from_labels(l, &label)
    }

    fn check_compatible(&self, l: &Lattice) -> Result<(), CongruenceError> {
        for b in l.elements() {
            let a = self.rep(b);
            if a == b {
                continue;
            }
            for x in l.elements() {
                if !self.related(l.join(a, x), l.join(b, x)) || !self.related(l.meet(a, x), l.meet(b, x)) {
                    return Err(CongruenceError::NotACongruence { a, b, x });
                }
            }
        }
        Ok(())
    }

    /// Fingerprint of the lattice this congruence lives on.
    pub fn host(&self) -> u64 {
        self.host
    }

    pub fn len(&self) -> usize {
        self.part.len()
    }

    pub fn is_empty(&self) -> bool {
        self.part.is_empty()
    }

    /// Smallest member of the block of `a`.
    #[inline]
    pub fn rep(&self, a: usize) -> usize {
        self.part[a] as usize
    }

    #[inline]
    pub fn related(&self, a: usize, b: usize) -> bool {
        self.part[a] == self.part[b]
    }

    /// The canonical label array.
    pub fn labels(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.part.iter().map(|&p| p as usize)
    }

    pub fn block_count(&self) -> usize {
        self.part.iter().enumerate().filter(|&(i, &p)| p as usize == i).count()
    }

    /// Blocks in increasing order of their smallest member.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut index = HashMap::new();
        let mut out: Vec<Vec<usize>> = Vec::new();
        for (i, &p) in self.part.iter().enumerate() {
            let b = *index.entry(p).or_insert_with(|| {
                out.push(Vec::new());
                out.len() - 1
            });
            out[b].push(i);
        }
        out
    }

    pub fn block_of(&self, a: usize) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.related(a, x)).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        self.part.iter().enumerate().all(|(i, &p)| p as usize == i)
    }

    pub fn is_total(&self) -> bool {
        self.part.iter().all(|&p| p == 0)
    }

    /// Containment of relations, without the host check.
    fn contained_in(&self, other: &Congruence) -> bool {
        self.part
            .iter()
            .enumerate()
            .all(|(i, &p)| other.part[i] == other.part[p as usize])
    }
}

impl fmt::Debug for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Congruence{:?}", self.blocks())
    }
}

impl fmt::Display for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self
            .blocks()
            .iter()
            .map(|b| {
                let items: Vec<String> = b.iter().map(|x| x.to_string()).collect();
                format!("{{{}}}", items.join(","))
            })
            .collect();
        write!(f, "{}", blocks.join(" "))
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

macro_rules! mutated {
    ($m:ident) => {{
        #[cfg(feature = "mutation-hooks")]
        {
            crate::mutation::is_active(crate::mutation::Mutation::$m)
        }
        #[cfg(not(feature = "mutation-hooks"))]
        {
            false
        }
    }};
}

/// Congruence operations over one fixed lattice.
///
/// Element arguments must be in range; out-of-range elements panic.
/// Congruence arguments built on another lattice give
/// [`CongruenceError::HostMismatch`].
#[derive(Clone, Copy, Debug)]
pub struct Congruences<'a> {
    l: &'a Lattice,
}

impl<'a> Congruences<'a> {
    pub fn on(l: &'a Lattice) -> Self {
        Congruences { l }
    }

    pub fn lattice(&self) -> &'a Lattice {
        self.l
    }

    fn check(&self, c: &Congruence) -> Result<(), CongruenceError> {
        if c.host == self.l.fingerprint() && c.len() == self.l.len() {
            Ok(())
        } else {
            Err(CongruenceError::HostMismatch)
        }
    }

    /// The identity relation.
    pub fn diagonal(&self) -> Congruence {
        Congruence::from_keys(self.l, |i| i)
    }

    /// Everything related to everything.
    pub fn total(&self) -> Congruence {
        Congruence::from_keys(self.l, |_| ())
    }

    /// Principal closed congruence: `x ~ y` iff `x ∨ a = y ∨ a`.
    pub fn nabla(&self, a: usize) -> Congruence {
        Congruence::from_keys(self.l, |x| self.l.join(x, a))
    }

    /// Open congruence: `x ~ y` iff `x ∧ a = y ∧ a`.
    pub fn delta(&self, a: usize) -> Congruence {
        Congruence::from_keys(self.l, |x| self.l.meet(x, a))
    }

    /// The least congruence containing every pair.
    ///
    /// Union-find with a worklist: each merge of `a` and `b` schedules the
    /// merges of `a ∨ x, b ∨ x` and `a ∧ x, b ∧ x` for every `x`, until no
    /// merge succeeds.
    pub fn generate(&self, pairs: &[(usize, usize)]) -> Congruence {
        let l = self.l;
        let mut uf = UnionFind::new(l.len());
        let mut work: Vec<(usize, usize)> = pairs
            .iter()
            .copied()
            .filter(|&(a, b)| uf.union(a, b))
            .collect();
        let skip_meets = mutated!(DropMeetPropagation);
        while let Some((a, b)) = work.pop() {
            for x in l.elements() {
                let (p, q) = (l.join(a, x), l.join(b, x));
                if uf.union(p, q) {
                    work.push((p, q));
                }
                if skip_meets {
                    continue;
                }
                let (p, q) = (l.meet(a, x), l.meet(b, x));
                if uf.union(p, q) {
                    work.push((p, q));
                }
            }
        }
        let roots: Vec<usize> = l.elements().map(|i| uf.find(i)).collect();
        Congruence::from_keys(l, |i| roots[i])
    }

    /// `c ⊆ d` as relations.
    pub fn leq(&self, c: &Congruence, d: &Congruence) -> Result<bool, CongruenceError> {
        self.check(c)?;
        self.check(d)?;
        Ok(c.contained_in(d))
    }

    /// Blockwise intersection.
    pub fn meet(&self, c: &Congruence, d: &Congruence) -> Result<Congruence, CongruenceError> {
        self.check(c)?;
        self.check(d)?;
        Ok(Congruence::from_keys(self.l, |i| (c.part[i], d.part[i])))
    }

    /// The congruence generated by the union of both relations.
    pub fn join(&self, c: &Congruence, d: &Congruence) -> Result<Congruence, CongruenceError> {
        self.check(c)?;
        self.check(d)?;
        let pairs: Vec<(usize, usize)> = self
            .l
            .elements()
            .flat_map(|i| [(i, c.rep(i)), (i, d.rep(i))])
            .filter(|&(i, r)| i != r)
            .collect();
        Ok(self.generate(&pairs))
    }

    /// `∇a ∨ C`, computed as `{(x, y) : (x ∨ a, y ∨ a) ∈ C}`.
    pub fn join_with_nabla(&self, a: usize, c: &Congruence) -> Result<Congruence, CongruenceError> {
        self.check(c)?;
        Ok(Congruence::from_keys(self.l, |x| c.part[self.l.join(x, a)]))
    }

    /// `Δa ∨ C`, computed as `{(x, y) : (x ∧ a, y ∧ a) ∈ C}`.
    pub fn join_with_delta(&self, a: usize, c: &Congruence) -> Result<Congruence, CongruenceError> {
        self.check(c)?;
        Ok(Congruence::from_keys(self.l, |x| c.part[self.l.meet(x, a)]))
    }

    /// Largest element of the block of `a`. Blocks are convex sublattices,
    /// so the join of the block stays inside it.
    pub fn block_max(&self, c: &Congruence, a: usize) -> Result<usize, CongruenceError> {
        self.check(c)?;
        Ok(self
            .l
            .elements()
            .filter(|&x| c.related(a, x))
            .fold(c.rep(a), |acc, x| self.l.join(acc, x)))
    }

    /// Generator of the zero class `[0]_C`, an ideal and hence principal.
    pub fn zero_class_generator(&self, c: &Congruence) -> Result<usize, CongruenceError> {
        self.block_max(c, self.l.bottom())
    }

    /// The largest closed congruence below `c`, namely `∇` of its zero-class generator.
    pub fn closure(&self, c: &Congruence) -> Result<Congruence, CongruenceError> {
        let g = if mutated!(ClosureFromZeroClassMinimum) {
            self.check(c)?;
            c.rep(self.l.bottom())
        } else {
            self.zero_class_generator(c)?
        };
        Ok(self.nabla(g))
    }

    pub fn is_closed(&self, c: &Congruence) -> Result<bool, CongruenceError> {
        Ok(self.closure(c)? == *c)
    }

    /// Whether `d` is dense in `c`, i.e. `cl(d) <= c`. Requires `c <= d`.
    pub fn is_dense_in(&self, d: &Congruence, c: &Congruence) -> Result<bool, CongruenceError> {
        if !self.leq(c, d)? {
            return Err(CongruenceError::NotComparable);
        }
        self.leq(&self.closure(d)?, c)
    }

    /// Whether `cl(d)` is the diagonal.
    pub fn is_dense(&self, d: &Congruence) -> Result<bool, CongruenceError> {
        Ok(self.closure(d)?.is_diagonal())
    }

    /// The largest dense congruence: elements with the same annihilator
    /// `{x : a ∧ x = 0}` are identified.
    pub fn largest_dense(&self) -> Congruence {
        let l = self.l;
        Congruence::from_keys(l, |a| {
            let mut ann = FixedBitSet::with_capacity(l.len());
            ann.extend(l.elements().filter(|&x| l.meet(a, x) == l.bottom()));
            ann
        })
    }

    /// The clear congruence of the ideal `↓i`: `a ~ b` iff for every `x`,
    /// `a ∧ x <= i` exactly when `b ∧ x <= i`.
    pub fn clear_of_ideal(&self, i: usize) -> Congruence {
        let l = self.l;
        Congruence::from_keys(l, |a| {
            let mut key = FixedBitSet::with_capacity(l.len());
            key.extend(l.elements().filter(|&x| l.leq(l.meet(a, x), i)));
            key
        })
    }

    /// The same clear congruence grouped by the Heyting arrow `a → i`.
    ///
    /// The arrow is computed in the ideal frame of the lattice, which for a
    /// finite lattice is the lattice itself. (Read literally, the source
    /// statement places the arrow in the ideal frame of `I`; the arrows here
    /// go between ideals of `L`.)
    pub fn clear_of_ideal_by_arrow(&self, i: usize) -> Congruence {
        Congruence::from_keys(self.l, |a| self.l.heyting_arrow(a, i))
    }

    /// The largest congruence dense in `c`: `a ~ b` iff for every `x`,
    /// `a ∧ x ~_C 0` exactly when `b ∧ x ~_C 0`.
    pub fn largest_dense_in(&self, c: &Congruence) -> Result<Congruence, CongruenceError> {
        self.check(c)?;
        let l = self.l;
        let ignore_c = mutated!(DenseInIgnoresCongruence);
        Ok(Congruence::from_keys(l, |a| {
            let mut key = FixedBitSet::with_capacity(l.len());
            key.extend(l.elements().filter(|&x| {
                let m = l.meet(a, x);
                if ignore_c {
                    m == l.bottom()
                } else {
                    c.related(m, l.bottom())
                }
            }));
            key
        }))
    }

    /// A congruence is clear when it is the largest congruence dense in itself.
    pub fn is_clear(&self, c: &Congruence) -> Result<bool, CongruenceError> {
        Ok(self.largest_dense_in(c)? == *c)
    }

    /// The quotient lattice on the blocks of `c` and the map onto it.
    pub fn quotient(&self, c: &Congruence) -> Result<QuotientMap, CongruenceError> {
        self.check(c)?;
        let l = self.l;
        // Block minima sorted ascending form a linear extension of the
        // quotient order, since the minimum of a block is its meet.
        let reps: Vec<usize> = l.elements().filter(|&x| c.rep(x) == x).collect();
        let mut index = vec![0; l.len()];
        for (k, &r) in reps.iter().enumerate() {
            index[r] = k;
        }
        let table: Vec<Vec<bool>> = reps
            .iter()
            .map(|&a| reps.iter().map(|&b| c.rep(l.meet(a, b)) == a).collect())
            .collect();
        let built = build_lattice(&Poset::from_relation(&table)?, &Limits::default())?;
        let map = l
            .elements()
            .map(|x| built.permutation[index[c.rep(x)]])
            .collect();
        Ok(QuotientMap {
            source: l.fingerprint(),
            kernel: c.clone(),
            target: built.lattice,
            map,
        })
    }

    /// The meet of all clear congruences `∂i` lying above `c`.
    pub fn meet_of_clear_above(&self, c: &Congruence) -> Result<Congruence, CongruenceError> {
        self.check(c)?;
        let mut acc = self.total();
        for i in self.l.elements() {
            let clear = self.clear_of_ideal(i);
            if c.contained_in(&clear) {
                acc = self.meet(&acc, &clear)?;
            }
        }
        Ok(acc)
    }

    /// For a pair outside `c`, an ideal generator `i` with `∂i >= c` and
    /// `(a, b) ∉ ∂i`: the largest element of the block of `a ∧ b`.
    /// Returns `None` when `(a, b) ∈ c`.
    pub fn separating_ideal(&self, c: &Congruence, a: usize, b: usize) -> Result<Option<usize>, CongruenceError> {
        self.check(c)?;
        if c.related(a, b) {
            return Ok(None);
        }
        // (a, b) ∈ C iff (a ∧ b, a ∨ b) ∈ C, so the comparable pair suffices.
        let low = self.l.meet(a, b);
        self.block_max(c, low).map(Some)
    }

    /// The same generator reached through closures: the zero-class
    /// generator of `cl(∇a ∨ C)` for `a = low ∧ high`.
    pub fn separating_ideal_by_closure(
        &self,
        c: &Congruence,
        a: usize,
        b: usize,
    ) -> Result<Option<usize>, CongruenceError> {
        self.check(c)?;
        if c.related(a, b) {
            return Ok(None);
        }
        let low = self.l.meet(a, b);
        let joined = self.join_with_nabla(low, c)?;
        let closed = self.closure(&joined)?;
        self.zero_class_generator(&closed).map(Some)
    }

    /// `𝔇 ∨ ∇a`, which is the clear congruence of `(↓a)**`.
    pub fn dl_join_nabla(&self, a: usize) -> Congruence {
        self.join(&self.largest_dense(), &self.nabla(a))
            .expect("both congruences are built on this lattice")
    }

    /// Whether the largest dense congruence is the diagonal.
    pub fn is_d_reduced(&self) -> bool {
        self.largest_dense().is_diagonal()
    }
}

/// Whether `L` is d-reduced (its largest dense congruence is trivial).
pub fn is_d_reduced(l: &Lattice) -> bool {
    Congruences::on(l).is_d_reduced()
}

/// The pseudocomplement route: no two distinct elements share a pseudocomplement.
pub fn is_d_reduced_by_pseudocomplement(l: &Lattice) -> bool {
    let mut seen = HashSet::new();
    l.elements().all(|a| seen.insert(l.pseudocomplement(a)))
}

/// A surjective lattice homomorphism onto the quotient by its kernel.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    source: u64,
    kernel: Congruence,
    target: Lattice,
    map: Vec<usize>,
}

impl QuotientMap {
    pub fn target(&self) -> &Lattice {
        &self.target
    }

    pub fn kernel(&self) -> &Congruence {
        &self.kernel
    }

    pub fn source_fingerprint(&self) -> u64 {
        self.source
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    /// The congruence on the source relating `x, y` when their images are
    /// related by `d`.
    pub fn pull_back(&self, d: &Congruence) -> Result<Congruence, CongruenceError> {
        if d.host != self.target.fingerprint() || d.len() != self.target.len() {
            return Err(CongruenceError::HostMismatch);
        }
        Ok(Congruence::group(self.source, self.map.len(), |x| d.part[self.map[x]]))
    }

    /// The image of a congruence `a >= kernel` on the target.
    pub fn push_forward(&self, a: &Congruence) -> Result<Congruence, CongruenceError> {
        if a.host != self.source || a.len() != self.map.len() {
            return Err(CongruenceError::HostMismatch);
        }
        if !self.kernel.contained_in(a) {
            return Err(CongruenceError::NotComparable);
        }
        let mut preimage = vec![usize::MAX; self.target.len()];
        for (x, &t) in self.map.iter().enumerate() {
            if preimage[t] == usize::MAX {
                preimage[t] = x;
            }
        }
        Ok(Congruence::from_keys(&self.target, |t| a.part[preimage[t]]))
    }
}

/// Flags computed for each member of a congruence frame.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct Tags {
    pub closed: bool,
    pub open: bool,
    pub clear: bool,
    pub dense: bool,
}

/// Every congruence of a lattice, ordered by refinement.
///
/// Sorted by the number of merged elements and then by label array, so the
/// diagonal comes first and the total congruence last.
#[derive(Clone, Debug)]
pub struct CongruenceFrame {
    host: u64,
    congs: Vec<Congruence>,
    leq: Vec<FixedBitSet>,
    tags: Vec<Tags>,
}

impl CongruenceFrame {
    pub fn len(&self) -> usize {
        self.congs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.congs.is_empty()
    }

    pub fn host(&self) -> u64 {
        self.host
    }

    pub fn congruences(&self) -> &[Congruence] {
        &self.congs
    }

    pub fn get(&self, i: usize) -> &Congruence {
        &self.congs[i]
    }

    pub fn tags(&self, i: usize) -> Tags {
        self.tags[i]
    }

    /// Whether congruence `i` is contained in congruence `j`.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i].contains(j)
    }

    pub fn index_of(&self, c: &Congruence) -> Option<usize> {
        self.congs.iter().position(|d| d == c)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Congruence, Tags)> {
        self.congs.iter().zip(self.tags.iter().copied())
    }

    /// Covering pairs `(smaller, larger)` of the refinement order.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let m = self.len();
        let mut out = Vec::new();
        for i in 0..m {
            for j in self.leq[i].ones().filter(|&j| j != i) {
                if !(0..m).any(|k| k != i && k != j && self.leq(i, k) && self.leq(k, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Closes `{∇a} ∪ {Δa}` under binary joins and meets, then tags each result.
pub fn enumerate_congruences(l: &Lattice, limits: &Limits) -> Result<CongruenceFrame, CongruenceError> {
    if l.len() > limits.max_frame_elements {
        return Err(CongruenceError::SizeLimitExceeded {
            what: "lattice elements for frame enumeration",
            limit: limits.max_frame_elements,
            actual: l.len(),
        });
    }
    // A finite distributive lattice has 2^|J(L)| congruences.
    let irreducibles = l.join_irreducibles().len();
    let expected = 1usize.checked_shl(irreducibles as u32).unwrap_or(usize::MAX);
    if irreducibles >= usize::BITS as usize || expected > limits.max_congruences {
        return Err(CongruenceError::SizeLimitExceeded {
            what: "congruences",
            limit: limits.max_congruences,
            actual: expected,
        });
    }
    let ops = Congruences::on(l);
    let mut seen: HashSet<Congruence> = HashSet::new();
    let mut congs: Vec<Congruence> = Vec::new();
    let mut opens: HashSet<Congruence> = HashSet::new();
    for a in l.elements() {
        let d = ops.delta(a);
        opens.insert(d.clone());
        for c in [ops.nabla(a), d] {
            if seen.insert(c.clone()) {
                congs.push(c);
            }
        }
    }
    let mut i = 0;
    while i < congs.len() {
        for j in 0..=i {
            let (a, b) = (congs[i].clone(), congs[j].clone());
            for c in [ops.join(&a, &b)?, ops.meet(&a, &b)?] {
                if seen.insert(c.clone()) {
                    congs.push(c);
                }
            }
        }
        i += 1;
        if congs.len() > limits.max_congruences {
            return Err(CongruenceError::SizeLimitExceeded {
                what: "congruences",
                limit: limits.max_congruences,
                actual: congs.len(),
            });
        }
    }
    congs.sort_by_key(|c| (l.len() - c.block_count(), c.part.clone()));
    let m = congs.len();
    let leq = (0..m)
        .map(|i| {
            let mut row = FixedBitSet::with_capacity(m);
            row.extend((0..m).filter(|&j| congs[i].contained_in(&congs[j])));
            row
        })
        .collect();
    let tags = congs
        .iter()
        .map(|c| {
            let closure = ops.closure(c)?;
            Ok(Tags {
                closed: closure == *c,
                open: opens.contains(c),
                clear: ops.is_clear(c)?,
                dense: closure.is_diagonal(),
            })
        })
        .collect::<Result<_, CongruenceError>>()?;
    Ok(CongruenceFrame {
        host: l.fingerprint(),
        congs,
        leq,
        tags,
    })
}

/// Independent reference: filters every set partition of the carrier for
/// compatibility with joins and meets. Only for lattices of at most
/// [`ORACLE_MAX_ELEMENTS`] elements.
pub fn oracle_enumerate_congruences(l: &Lattice) -> Result<Vec<Congruence>, CongruenceError> {
    let n = l.len();
    if n > ORACLE_MAX_ELEMENTS {
        return Err(CongruenceError::SizeLimitExceeded {
            what: "lattice elements for the partition oracle",
            limit: ORACLE_MAX_ELEMENTS,
            actual: n,
        });
    }
    let mut out = Vec::new();
    // Restricted growth strings: labels[0] = 0, labels[i] <= 1 + max of earlier labels.
    let mut labels = vec![0usize; n];
    loop {
        let compatible = (0..n).all(|a| {
            (a + 1..n).filter(|&b| labels[a] == labels[b]).all(|b| {
                (0..n).all(|x| {
                    labels[l.join(a, x)] == labels[l.join(b, x)]
                        && labels[l.meet(a, x)] == labels[l.meet(b, x)]
                })
            })
        });
        if compatible {
            let mut first = HashMap::new();
            let part = (0..n)
                .map(|i| *first.entry(labels[i]).or_insert(i as u16))
                .collect();
            out.push(Congruence {
                host: l.fingerprint(),
                part,
            });
        }
        // Advance to the next restricted growth string.
        let mut k = n;
        loop {
            if k <= 1 {
                return Ok(out);
            }
            k -= 1;
            let bound = labels[..k].iter().max().copied().unwrap_or(0) + 1;
            if labels[k] < bound {
                labels[k] += 1;
                for v in &mut labels[k + 1..] {
                    *v = 0;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3() -> Lattice {
        Lattice::chain(3).unwrap()
    }

    #[test]
    fn nabla_and_delta_on_chain_three() {
        let l = chain3();
        let ops = Congruences::on(&l);
        assert_eq!(ops.nabla(1).blocks(), vec![vec![0, 1], vec![2]]);
        assert_eq!(ops.delta(1).blocks(), vec![vec![0], vec![1, 2]]);
    }

    #[test]
    fn nabla_and_delta_extremes() {
        let l = Lattice::boolean_algebra(2).unwrap();
        let ops = Congruences::on(&l);
        assert!(ops.nabla(0).is_diagonal());
        assert!(ops.nabla(3).is_total());
        assert!(ops.delta(3).is_diagonal());
        assert!(ops.delta(0).is_total());
    }

    #[test]
    fn atom_of_square_splits_in_two() {
        let l = Lattice::boolean_algebra(2).unwrap();
        let ops = Congruences::on(&l);
        let (n, d) = (ops.nabla(1), ops.delta(1));
        assert_eq!(n.block_count(), 2);
        assert_eq!(d.block_count(), 2);
        assert!(ops.meet(&n, &d).unwrap().is_diagonal());
        assert!(ops.join(&n, &d).unwrap().is_total());
    }

    #[test]
    fn generate_edge_cases() {
        let l = chain3();
        let ops = Congruences::on(&l);
        assert_eq!(ops.generate(&[(0, 1)]), ops.nabla(1));
        assert!(ops.generate(&[]).is_diagonal());
        assert!(ops.generate(&[(0, 2)]).is_total());
        assert_eq!(ops.generate(&[(1, 2)]), ops.delta(1));
    }

    #[test]
    fn join_unit_and_complements() {
        let l = chain3();
        let ops = Congruences::on(&l);
        let diag = ops.diagonal();
        let c = ops.nabla(1);
        assert_eq!(ops.join(&c, &diag).unwrap(), c);
        assert!(ops.join(&ops.nabla(1), &ops.delta(1)).unwrap().is_total());
        assert!(ops.meet(&ops.nabla(1), &ops.delta(1)).unwrap().is_diagonal());
    }

    #[test]
    fn host_mismatch_is_an_error() {
        let a = chain3();
        let b = Lattice::chain(4).unwrap();
        let c = Congruences::on(&b).nabla(1);
        let ops = Congruences::on(&a);
        assert_eq!(ops.join(&ops.diagonal(), &c), Err(CongruenceError::HostMismatch));
        assert_eq!(ops.leq(&c, &c), Err(CongruenceError::HostMismatch));
    }

    #[test]
    fn zero_class_and_closure_on_chain_three() {
        let l = chain3();
        let ops = Congruences::on(&l);
        assert_eq!(ops.zero_class_generator(&ops.diagonal()).unwrap(), 0);
        assert_eq!(ops.zero_class_generator(&ops.total()).unwrap(), 2);
        assert_eq!(ops.zero_class_generator(&ops.nabla(1)).unwrap(), 1);
        assert!(ops.closure(&ops.delta(1)).unwrap().is_diagonal());
        assert!(ops.is_closed(&ops.nabla(1)).unwrap());
        assert!(ops.closure(&ops.total()).unwrap().is_total());
    }

    #[test]
    fn density_needs_comparability() {
        let l = chain3();
        let ops = Congruences::on(&l);
        assert_eq!(
            ops.is_dense_in(&ops.nabla(1), &ops.delta(1)),
            Err(CongruenceError::NotComparable)
        );
        assert!(ops.is_dense_in(&ops.delta(1), &ops.diagonal()).unwrap());
        assert!(!ops.is_dense_in(&ops.nabla(1), &ops.diagonal()).unwrap());
    }

    #[test]
    fn clear_congruences_of_chain_three() {
        let l = chain3();
        let ops = Congruences::on(&l);
        assert_eq!(ops.largest_dense(), ops.delta(1));
        assert_eq!(ops.clear_of_ideal(0), ops.delta(1));
        assert_eq!(ops.clear_of_ideal(1), ops.nabla(1));
        assert!(ops.clear_of_ideal(2).is_total());
        assert!(!ops.leq(&ops.clear_of_ideal(0), &ops.clear_of_ideal(1)).unwrap());
        assert!(!ops.leq(&ops.clear_of_ideal(1), &ops.clear_of_ideal(0)).unwrap());
        assert_eq!(ops.largest_dense_in(&ops.delta(1)).unwrap(), ops.delta(1));
        assert!(!ops.is_clear(&ops.diagonal()).unwrap());
    }

    #[test]
    fn boolean_algebras_are_d_reduced() {
        for k in 0..4 {
            let l = Lattice::boolean_algebra(k).unwrap();
            assert!(is_d_reduced(&l));
            assert!(is_d_reduced_by_pseudocomplement(&l));
        }
        let l = Lattice::boolean_algebra(2).unwrap();
        assert!(Congruences::on(&l).clear_of_ideal(0).is_diagonal());
        assert!(!is_d_reduced(&chain3()));
        assert!(is_d_reduced(&Lattice::chain(1).unwrap()));
        assert!(is_d_reduced(&Lattice::chain(2).unwrap()));
    }

    #[test]
    fn quotients_of_chain_three() {
        let l = chain3();
        let ops = Congruences::on(&l);
        let q = ops.quotient(&ops.nabla(1)).unwrap();
        assert_eq!(q.target().len(), 2);
        assert_eq!(q.map(), &[0, 0, 1]);
        assert_eq!(ops.quotient(&ops.diagonal()).unwrap().target().len(), 3);
        assert_eq!(ops.quotient(&ops.total()).unwrap().target().len(), 1);
    }

    #[test]
    fn meet_of_clear_on_chain_three() {
        let l = chain3();
        let ops = Congruences::on(&l);
        assert!(ops.meet_of_clear_above(&ops.diagonal()).unwrap().is_diagonal());
        assert!(ops.meet_of_clear_above(&ops.total()).unwrap().is_total());
        // (0, 2) ∉ Δ1: block of 0 is {0}, so the witness ideal is ↓0.
        let d = ops.delta(1);
        assert_eq!(ops.separating_ideal(&d, 0, 2).unwrap(), Some(0));
        assert_eq!(ops.separating_ideal(&d, 1, 2).unwrap(), None);
    }

    #[test]
    fn dl_join_nabla_on_chain_three() {
        let l = chain3();
        let ops = Congruences::on(&l);
        assert_eq!(ops.dl_join_nabla(0), ops.largest_dense());
        assert!(ops.dl_join_nabla(2).is_total());
        assert!(ops.dl_join_nabla(1).is_total());
        assert_eq!(l.double_pseudocomplement(1), 2);
    }

    #[test]
    fn frame_of_chain_three() {
        let l = chain3();
        let frame = enumerate_congruences(&l, &Limits::default()).unwrap();
        assert_eq!(frame.len(), 4);
        assert!(frame.get(0).is_diagonal());
        assert!(frame.get(3).is_total());
        let clear: Vec<usize> = (0..4).filter(|&i| frame.tags(i).clear).collect();
        assert_eq!(clear.len(), 3);
        let dense: Vec<&Congruence> = frame.iter().filter(|(_, t)| t.dense).map(|(c, _)| c).collect();
        assert_eq!(dense.len(), 2);
    }

    #[test]
    fn oracle_small_cases() {
        assert_eq!(oracle_enumerate_congruences(&Lattice::chain(1).unwrap()).unwrap().len(), 1);
        assert_eq!(oracle_enumerate_congruences(&chain3()).unwrap().len(), 4);
        assert_eq!(
            oracle_enumerate_congruences(&Lattice::boolean_algebra(2).unwrap()).unwrap().len(),
            4
        );
        assert!(matches!(
            oracle_enumerate_congruences(&Lattice::chain(8).unwrap()),
            Err(CongruenceError::SizeLimitExceeded { .. })
        ));
    }

    #[test]
    fn blocks_must_be_compatible() {
        let l = chain3();
        // {0,2},{1} is not convex.
        assert!(matches!(
            Congruence::from_blocks(&l, &[vec![0, 2], vec![1]]),
            Err(CongruenceError::NotACongruence { .. })
        ));
        assert!(matches!(
            Congruence::from_blocks(&l, &[vec![0, 1]]),
            Err(CongruenceError::InvalidPartition(_))
        ));
        let c = Congruence::from_blocks(&l, &[vec![2], vec![0, 1]]).unwrap();
        assert_eq!(c, Congruences::on(&l).nabla(1));
    }
}
