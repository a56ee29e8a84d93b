//! Named, exhaustive property checks over a corpus of finite distributive
//! lattices, plus seeded sampled checks on the countable lattice `M`.
//!
//! Every check either passes or returns the first counterexample it finds,
//! serialized in the lattice and congruence file formats so it can be
//! replayed from the command line.

use std::collections::HashSet;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::congruence::{
    enumerate_congruences, is_d_reduced, is_d_reduced_by_pseudocomplement, oracle_enumerate_congruences,
    Congruence, CongruenceError, CongruenceFrame, Congruences, QuotientMap, ORACLE_MAX_ELEMENTS,
};
use crate::io::{CongruenceFile, LatticeFile};
use crate::lattice::{find_isomorphism, Lattice, LatticeError, Limits};
use crate::mfamily::{
    m_d_reduced_witness, m_nabla_related, m_nabla_witness, m_partial_related, m_pseudocomplement_principal,
    m_quotient_cofinite, sample_finite, sample_m_pairs, MElement, MIdealRep, NatSet,
};
use crate::poset::{enumerate_posets_up_to, Poset};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown check {0:?}")]
    UnknownCheck(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// A corpus lattice with its lazily enumerated congruence frame.
#[derive(Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub lattice: Lattice,
    limits: Limits,
    frame: OnceLock<Result<CongruenceFrame, CongruenceError>>,
}

impl CorpusEntry {
    pub fn new(name: impl Into<String>, lattice: Lattice, limits: &Limits) -> CorpusEntry {
        CorpusEntry {
            name: name.into(),
            lattice,
            limits: limits.clone(),
            frame: OnceLock::new(),
        }
    }

    pub fn frame(&self) -> Result<&CongruenceFrame, CongruenceError> {
        self.frame
            .get_or_init(|| enumerate_congruences(&self.lattice, &self.limits))
            .as_ref()
            .map_err(Clone::clone)
    }
}

#[derive(Debug, Default)]
pub struct Corpus {
    entries: Vec<CorpusEntry>,
}

impl Corpus {
    pub fn from_lattices(lattices: impl IntoIterator<Item = (String, Lattice)>, limits: &Limits) -> Corpus {
        Corpus {
            entries: lattices
                .into_iter()
                .map(|(name, l)| CorpusEntry::new(name, l, limits))
                .collect(),
        }
    }

    pub fn entries(&self) -> &[CorpusEntry] {
        &self.entries
    }

    pub fn lattices(&self) -> impl Iterator<Item = &Lattice> {
        self.entries.iter().map(|e| &e.lattice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Downset lattices of every poset with at most `max_poset_points` points
/// (so every distributive lattice with that many join-irreducibles, once
/// each up to isomorphism), together with the chains of length 1 to 6 and
/// the Boolean algebras on 0 to 3 atoms.
pub fn build_corpus(max_poset_points: usize, limits: &Limits) -> Result<Corpus, VerifyError> {
    let mut candidates: Vec<(String, Poset)> = Vec::new();
    for k in 1..=6 {
        candidates.push((format!("chain({k})"), Poset::chain(k - 1)));
    }
    for k in 0..=3 {
        candidates.push((format!("boolean_algebra({k})"), Poset::antichain(k)));
    }
    let posets = enumerate_posets_up_to(max_poset_points, limits)?;
    let mut per_size = vec![0usize; max_poset_points + 1];
    for p in posets {
        let k = per_size[p.len()];
        per_size[p.len()] += 1;
        candidates.push((format!("downsets(poset {}#{k})", p.len()), p));
    }
    // Birkhoff: downset lattices are isomorphic iff their posets are.
    let mut kept: Vec<(String, Poset)> = Vec::new();
    for (name, p) in candidates {
        if !kept.iter().any(|(_, q)| q.is_isomorphic(&p)) {
            kept.push((name, p));
        }
    }
    let lattices = kept
        .into_iter()
        .map(|(name, p)| Ok((name, Lattice::downset_lattice_with(&p, limits)?)))
        .collect::<Result<Vec<_>, LatticeError>>()?;
    Ok(Corpus::from_lattices(lattices, limits))
}

/// Settings shared by every check.
#[derive(Clone, Debug)]
pub struct CheckContext {
    pub seed: u64,
    pub m_samples: usize,
    pub limits: Limits,
}

impl Default for CheckContext {
    fn default() -> Self {
        CheckContext {
            seed: 0x6b66_7261_6d65,
            m_samples: 10_000,
            limits: Limits::default(),
        }
    }
}

/// A failing instance, in replayable form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub lattice_name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeFile>,
    pub congruences: Vec<CongruenceFile>,
    pub elements: Vec<usize>,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub corpus_size: usize,
    pub passed: bool,
    pub counterexample: Option<Counterexample>,
    /// Wall time; left out of the JSON so reports stay byte-identical.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CheckReport {
    /// One line: `PASS name (n lattices)` or `FAIL name (…): message`.
    pub fn line(&self) -> String {
        match &self.counterexample {
            None => format!("PASS {} ({} lattices)", self.name, self.corpus_size),
            Some(cx) => format!(
                "FAIL {} ({} lattices): {} [{}]",
                self.name, self.corpus_size, cx.message, cx.lattice_name
            ),
        }
    }
}

/// What a single check found.
#[derive(Debug)]
pub struct Failure {
    message: String,
    congruences: Vec<Congruence>,
    elements: Vec<usize>,
}

impl Failure {
    fn new(message: impl Into<String>) -> Failure {
        Failure {
            message: message.into(),
            congruences: Vec::new(),
            elements: Vec::new(),
        }
    }

    fn congs<'c>(mut self, cs: impl IntoIterator<Item = &'c Congruence>) -> Failure {
        self.congruences.extend(cs.into_iter().cloned());
        self
    }

    fn elems(mut self, es: impl IntoIterator<Item = usize>) -> Failure {
        self.elements.extend(es);
        self
    }
}

impl From<CongruenceError> for Failure {
    fn from(e: CongruenceError) -> Self {
        Failure::new(format!("operation failed: {e}"))
    }
}

impl From<LatticeError> for Failure {
    fn from(e: LatticeError) -> Self {
        Failure::new(format!("operation failed: {e}"))
    }
}

fn ensure(cond: bool, failure: impl FnOnce() -> Failure) -> Result<(), Failure> {
    if cond {
        Ok(())
    } else {
        Err(failure())
    }
}

/// Whether a per-lattice check said anything about a lattice.
enum Coverage {
    Checked,
    NotApplicable,
}

type LatticeCheck = fn(&CorpusEntry, &CheckContext) -> Result<Coverage, Failure>;
type GlobalCheck = fn(&CheckContext) -> Result<(), (String, Option<Box<Lattice>>, Failure)>;

#[derive(Clone, Copy)]
enum CheckKind {
    PerLattice(LatticeCheck),
    Global(GlobalCheck),
}

/// A registry entry.
#[derive(Clone, Copy)]
pub struct RegisteredCheck {
    pub name: &'static str,
    pub statement: &'static str,
    kind: CheckKind,
}

impl std::fmt::Debug for RegisteredCheck {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RegisteredCheck").field("name", &self.name).finish()
    }
}

const REGISTRY: &[RegisteredCheck] = &[
    RegisteredCheck {
        name: "interval_lemma",
        statement: "(a,b) ∈ C iff some x <= a,b <= y has (x,y) ∈ C, iff (a∧b, a∨b) ∈ C",
        kind: CheckKind::PerLattice(check_interval_lemma),
    },
    RegisteredCheck {
        name: "nabla_hom",
        statement: "a ↦ ∇a is an injective lattice homomorphism; ∇a, Δa are generated by (0,a), (a,1) and are complements",
        kind: CheckKind::PerLattice(check_nabla_hom),
    },
    RegisteredCheck {
        name: "join_formulas",
        statement: "∇a ∨ C = {(x,y) : (x∨a, y∨a) ∈ C} and Δa ∨ C = {(x,y) : (x∧a, y∧a) ∈ C}",
        kind: CheckKind::PerLattice(check_join_formulas),
    },
    RegisteredCheck {
        name: "generalized_join",
        statement: "∇I ∨ C = {(x,y) : (x∨i, y∨i) ∈ C for some i ∈ I}; every ideal is principal",
        kind: CheckKind::PerLattice(check_generalized_join),
    },
    RegisteredCheck {
        name: "closure_props",
        statement: "cl is monotone, deflationary, idempotent, preserves binary meets and gives the largest closed congruence below",
        kind: CheckKind::PerLattice(check_closure_props),
    },
    RegisteredCheck {
        name: "closure_in_quotient",
        statement: "for A >= C, the closure of the image of A in L/C pulls back to C ∨ cl(A)",
        kind: CheckKind::PerLattice(check_closure_in_quotient),
    },
    RegisteredCheck {
        name: "dense_map",
        statement: "D is dense in C iff L/C → L/D sends only bottom to bottom",
        kind: CheckKind::PerLattice(check_dense_map),
    },
    RegisteredCheck {
        name: "dL_largest",
        statement: "the annihilator relation a ∧ x = 0 ⟺ b ∧ x = 0 is the largest dense congruence",
        kind: CheckKind::PerLattice(check_dl_largest),
    },
    RegisteredCheck {
        name: "partial_formula",
        statement: "a ∧ x ∈ I ⟺ b ∧ x ∈ I is the largest congruence dense in ∇I; I ↦ ∂I is injective and reflects order",
        kind: CheckKind::PerLattice(check_partial_formula),
    },
    RegisteredCheck {
        name: "heyting_form",
        statement: "∂I relates a, b iff ↓a → I = ↓b → I",
        kind: CheckKind::PerLattice(check_heyting_form),
    },
    RegisteredCheck {
        name: "sierpinski",
        statement: "on the three-element chain ∂0 = Δa and ∂a = ∇a are incomparable clear congruences",
        kind: CheckKind::Global(check_sierpinski),
    },
    RegisteredCheck {
        name: "meet_of_clear",
        statement: "every congruence is the meet of the clear congruences above it, with an explicit separating ideal",
        kind: CheckKind::PerLattice(check_meet_of_clear),
    },
    RegisteredCheck {
        name: "quotient_by_clear",
        statement: "L/C is d-reduced iff C is clear",
        kind: CheckKind::PerLattice(check_quotient_by_clear),
    },
    RegisteredCheck {
        name: "pseudo_injective",
        statement: "L is d-reduced iff distinct principal ideals have distinct pseudocomplements",
        kind: CheckKind::PerLattice(check_pseudo_injective),
    },
    RegisteredCheck {
        name: "dreduced_iff_boolean",
        statement: "a finite distributive lattice is d-reduced iff it is Boolean",
        kind: CheckKind::PerLattice(check_dreduced_iff_boolean),
    },
    RegisteredCheck {
        name: "g_injective",
        statement: "L is d-reduced iff a ↦ [↓a] into the ideal frame modulo its largest dense congruence is injective",
        kind: CheckKind::PerLattice(check_g_injective),
    },
    RegisteredCheck {
        name: "hereditary",
        statement: "every quotient of L is d-reduced iff L is Boolean",
        kind: CheckKind::PerLattice(check_hereditary),
    },
    RegisteredCheck {
        name: "nabla_clear",
        statement: "if L is d-reduced then every ∇a is clear",
        kind: CheckKind::PerLattice(check_nabla_clear),
    },
    RegisteredCheck {
        name: "dL_join_nabla",
        statement: "𝔇 ∨ ∇a = ∂ of (↓a)**",
        kind: CheckKind::PerLattice(check_dl_join_nabla),
    },
    RegisteredCheck {
        name: "final_hom",
        statement: "a ↦ 𝔇 ∨ ∇a preserves binary meets and nonempty joins into ↑𝔇, with kernel 𝔇",
        kind: CheckKind::PerLattice(check_final_hom),
    },
    RegisteredCheck {
        name: "oracle_equiv",
        statement: "frame enumeration agrees with the partition-filter oracle (n <= 7)",
        kind: CheckKind::PerLattice(check_oracle_equiv),
    },
    RegisteredCheck {
        name: "m_example",
        statement: "M is d-reduced and not Boolean, yet M / ∇(fin-of co{2}) is the three-element chain",
        kind: CheckKind::Global(check_m_example),
    },
];

pub fn registry() -> &'static [RegisteredCheck] {
    REGISTRY
}

/// Runs one named check over the corpus.
pub fn run_check(name: &str, corpus: &Corpus, ctx: &CheckContext) -> Result<CheckReport, VerifyError> {
    let registered = REGISTRY
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| VerifyError::UnknownCheck(name.to_string()))?;
    Ok(run_registered(registered, corpus, ctx))
}

/// Runs every registry check, in registry order.
pub fn run_all(corpus: &Corpus, ctx: &CheckContext) -> Vec<CheckReport> {
    REGISTRY.iter().map(|r| run_registered(r, corpus, ctx)).collect()
}

fn run_registered(registered: &RegisteredCheck, corpus: &Corpus, ctx: &CheckContext) -> CheckReport {
    let start = Instant::now();
    let (corpus_size, counterexample) = match registered.kind {
        CheckKind::PerLattice(check) => {
            let mut covered = 0;
            let mut found = None;
            for entry in corpus.entries() {
                match check(entry, ctx) {
                    Ok(Coverage::Checked) => covered += 1,
                    Ok(Coverage::NotApplicable) => {}
                    Err(f) => {
                        covered += 1;
                        found = Some(counterexample(&entry.name, Some(&entry.lattice), f));
                        break;
                    }
                }
            }
            (covered, found)
        }
        CheckKind::Global(check) => match check(ctx) {
            Ok(()) => (1, None),
            Err((name, lattice, f)) => (1, Some(counterexample(&name, lattice.as_deref(), f))),
        },
    };
    CheckReport {
        name: registered.name.to_string(),
        corpus_size,
        passed: counterexample.is_none(),
        counterexample,
        elapsed: start.elapsed(),
    }
}

fn counterexample(name: &str, lattice: Option<&Lattice>, f: Failure) -> Counterexample {
    Counterexample {
        lattice_name: name.to_string(),
        lattice: lattice.map(|l| LatticeFile::from_lattice(l, None)),
        congruences: f.congruences.iter().map(CongruenceFile::from_congruence).collect(),
        elements: f.elements,
        message: f.message,
    }
}

fn check_interval_lemma(entry: &CorpusEntry, _: &CheckContext) -> Result<Coverage, Failure> {
    let l = &entry.lattice;
    for c in entry.frame()?.congruences() {
        for a in l.elements() {
            for b in l.elements() {
                let (lo, hi) = (l.meet(a, b), l.join(a, b));
                let direct = c.related(a, b);
                ensure(direct == c.related(lo, hi), || {
                    Failure::new("(a,b) ∈ C disagrees with (a∧b, a∨b) ∈ C").congs([c]).elems([a, b])
                })?;
                let bracketed = l
                    .down_set(lo)
                    .ones()
                    .any(|x| l.up_set(hi).ones().any(|y| c.related(x, y)));
                ensure(direct == bracketed, || {
                    Failure::new("(a,b) ∈ C disagrees with the bracketing pair test")
                        .congs([c])
                        .elems([a, b])
                })?;
            }
        }
    }
    Ok(Coverage::Checked)
}

fn check_nabla_hom(entry: &CorpusEntry, _: &CheckContext) -> Result<Coverage, Failure> {
    let l = &entry.lattice;
    let ops = Congruences::on(l);
    let frame = entry.frame()?;
    let nablas: Vec<Congruence> = l.elements().map(|a| ops.nabla(a)).collect();
    ensure(nablas[l.bottom()].is_diagonal(), || Failure::new("∇0 is not the diagonal"))?;
    ensure(nablas[l.top()].is_total(), || Failure::new("∇1 is not total"))?;
    ensure(frame.get(0).is_diagonal() && frame.get(frame.len() - 1).is_total(), || {
        Failure::new("frame does not start at the diagonal and end at the total congruence")
    })?;
    for a in l.elements() {
        let delta = ops.delta(a);
        ensure(ops.generate(&[(l.bottom(), a)]) == nablas[a], || {
            Failure::new("∇a differs from the congruence generated by (0,a)").congs([&nablas[a]]).elems([a])
        })?;
        ensure(ops.generate(&[(a, l.top())]) == delta, || {
            Failure::new("Δa differs from the congruence generated by (a,1)").congs([&delta]).elems([a])
        })?;
        ensure(
            ops.join(&nablas[a], &delta)?.is_total() && ops.meet(&nablas[a], &delta)?.is_diagonal(),
            || Failure::new("∇a and Δa are not complements").elems([a]),
        )?;
        ensure(frame.index_of(&nablas[a]).is_some() && frame.index_of(&delta).is_some(), || {
            Failure::new("frame misses ∇a or Δa").elems([a])
        })?;
        for b in l.elements() {
            ensure(ops.meet(&nablas[a], &nablas[b])? == nablas[l.meet(a, b)], || {
                Failure::new("∇(a∧b) ≠ ∇a ∧ ∇b").elems([a, b])
            })?;
            ensure(ops.join(&nablas[a], &nablas[b])? == nablas[l.join(a, b)], || {
                Failure::new("∇(a∨b) ≠ ∇a ∨ ∇b").elems([a, b])
            })?;
            ensure(a == b || nablas[a] != nablas[b], || {
                Failure::new("a ↦ ∇a is not injective").elems([a, b])
            })?;
        }
    }
    for c in frame.congruences() {
        for d in frame.congruences() {
            ensure(
                frame.index_of(&ops.join(c, d)?).is_some() && frame.index_of(&ops.meet(c, d)?).is_some(),
                || Failure::new("frame is not closed under join and meet").congs([c, d]),
            )?;
        }
    }
    Ok(Coverage::Checked)
}

fn check_join_formulas(entry: &CorpusEntry, _: &CheckContext) -> Result<Coverage, Failure> {
    let l = &entry.lattice;
    let ops = Congruences::on(l);
    for c in entry.frame()?.congruences() {
        for a in l.elements() {
            ensure(ops.join_with_nabla(a, c)? == ops.join(&ops.nabla(a), c)?, || {
                Failure::new("∇a ∨ C differs from its explicit form").congs([c]).elems([a])
            })?;
            ensure(ops.join_with_delta(a, c)? == ops.join(&ops.delta(a), c)?, || {
                Failure::new("Δa ∨ C differs from its explicit form").congs([c]).elems([a])
            })?;
        }
    }
    Ok(Coverage::Checked)
}

fn check_generalized_join(entry: &CorpusEntry, ctx: &CheckContext) -> Result<Coverage, Failure> {
    let l = &entry.lattice;
    let ops = Congruences::on(l);
    for i in l.elements() {
        let joined = l
            .down_set(i)
            .ones()
            .try_fold(ops.diagonal(), |acc, a| ops.join(&acc, &ops.nabla(a)))?;
        ensure(joined == ops.nabla(i), || {
            Failure::new("the join of ∇a over a ∈ ↓i is not ∇i").elems([i])
        })?;
    }
    for c in entry.frame()?.congruences() {
        for i in l.elements() {
            let j = ops.join(&ops.nabla(i), c)?;
            for x in l.elements() {
                for y in l.elements() {
                    let some = l
                        .down_set(i)
                        .ones()
                        .any(|k| c.related(l.join(x, k), l.join(y, k)));
                    let single = c.related(l.join(x, i), l.join(y, i));
                    ensure(j.related(x, y) == some && some == single, || {
                        Failure::new("∇I ∨ C membership disagrees with the witness form")
                            .congs([c])
                            .elems([i, x, y])
                    })?;
                }
            }
        }
    }
    if l.len() <= 64 {
        for d in l.downsets(ctx.limits.max_elements.max(1 << 16))? {
            ensure(!d.is_directed(l) || d.maximum(l).is_some(), || {
                Failure::new("a directed downset has no largest element").elems(d.members())
            })?;
        }
    }
    Ok(Coverage::Checked)
}

fn check_closure_props(entry: &CorpusEntry, _: &CheckContext) -> Result<Coverage, Failure> {
    let l = &entry.lattice;
    let ops = Congruences::on(l);
    let frame = entry.frame()?;
    let congs = frame.congruences();
    let closures = congs.iter().map(|c| ops.closure(c)).collect::<Result<Vec<_>, _>>()?;
    for (k, c) in congs.iter().enumerate() {
        let cl = &closures[k];
        ensure(ops.leq(cl, c)?, || Failure::new("cl(C) is not below C").congs([c]))?;
        ensure(ops.closure(cl)? == *cl, || Failure::new("cl is not idempotent").congs([c]))?;
        for a in l.elements() {
            let nabla = ops.nabla(a);
            ensure(!ops.leq(&nabla, c)? || ops.leq(&nabla, cl)?, || {
                Failure::new("cl(C) misses a principal closed congruence below C").congs([c]).elems([a])
            })?;
        }
        ensure(frame.tags(k).closed == (cl == c), || Failure::new("closed tag is wrong").congs([c]))?;
        ensure(frame.tags(k).dense == cl.is_diagonal(), || Failure::new("dense tag is wrong").congs([c]))?;
        for (m, d) in congs.iter().enumerate() {
            ensure(!frame.leq(k, m) || ops.leq(cl, &closures[m])?, || {
                Failure::new("cl is not monotone").congs([c, d])
            })?;
            ensure(ops.closure(&ops.meet(c, d)?)? == ops.meet(cl, &closures[m])?, || {
                Failure::new("cl does not preserve the meet").congs([c, d])
            })?;
        }
    }
    Ok(Coverage::Checked)
}

fn quotients(ops: &Congruences, frame: &CongruenceFrame) -> Result<Vec<QuotientMap>, Failure> {
    Ok(frame
        .congruences()
        .iter()
        .map(|c| ops.quotient(c))
        .collect::<Result<_, _>>()?)
}

fn check_closure_in_quotient(entry: &CorpusEntry, _: &CheckContext) -> Result<Coverage, Failure> {
    let l = &entry.lattice;
    let ops = Congruences::on(l);
    let frame = entry.frame()?;
    let qs = quotients(&ops, frame)?;
    for (k, c) in frame.congruences().iter().enumerate() {
        let q = &qs[k];
        let target_ops = Congruences::on(q.target());
        for (m, a) in frame.congruences().iter().enumerate() {
            if !frame.leq(k, m) {
                continue;
            }
            let image = q.push_forward(a)?;
            let pulled = q.pull_back(&target_ops.closure(&image)?)?;
            let expected = ops.join(c, &ops.closure(a)?)?;
            ensure(pulled == expected, || {
                Failure::new("closure in L/C does not correspond to C ∨ cl(A)").congs([c, a])
            })?;
        }
    }
    Ok(Coverage::Checked)
}

fn check_dense_map(entry: &CorpusEntry, _: &CheckContext) -> Result<Coverage, Failure> {
    let l = &entry.lattice;
    let ops = Congruences::on(l);
    let frame = entry.frame()?;
    let qs = quotients(&ops, frame)?;
    for (k, c) in frame.congruences().iter().enumerate() {
        for (m, d) in frame.congruences().iter().enumerate() {
            if !frame.leq(k, m) {
                continue;
            }
            // h([x]_C) = [x]_D; dense when only the bottom class maps to bottom.
            let h_dense = l
                .elements()
                .all(|x| qs[m].apply(x) != 0 || qs[k].apply(x) == 0);
            ensure(ops.is_dense_in(d, c)? == h_dense, || {
                Failure::new("density of D in C disagrees with density of L/C → L/D").congs([c, d])
            })?;
        }
    }
    Ok(Coverage::Checked)
}

fn check_dl_largest(entry: &CorpusEntry, _: &CheckContext) -> Result<Coverage, Failure> {
    let l = &entry.lattice;
    let ops = Congruences::on(l);
    let frame = entry.frame()?;
    let largest = ops.largest_dense();
    ensure(ops.is_dense(&largest)?, || Failure::new("𝔇 is not dense").congs([&largest]))?;
    ensure(frame.index_of(&largest).is_some(), || Failure::new("𝔇 is not in the frame"))?;
    for (k, e) in frame.congruences().iter().enumerate() {
        let dense = ops.is_dense(e)?;
        ensure(dense == ops.leq(e, &largest)?, || {
            Failure::new("a congruence is dense but not below 𝔇, or the reverse").congs([e, &largest])
        })?;
        ensure(frame.tags(k).dense == dense, || Failure::new("dense tag is wrong").congs([e]))?;
    }
    Ok(Coverage::Checked)
}

fn check_partial_formula(entry: &CorpusEntry, _: &CheckContext) -> Result<Coverage, Failure> {
    let l = &entry.lattice;
    let ops = Congruences::on(l);
    let frame = entry.frame()?;
    let clear: Vec<Congruence> = l.elements().map(|i| ops.clear_of_ideal(i)).collect();
    for i in l.elements() {
        let p = &clear[i];
        let nabla = ops.nabla(i);
        ensure(ops.leq(&nabla, p)? && ops.leq(&ops.closure(p)?, &nabla)?, || {
            Failure::new("∂i is not dense in ∇i").congs([p]).elems([i])
        })?;
        for e in frame.congruences() {
            let dense_in = ops.leq(&nabla, e)? && ops.leq(&ops.closure(e)?, &nabla)?;
            ensure(!dense_in || ops.leq(e, p)?, || {
                Failure::new("a congruence dense in ∇i is not below ∂i").congs([e, p]).elems([i])
            })?;
        }
        let q = ops.quotient(&nabla)?;
        let pulled = q.pull_back(&Congruences::on(q.target()).largest_dense())?;
        ensure(pulled == *p, || {
            Failure::new("∂i differs from the pullback of 𝔇 of L/∇i").congs([p, &pulled]).elems([i])
        })?;
        for j in l.elements() {
            ensure(i == j || clear[i] != clear[j], || {
                Failure::new("I ↦ ∂I is not injective").elems([i, j])
            })?;
            ensure(!ops.leq(&clear[i], &clear[j])? || l.leq(i, j), || {
                Failure::new("I ↦ ∂I does not reflect order").elems([i, j])
            })?;
        }
    }
    for c in frame.congruences() {
        let z = ops.zero_class_generator(c)?;
        let dense_in = ops.largest_dense_in(c)?;
        ensure(dense_in == clear[z], || {
            Failure::new("largest congruence dense in C differs from ∂ of its zero class")
                .congs([c, &dense_in])
                .elems([z])
        })?;
        ensure(ops.leq(c, &dense_in)?, || Failure::new("C is not below ∂").congs([c]))?;
    }
    Ok(Coverage::Checked)
}

fn check_heyting_form(entry: &CorpusEntry, _: &CheckContext) -> Result<Coverage, Failure> {
    let l = &entry.lattice;
    let ops = Congruences::on(l);
    for a in l.elements() {
        for b in l.elements() {
            let arrow = l.heyting_arrow(a, b);
            let ok = l.leq(l.meet(a, arrow), b)
                && l.elements().all(|x| !l.leq(l.meet(a, x), b) || l.leq(x, arrow));
            ensure(ok, || Failure::new("a → b is not the largest x with a ∧ x <= b").elems([a, b]))?;
        }
    }
    for i in l.elements() {
        let (by_formula, by_arrow) = (ops.clear_of_ideal(i), ops.clear_of_ideal_by_arrow(i));
        ensure(by_formula == by_arrow, || {
            Failure::new("∂i differs from the Heyting-arrow grouping").congs([&by_formula, &by_arrow]).elems([i])
        })?;
    }
    Ok(Coverage::Checked)
}

fn check_sierpinski(ctx: &CheckContext) -> Result<(), (String, Option<Box<Lattice>>, Failure)> {
    let l = Lattice::chain(3).map_err(|e| ("chain(3)".to_string(), None, e.into()))?;
    let wrap = |f: Failure| ("chain(3)".to_string(), Some(Box::new(l.clone())), f);
    let run = || -> Result<(), Failure> {
        let ops = Congruences::on(&l);
        let frame = enumerate_congruences(&l, &ctx.limits)?;
        ensure(frame.len() == 4, || Failure::new(format!("{} congruences, expected 4", frame.len())))?;
        let (open_pt, closed_pt) = (ops.clear_of_ideal(0), ops.clear_of_ideal(1));
        ensure(open_pt == ops.delta(1), || Failure::new("∂0 ≠ Δa").congs([&open_pt]))?;
        ensure(closed_pt == ops.nabla(1), || Failure::new("∂a ≠ ∇a").congs([&closed_pt]))?;
        ensure(!ops.leq(&open_pt, &closed_pt)? && !ops.leq(&closed_pt, &open_pt)?, || {
            Failure::new("∂0 and ∂a are comparable").congs([&open_pt, &closed_pt])
        })?;
        let diagonal = ops.diagonal();
        ensure(!ops.is_clear(&diagonal)?, || Failure::new("the diagonal is clear"))?;
        ensure(ops.meet(&open_pt, &closed_pt)? == diagonal, || {
            Failure::new("∂0 ∧ ∂a is not the diagonal")
        })?;
        Ok(())
    };
    run().map_err(wrap)
}

fn check_meet_of_clear(entry: &CorpusEntry, _: &CheckContext) -> Result<Coverage, Failure> {
    let l = &entry.lattice;
    let ops = Congruences::on(l);
    let clear: Vec<Congruence> = l.elements().map(|i| ops.clear_of_ideal(i)).collect();
    for c in entry.frame()?.congruences() {
        let met = ops.meet_of_clear_above(c)?;
        ensure(met == *c, || Failure::new("C is not the meet of the clear congruences above it").congs([c, &met]))?;
        for a in l.elements() {
            for b in l.elements().filter(|&b| !c.related(a, b)) {
                let Some(i) = ops.separating_ideal(c, a, b)? else {
                    return Err(Failure::new("no separating ideal for an unrelated pair").congs([c]).elems([a, b]));
                };
                let via_closure = ops.separating_ideal_by_closure(c, a, b)?;
                ensure(via_closure == Some(i), || {
                    Failure::new("the two separating-ideal routes disagree").congs([c]).elems([a, b, i])
                })?;
                ensure(ops.leq(c, &clear[i])? && !clear[i].related(a, b), || {
                    Failure::new("∂ of the separating ideal does not separate the pair")
                        .congs([c, &clear[i]])
                        .elems([a, b, i])
                })?;
            }
        }
    }
    Ok(Coverage::Checked)
}

fn check_quotient_by_clear(entry: &CorpusEntry, _: &CheckContext) -> Result<Coverage, Failure> {
    let ops = Congruences::on(&entry.lattice);
    for c in entry.frame()?.congruences() {
        let reduced = is_d_reduced(ops.quotient(c)?.target());
        ensure(reduced == ops.is_clear(c)?, || {
            Failure::new(format!("L/C d-reduced = {reduced} but C clear = {}", !reduced)).congs([c])
        })?;
    }
    Ok(Coverage::Checked)
}

fn check_pseudo_injective(entry: &CorpusEntry, _: &CheckContext) -> Result<Coverage, Failure> {
    let l = &entry.lattice;
    let ops = Congruences::on(l);
    let by_pc = Congruence::from_labels(l, &l.elements().map(|a| l.pseudocomplement(a)).collect::<Vec<_>>())?;
    let largest = ops.largest_dense();
    ensure(by_pc == largest, || {
        Failure::new("𝔇 differs from equality of pseudocomplements").congs([&largest, &by_pc])
    })?;
    ensure(is_d_reduced(l) == is_d_reduced_by_pseudocomplement(l), || {
        Failure::new("the two d-reduced tests disagree")
    })?;
    Ok(Coverage::Checked)
}

fn check_dreduced_iff_boolean(entry: &CorpusEntry, _: &CheckContext) -> Result<Coverage, Failure> {
    let l = &entry.lattice;
    ensure(is_d_reduced(l) == l.is_boolean(), || {
        Failure::new(format!("d-reduced = {}, Boolean = {}", is_d_reduced(l), l.is_boolean()))
    })?;
    Ok(Coverage::Checked)
}

fn check_g_injective(entry: &CorpusEntry, ctx: &CheckContext) -> Result<Coverage, Failure> {
    let l = &entry.lattice;
    if l.len() > 64 {
        return Ok(Coverage::NotApplicable);
    }
    let (ideals, generators) = l.ideal_frame(&ctx.limits)?;
    // The ideal frame is L itself: ideal ↦ its largest member is an order isomorphism.
    let mut principal = vec![usize::MAX; l.len()];
    for (k, &g) in generators.iter().enumerate() {
        principal[g] = k;
    }
    ensure(ideals.len() == l.len() && principal.iter().all(|&k| k != usize::MAX), || {
        Failure::new("ideals do not correspond one-to-one with elements")
    })?;
    for a in ideals.elements() {
        for b in ideals.elements() {
            ensure(ideals.leq(a, b) == l.leq(generators[a], generators[b]), || {
                Failure::new("ideal inclusion disagrees with the order of generators")
                    .elems([generators[a], generators[b]])
            })?;
        }
    }
    if l.len() <= ctx.limits.max_iso {
        ensure(find_isomorphism(&ideals, l, &ctx.limits)?.is_some(), || {
            Failure::new("the ideal frame is not isomorphic to L")
        })?;
    }
    let hops = Congruences::on(&ideals);
    let q = hops.quotient(&hops.largest_dense())?;
    let images: HashSet<usize> = l.elements().map(|a| q.apply(principal[a])).collect();
    let injective = images.len() == l.len();
    ensure(injective == is_d_reduced(l), || {
        Failure::new(format!("g injective = {injective}, d-reduced = {}", is_d_reduced(l)))
    })?;
    Ok(Coverage::Checked)
}

fn check_hereditary(entry: &CorpusEntry, _: &CheckContext) -> Result<Coverage, Failure> {
    let l = &entry.lattice;
    let ops = Congruences::on(l);
    let mut all_reduced = true;
    for c in entry.frame()?.congruences() {
        if !is_d_reduced(ops.quotient(c)?.target()) {
            all_reduced = false;
            break;
        }
    }
    ensure(all_reduced == l.is_boolean(), || {
        Failure::new(format!("all quotients d-reduced = {all_reduced}, Boolean = {}", l.is_boolean()))
    })?;
    Ok(Coverage::Checked)
}

fn check_nabla_clear(entry: &CorpusEntry, _: &CheckContext) -> Result<Coverage, Failure> {
    let l = &entry.lattice;
    if !is_d_reduced(l) {
        return Ok(Coverage::NotApplicable);
    }
    let ops = Congruences::on(l);
    for a in l.elements() {
        let nabla = ops.nabla(a);
        ensure(ops.is_clear(&nabla)?, || Failure::new("∇a is not clear").congs([&nabla]).elems([a]))?;
    }
    Ok(Coverage::Checked)
}

fn check_dl_join_nabla(entry: &CorpusEntry, _: &CheckContext) -> Result<Coverage, Failure> {
    let l = &entry.lattice;
    let ops = Congruences::on(l);
    for a in l.elements() {
        let joined = ops.dl_join_nabla(a);
        let dd = l.double_pseudocomplement(a);
        let expected = ops.clear_of_ideal(dd);
        ensure(joined == expected, || {
            Failure::new("𝔇 ∨ ∇a ≠ ∂ of (↓a)**").congs([&joined, &expected]).elems([a, dd])
        })?;
        ensure(ops.closure(&joined)? == ops.nabla(dd), || {
            Failure::new("cl(𝔇 ∨ ∇a) ≠ ∇ of (↓a)**").congs([&joined]).elems([a, dd])
        })?;
        ensure(ops.is_clear(&joined)?, || Failure::new("𝔇 ∨ ∇a is not clear").congs([&joined]).elems([a]))?;
    }
    Ok(Coverage::Checked)
}

fn check_final_hom(entry: &CorpusEntry, _: &CheckContext) -> Result<Coverage, Failure> {
    let l = &entry.lattice;
    let ops = Congruences::on(l);
    let largest = ops.largest_dense();
    let f: Vec<Congruence> = l.elements().map(|a| ops.dl_join_nabla(a)).collect();
    ensure(f[l.top()].is_total(), || Failure::new("1 is not sent to the total congruence"))?;
    ensure(f[l.bottom()] == largest, || Failure::new("0 is not sent to 𝔇"))?;
    for a in l.elements() {
        ensure(ops.leq(&largest, &f[a])?, || Failure::new("image escapes ↑𝔇").congs([&f[a]]).elems([a]))?;
        for b in l.elements() {
            ensure(ops.meet(&f[a], &f[b])? == f[l.meet(a, b)], || {
                Failure::new("binary meet not preserved").elems([a, b])
            })?;
            ensure(ops.join(&f[a], &f[b])? == f[l.join(a, b)], || {
                Failure::new("binary join not preserved").elems([a, b])
            })?;
            ensure((f[a] == f[b]) == largest.related(a, b), || {
                Failure::new("kernel differs from 𝔇").congs([&largest]).elems([a, b])
            })?;
            ensure(!l.leq(a, b) || ops.leq(&f[a], &f[b])?, || Failure::new("not monotone").elems([a, b]))?;
        }
    }
    Ok(Coverage::Checked)
}

fn check_oracle_equiv(entry: &CorpusEntry, _: &CheckContext) -> Result<Coverage, Failure> {
    let l = &entry.lattice;
    if l.len() > ORACLE_MAX_ELEMENTS {
        return Ok(Coverage::NotApplicable);
    }
    let fast: HashSet<&Congruence> = entry.frame()?.congruences().iter().collect();
    let oracle = oracle_enumerate_congruences(l)?;
    let slow: HashSet<&Congruence> = oracle.iter().collect();
    if let Some(missing) = slow.difference(&fast).next() {
        return Err(Failure::new("enumeration misses a congruence found by the oracle").congs([*missing]));
    }
    if let Some(extra) = fast.difference(&slow).next() {
        return Err(Failure::new("enumeration yields a relation the oracle rejects").congs([*extra]));
    }
    Ok(Coverage::Checked)
}

fn check_m_example(ctx: &CheckContext) -> Result<(), (String, Option<Box<Lattice>>, Failure)> {
    let name = "M".to_string();
    let ideal = MIdealRep::FinOf(NatSet::cofinite([2]));
    let quotient = m_quotient_cofinite(&ideal, &ctx.limits)
        .map_err(|e| (name.clone(), None, Failure::new(format!("quotient failed: {e}"))))?;
    let chain3 = Lattice::chain(3).map_err(|e| (name.clone(), None, e.into()))?;
    let q = quotient.lattice();
    let fail_q = |f: Failure| ("M / ∇(fin-of co{2})".to_string(), Some(Box::new(q.clone())), f);
    ensure(m_pseudocomplement_principal(&MElement::fin([2])) == ideal, || {
        Failure::new("(↓{2})* is not fin-of co{2}")
    })
    .map_err(fail_q)?;
    let iso = find_isomorphism(q, &chain3, &ctx.limits).map_err(|e| fail_q(e.into()))?;
    ensure(iso.is_some(), || Failure::new("M / ∇I is not the three-element chain")).map_err(fail_q)?;
    ensure(!is_d_reduced(q), || Failure::new("M / ∇I is d-reduced")).map_err(fail_q)?;

    let fail_m = |f: Failure| (name.clone(), None, f);
    let pairs = sample_m_pairs(ctx.seed, ctx.m_samples);
    let report = m_d_reduced_witness(&pairs).map_err(|e| fail_m(Failure::new(e.to_string())))?;
    if let Some((x, y)) = report.collisions.first() {
        return Err(fail_m(Failure::new(format!("(↓{x})* = (↓{y})*"))));
    }
    ensure(report.non_boolean.holds(), || Failure::new("no non-Booleanness witness for {0}")).map_err(fail_m)?;

    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(ctx.seed ^ 0x5eed);
    for (k, (x, y)) in pairs.iter().enumerate() {
        // ∇ of a principal ideal is clear in the d-reduced M.
        let a = &pairs[(k + 1) % pairs.len()].0;
        let nabla_ideal = match a {
            MElement::Fin(s) => MIdealRep::FinOf(NatSet::finite(s.iter().copied())),
            MElement::Top => MIdealRep::AllOfM,
        };
        ensure(m_partial_related(a, x, y) == m_nabla_related(&nabla_ideal, x, y), || {
            Failure::new(format!("∂ and ∇ of ↓{a} disagree on ({x}, {y})"))
        })
        .map_err(fail_m)?;
        // Closed form against an explicit witness search.
        let small = match (x, y) {
            (MElement::Fin(xs), MElement::Fin(ys)) if xs.union(ys).count() <= 10 => Some((xs, ys)),
            _ => None,
        };
        if let Some((xs, ys)) = small {
            let t = if k % 2 == 0 {
                NatSet::cofinite(sample_finite(&mut rng, 64, 4))
            } else {
                NatSet::finite(sample_finite(&mut rng, 64, 24))
            };
            let closed_form = m_nabla_related(&MIdealRep::FinOf(t.clone()), x, y);
            ensure(closed_form == m_nabla_witness(&t, xs, ys).is_some(), || {
                Failure::new(format!("∇(fin-of {t}) membership of ({x}, {y}) disagrees with witness search"))
            })
            .map_err(fail_m)?;
        }
        // The quotient map is a lattice homomorphism.
        let (cx, cy) = (quotient.class_of(x), quotient.class_of(y));
        ensure(
            quotient.class_of(&x.meet(y)) == q.meet(cx, cy) && quotient.class_of(&x.join(y)) == q.join(cx, cy),
            || Failure::new(format!("M → M/∇I does not preserve the operations on ({x}, {y})")),
        )
        .map_err(fail_m)?;
    }
    Ok(())
}
