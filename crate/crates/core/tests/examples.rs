use kframe::{
    enumerate_congruences, is_d_reduced, is_isomorphic, oracle_enumerate_congruences, Congruence, Congruences,
    Lattice, LatticeError, Limits, Poset,
};

fn chain3() -> Lattice {
    Lattice::chain(3).unwrap()
}

fn blocks(c: &Congruence) -> Vec<Vec<usize>> {
    c.blocks()
}

const A: usize = 1;

#[test]
fn constructions() {
    let l = Lattice::from_poset(&Poset::chain(3)).unwrap();
    assert_eq!(l.len(), 3);
    assert_eq!(l.join(2, 2), 2);
    let limits = Limits::default();
    let square = Poset::from_covers(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
    assert!(is_isomorphic(&Lattice::from_poset(&square).unwrap(), &Lattice::boolean_algebra(2).unwrap(), &limits).unwrap());
    let two = Lattice::chain(2).unwrap();
    assert!(is_isomorphic(&Lattice::product(&two, &two).unwrap(), &Lattice::boolean_algebra(2).unwrap(), &limits).unwrap());
    assert!(is_isomorphic(&chain3(), &chain3(), &limits).unwrap());
    assert!(!is_isomorphic(&Lattice::chain(4).unwrap(), &Lattice::boolean_algebra(2).unwrap(), &limits).unwrap());
}

#[test]
fn rejected_orders() {
    let diamond = Poset::from_covers(5, &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)]).unwrap();
    assert!(matches!(Lattice::from_poset(&diamond), Err(LatticeError::NotDistributive { .. })));
    let no_top = Poset::antichain(2);
    assert!(matches!(Lattice::from_poset(&no_top), Err(LatticeError::NotALattice { .. })));
    let cycle = vec![vec![true, true], vec![true, true]];
    assert!(matches!(Poset::from_relation(&cycle), Err(LatticeError::NotAPartialOrder(_))));
}

#[test]
fn heyting_structure() {
    let l = chain3();
    assert_eq!(l.pseudocomplement(A), 0);
    assert_eq!(l.pseudocomplement(0), 2);
    for k in 0..=3 {
        let b = Lattice::boolean_algebra(k).unwrap();
        for a in b.elements() {
            for c in b.elements() {
                assert_eq!(b.heyting_arrow(a, c), b.join(b.complement(a).unwrap(), c));
            }
        }
    }
    for l in [chain3(), Lattice::boolean_algebra(3).unwrap()] {
        for b in l.elements() {
            assert_eq!(l.heyting_arrow(l.bottom(), b), l.top());
        }
    }
}

#[test]
fn join_irreducibles_and_booleanness() {
    for n in 1..=6 {
        assert_eq!(Lattice::chain(n).unwrap().join_irreducibles(), (1..n).collect::<Vec<_>>());
    }
    let b3 = Lattice::boolean_algebra(3).unwrap();
    assert_eq!(b3.join_irreducibles(), vec![1, 2, 4]);
    assert!(b3.is_boolean());
    assert!(!chain3().is_boolean());
    assert!(!Lattice::downset_lattice(&Poset::chain(2)).unwrap().is_boolean());
    let p = Poset::from_covers(3, &[(0, 2)]).unwrap();
    assert_eq!(Lattice::downset_lattice(&p).unwrap().join_irreducibles().len(), 3);
}

#[test]
fn principal_congruences() {
    let l = chain3();
    let ops = Congruences::on(&l);
    assert_eq!(blocks(&ops.nabla(A)), vec![vec![0, 1], vec![2]]);
    assert_eq!(blocks(&ops.delta(A)), vec![vec![0], vec![1, 2]]);
    for l in [chain3(), Lattice::boolean_algebra(2).unwrap()] {
        let ops = Congruences::on(&l);
        assert!(ops.nabla(l.bottom()).is_diagonal());
        assert!(ops.nabla(l.top()).is_total());
        assert!(ops.delta(l.top()).is_diagonal());
        assert!(ops.delta(l.bottom()).is_total());
    }
    let b2 = Lattice::boolean_algebra(2).unwrap();
    let ops = Congruences::on(&b2);
    let (n, d) = (ops.nabla(1), ops.delta(1));
    assert_eq!((n.block_count(), d.block_count()), (2, 2));
    assert!(ops.meet(&n, &d).unwrap().is_diagonal());
    assert!(ops.join(&n, &d).unwrap().is_total());
}

#[test]
fn generation_and_joins() {
    let l = chain3();
    let ops = Congruences::on(&l);
    assert_eq!(ops.generate(&[(0, A)]), ops.nabla(A));
    assert!(ops.generate(&[]).is_diagonal());
    assert!(ops.generate(&[(0, 2)]).is_total());
    assert!(ops.join(&ops.nabla(A), &ops.delta(A)).unwrap().is_total());
    assert!(ops.meet(&ops.nabla(A), &ops.delta(A)).unwrap().is_diagonal());
    let c = ops.nabla(A);
    assert_eq!(ops.join(&c, &ops.diagonal()).unwrap(), c);
    for name_l in kframe::verify::build_corpus(3, &Limits::default()).unwrap().lattices() {
        let ops = Congruences::on(name_l);
        for a in name_l.elements() {
            assert_eq!(ops.join_with_nabla(a, &ops.diagonal()).unwrap(), ops.generate(&[(0, a)]));
        }
    }
}

#[test]
fn closure_examples() {
    let l = chain3();
    let ops = Congruences::on(&l);
    assert_eq!(ops.zero_class_generator(&ops.diagonal()).unwrap(), 0);
    assert_eq!(ops.zero_class_generator(&ops.total()).unwrap(), 2);
    assert_eq!(ops.zero_class_generator(&ops.nabla(A)).unwrap(), A);
    assert!(ops.closure(&ops.delta(A)).unwrap().is_diagonal());
    for a in l.elements() {
        assert_eq!(ops.closure(&ops.nabla(a)).unwrap(), ops.nabla(a));
    }
    assert!(ops.closure(&ops.total()).unwrap().is_total());
}

#[test]
fn dense_and_clear_examples() {
    let l = chain3();
    let ops = Congruences::on(&l);
    assert_eq!(ops.largest_dense(), ops.delta(A));
    for k in 0..=3 {
        let b = Lattice::boolean_algebra(k).unwrap();
        let bops = Congruences::on(&b);
        assert!(bops.largest_dense().is_diagonal());
        assert!(is_d_reduced(&b));
    }
    for c in enumerate_congruences(&l, &Limits::default()).unwrap().congruences() {
        assert!(ops.is_dense_in(c, c).unwrap());
    }
    assert_eq!(ops.clear_of_ideal(0), ops.delta(A));
    assert_eq!(ops.clear_of_ideal(A), ops.nabla(A));
    assert!(ops.clear_of_ideal(2).is_total());
    assert!(!ops.leq(&ops.clear_of_ideal(0), &ops.clear_of_ideal(A)).unwrap());
    assert!(!ops.leq(&ops.clear_of_ideal(A), &ops.clear_of_ideal(0)).unwrap());
    let b2 = Lattice::boolean_algebra(2).unwrap();
    assert!(Congruences::on(&b2).clear_of_ideal(0).is_diagonal());
    assert_eq!(ops.largest_dense_in(&ops.diagonal()).unwrap(), ops.largest_dense());
    assert_eq!(ops.largest_dense_in(&ops.delta(A)).unwrap(), ops.delta(A));
    assert!(ops.is_clear(&ops.delta(A)).unwrap());
    assert!(ops.largest_dense_in(&ops.total()).unwrap().is_total());
}

#[test]
fn quotient_examples() {
    let limits = Limits::default();
    let l = chain3();
    let ops = Congruences::on(&l);
    assert!(is_isomorphic(ops.quotient(&ops.diagonal()).unwrap().target(), &l, &limits).unwrap());
    assert_eq!(ops.quotient(&ops.total()).unwrap().target().len(), 1);
    assert!(is_isomorphic(ops.quotient(&ops.nabla(A)).unwrap().target(), &Lattice::chain(2).unwrap(), &limits).unwrap());
}

#[test]
fn enumeration_examples() {
    let limits = Limits::default();
    assert_eq!(enumerate_congruences(&chain3(), &limits).unwrap().len(), 4);
    assert_eq!(enumerate_congruences(&Lattice::boolean_algebra(2).unwrap(), &limits).unwrap().len(), 4);
    assert_eq!(oracle_enumerate_congruences(&Lattice::chain(1).unwrap()).unwrap().len(), 1);
    for l in [chain3(), Lattice::boolean_algebra(2).unwrap()] {
        let mut fast = enumerate_congruences(&l, &limits).unwrap().congruences().to_vec();
        let mut slow = oracle_enumerate_congruences(&l).unwrap();
        fast.sort_by_key(|c| c.labels().collect::<Vec<_>>());
        slow.sort_by_key(|c| c.labels().collect::<Vec<_>>());
        assert_eq!(fast, slow);
    }
}

#[test]
fn d_reduced_examples() {
    assert!(!is_d_reduced(&chain3()));
    assert_eq!(chain3().pseudocomplement(A), chain3().pseudocomplement(2));
    assert!(is_d_reduced(&Lattice::chain(1).unwrap()));
    assert!(is_d_reduced(&Lattice::chain(2).unwrap()));
}

#[test]
fn clear_meet_and_final_map_examples() {
    let l = chain3();
    let ops = Congruences::on(&l);
    assert_eq!(
        ops.meet_of_clear_above(&ops.diagonal()).unwrap(),
        ops.meet(&ops.delta(A), &ops.nabla(A)).unwrap()
    );
    assert!(ops.meet_of_clear_above(&ops.diagonal()).unwrap().is_diagonal());
    assert!(ops.meet_of_clear_above(&ops.total()).unwrap().is_total());
    assert_eq!(ops.dl_join_nabla(0), ops.largest_dense());
    assert_eq!(ops.dl_join_nabla(0), ops.clear_of_ideal(l.double_pseudocomplement(0)));
    assert!(ops.dl_join_nabla(2).is_total());
    assert_eq!(l.double_pseudocomplement(A), 2);
    assert!(ops.dl_join_nabla(A).is_total());
}

#[test]
fn host_mismatch_is_rejected() {
    let (a, b) = (chain3(), Lattice::boolean_algebra(2).unwrap());
    let c = Congruences::on(&b).nabla(1);
    assert!(matches!(
        Congruences::on(&a).closure(&c),
        Err(kframe::CongruenceError::HostMismatch)
    ));
}
