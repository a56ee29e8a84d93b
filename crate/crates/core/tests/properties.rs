use kframe::io::{parse_congruence, parse_lattice, CongruenceFile, LatticeFile};
use kframe::{build_lattice, Congruence, Congruences, Lattice, Limits, Poset};
use proptest::prelude::*;

/// A random poset on up to five points, given by covers `i < j` with `i < j`.
fn poset() -> impl Strategy<Value = Poset> {
    (0usize..=5).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        proptest::collection::vec(any::<bool>(), pairs.len()).prop_map(move |keep| {
            let covers: Vec<(usize, usize)> =
                pairs.iter().zip(keep).filter(|(_, k)| *k).map(|(&p, _)| p).collect();
            Poset::from_covers(n, &covers).unwrap()
        })
    })
}

fn lattice_and_pairs() -> impl Strategy<Value = (Lattice, Vec<(usize, usize)>)> {
    poset().prop_flat_map(|p| {
        let l = Lattice::downset_lattice(&p).unwrap();
        let n = l.len();
        (Just(l), proptest::collection::vec((0..n, 0..n), 0..3))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn downset_lattices_are_well_formed(p in poset()) {
        let l = Lattice::downset_lattice(&p).unwrap();
        prop_assert!(l.check_invariants().is_ok());
        prop_assert_eq!(l.join_irreducibles().len(), p.len());
        prop_assert!(l.to_poset().is_naturally_labeled());
    }

    #[test]
    fn relabeled_input_builds_the_same_lattice(p in poset(), seed in any::<u64>()) {
        let l = Lattice::downset_lattice(&p).unwrap();
        let n = l.len();
        let mut shuffle: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffle.swap(i, (s >> 33) as usize % (i + 1));
        }
        let scrambled = l.to_poset().relabel(&shuffle);
        let built = build_lattice(&scrambled, &Limits::default()).unwrap();
        for a in 0..n {
            for b in 0..n {
                prop_assert_eq!(scrambled.leq(a, b), built.lattice.leq(built.permutation[a], built.permutation[b]));
            }
        }
    }

    #[test]
    fn file_formats_round_trip((l, pairs) in lattice_and_pairs()) {
        let limits = Limits::default();
        let back = parse_lattice(&LatticeFile::from_lattice(&l, None).to_json(), &limits).unwrap();
        prop_assert_eq!(&back.lattice, &l);
        let c = Congruences::on(&l).generate(&pairs);
        let text = CongruenceFile::from_congruence(&c).to_json();
        prop_assert_eq!(parse_congruence(&l, &text).unwrap(), c);
    }

    #[test]
    fn generated_congruences_are_compatible((l, pairs) in lattice_and_pairs()) {
        let c = Congruences::on(&l).generate(&pairs);
        for &(a, b) in &pairs {
            prop_assert!(c.related(a, b));
        }
        for a in l.elements() {
            for b in l.elements().filter(|&b| c.related(a, b)) {
                for x in l.elements() {
                    prop_assert!(c.related(l.join(a, x), l.join(b, x)));
                    prop_assert!(c.related(l.meet(a, x), l.meet(b, x)));
                }
            }
        }
        prop_assert!(Congruence::from_blocks(&l, &c.blocks()).is_ok());
    }

    #[test]
    fn closure_and_clear_laws((l, pairs) in lattice_and_pairs()) {
        let ops = Congruences::on(&l);
        let c = ops.generate(&pairs);
        let cl = ops.closure(&c).unwrap();
        prop_assert!(ops.leq(&cl, &c).unwrap());
        prop_assert_eq!(ops.closure(&cl).unwrap(), cl.clone());
        let dense_in = ops.largest_dense_in(&c).unwrap();
        prop_assert!(ops.leq(&c, &dense_in).unwrap());
        prop_assert_eq!(ops.closure(&dense_in).unwrap(), cl);
        prop_assert!(ops.is_clear(&dense_in).unwrap());
        prop_assert_eq!(ops.meet_of_clear_above(&c).unwrap(), c.clone());
        let q = ops.quotient(&c).unwrap();
        prop_assert_eq!(q.pull_back(&Congruences::on(q.target()).diagonal()).unwrap(), c.clone());
        prop_assert_eq!(kframe::is_d_reduced(q.target()), ops.is_clear(&c).unwrap());
    }

    #[test]
    fn pseudocomplement_laws(p in poset()) {
        let l = Lattice::downset_lattice(&p).unwrap();
        for a in l.elements() {
            let pc = l.pseudocomplement(a);
            prop_assert_eq!(l.meet(a, pc), l.bottom());
            prop_assert!(l.leq(a, l.double_pseudocomplement(a)));
            prop_assert_eq!(l.pseudocomplement(l.double_pseudocomplement(a)), pc);
        }
    }
}
