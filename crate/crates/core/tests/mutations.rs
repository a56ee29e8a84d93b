use kframe::io::{parse_congruence, parse_lattice, CongruenceFile};
use kframe::mutation::{with_mutation, Mutation};
use kframe::verify::{build_corpus, registry, run_all, run_check, CheckContext, CheckReport, Corpus};
use kframe::Limits;

fn first_failure(corpus_points: usize) -> impl Fn(Mutation) -> Option<CheckReport> {
    move |m| {
        let limits = Limits::default();
        let corpus = build_corpus(corpus_points, &limits).unwrap();
        with_mutation(m, || run_all(&corpus, &CheckContext::default()).into_iter().find(|r| !r.passed))
    }
}

#[test]
fn unmutated_suite_passes() {
    let corpus = build_corpus(3, &Limits::default()).unwrap();
    for r in run_all(&corpus, &CheckContext::default()) {
        assert!(r.passed, "{}", r.line());
        assert!(r.counterexample.is_none());
    }
}

#[test]
fn every_mutation_is_caught() {
    let find = first_failure(3);
    for m in Mutation::ALL {
        let report = find(m).unwrap_or_else(|| panic!("{m:?} is not caught"));
        assert!(report.counterexample.is_some());
    }
}

#[test]
fn counterexamples_replay() {
    let limits = Limits::default();
    let ctx = CheckContext::default();
    let find = first_failure(3);
    for m in Mutation::ALL {
        let report = find(m).unwrap();
        let cx = report.counterexample.as_ref().unwrap();
        let file = cx.lattice.as_ref().expect("per-lattice checks carry their lattice");
        let built = parse_lattice(&file.to_json(), &limits).unwrap();
        for c in &cx.congruences {
            let parsed = parse_congruence(&built.lattice, &CongruenceFile::to_json(c)).unwrap();
            assert_eq!(parsed.blocks(), c.blocks);
        }
        let single = || Corpus::from_lattices([(cx.lattice_name.clone(), built.lattice.clone())], &limits);
        let again = with_mutation(m, || run_check(&report.name, &single(), &ctx).unwrap());
        assert!(!again.passed, "{m:?} did not replay");
        assert_eq!(again.counterexample.as_ref().unwrap().message, cx.message);
        assert!(run_check(&report.name, &single(), &ctx).unwrap().passed);
    }
}

#[test]
fn reports_are_deterministic() {
    let corpus = build_corpus(3, &Limits::default()).unwrap();
    let ctx = CheckContext::default();
    let once = serde_json::to_string(&run_all(&corpus, &ctx)).unwrap();
    let twice = serde_json::to_string(&run_all(&build_corpus(3, &Limits::default()).unwrap(), &ctx)).unwrap();
    assert_eq!(once, twice);
    assert!(!once.contains("elapsed"));
    assert_eq!(registry().len(), run_all(&corpus, &ctx).len());
}
