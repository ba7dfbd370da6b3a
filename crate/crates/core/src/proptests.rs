//! Cross-module invariants on random small instances.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use proptest::prelude::*;

use crate::normalize::{
    eliminate_collisions, flatten, functional_completion, normalise, quotient_equalities,
};
use crate::search::{search_max, SearchConfig};
use crate::{
    count_solutions, count_solutions_backtrack, evaluate_term, parse_instance, Elem, Equation,
    Interpretation, Signature, SymbolId, Term, TermInstance,
};

const VARS: usize = 3;

fn signature() -> Signature {
    let mut s = Signature::new();
    s.add("f", 2).unwrap();
    s.add("g", 1).unwrap();
    s.add("c", 0).unwrap();
    s
}

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        (0..VARS).prop_map(Term::Var),
        Just(Term::constant(SymbolId(2))),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::app(SymbolId(0), vec![a, b])),
            inner.prop_map(|a| Term::app(SymbolId(1), vec![a])),
        ]
    })
}

fn instance() -> impl Strategy<Value = TermInstance> {
    prop::collection::vec((term(), term()), 0..4).prop_map(|eqs| {
        let vars = (0..VARS).map(|i| format!("v{i}")).collect();
        let eqs = eqs.into_iter().map(|(l, r)| Equation::new(l, r)).collect();
        TermInstance::new(signature(), vars, eqs).unwrap()
    })
}

/// Alphabet size, then entries for f (n^2), g (n) and c (1).
fn tables() -> impl Strategy<Value = (u32, Vec<Elem>)> {
    (1u32..=3).prop_flat_map(|n| {
        let len = (n * n + n + 1) as usize;
        (Just(n), prop::collection::vec(0..n, len))
    })
}

fn interp(n: u32, e: &[Elem]) -> Interpretation {
    let nn = (n * n) as usize;
    let n1 = n as usize;
    let tables = vec![
        e[..nn].to_vec(),
        e[nn..nn + n1].to_vec(),
        e[nn + n1..].to_vec(),
    ];
    Interpretation::new(&signature(), n, tables).unwrap()
}

fn permutation(n: u32) -> impl Strategy<Value = Vec<Elem>> {
    Just((0..n).collect::<Vec<Elem>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn relabelling_the_alphabet_keeps_counts(
        inst in instance(),
        (n, e, perm) in tables().prop_flat_map(|(n, e)| (Just(n), Just(e), permutation(n))),
    ) {
        let i = interp(n, &e);
        let moved = i.conjugate(&perm);
        prop_assert_eq!(count_solutions(&inst, &i).unwrap(), count_solutions(&inst, &moved).unwrap());
    }

    #[test]
    fn evaluation_commutes_with_relabelling(
        t in term(),
        (n, e, perm, a) in tables().prop_flat_map(|(n, e)| {
            (Just(n), Just(e), permutation(n), prop::collection::vec(0..n, VARS))
        }),
    ) {
        let i = interp(n, &e);
        let moved: Vec<Elem> = a.iter().map(|&x| perm[x as usize]).collect();
        let lhs = evaluate_term(&t, &i.conjugate(&perm), &moved);
        prop_assert_eq!(lhs, perm[evaluate_term(&t, &i, &a) as usize]);
    }

    #[test]
    fn printed_instances_parse_back(inst in instance()) {
        let text = alloc::string::ToString::to_string(&inst);
        let again = parse_instance(&text).unwrap();
        prop_assert_eq!(alloc::string::ToString::to_string(&again), text);
        prop_assert_eq!(again.equations.len(), inst.equations.len());
    }

    #[test]
    fn interpretation_text_round_trips((n, e) in tables()) {
        let i = interp(n, &e);
        let back = Interpretation::parse_text(&signature(), &i.to_text(&signature())).unwrap();
        prop_assert_eq!(back, i);
    }

    #[test]
    fn backtracking_matches_enumeration(inst in instance(), (n, e) in tables()) {
        let i = interp(n, &e);
        prop_assert_eq!(count_solutions_backtrack(&inst, &i).unwrap(), count_solutions(&inst, &i).unwrap());
    }

    #[test]
    fn every_stage_preserves_counts(inst in instance(), (n, e) in tables()) {
        let i = interp(n, &e);
        let base = count_solutions(&inst, &i).unwrap().count;
        let flat = flatten(&inst);
        let (quot, _) = quotient_equalities(&flat, &[]);
        let (coll, _) = eliminate_collisions(&quot);
        let comp = functional_completion(&coll);
        for nf in [&flat, &quot, &coll, &comp] {
            prop_assert_eq!(&count_solutions_backtrack(&nf.to_instance(), &i).unwrap().count, &base);
        }
        let (nf, _) = normalise(&inst);
        prop_assert_eq!(count_solutions_backtrack(&nf.to_instance(), &i).unwrap().count, base);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn local_search_repeats_under_a_seed(inst in instance(), seed in any::<u64>()) {
        let cfg = SearchConfig { restarts: 2, ..SearchConfig::local(seed).with_budget(300) };
        let a = search_max(&inst, 2, &cfg).unwrap();
        let b = search_max(&inst, 2, &cfg).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn search_modes_agree_at_two(inst in instance()) {
        let ex = search_max(&inst, 2, &SearchConfig::exhaustive()).unwrap();
        let bb = search_max(&inst, 2, &SearchConfig::branch_bound()).unwrap();
        prop_assert!(ex.certified && bb.certified);
        prop_assert_eq!(ex.best_count, bb.best_count);
        prop_assert_eq!(count_solutions(&inst, &ex.witness).unwrap().count, ex.best_count.into());
    }
}
