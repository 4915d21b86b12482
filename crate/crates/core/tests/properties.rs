use dlsat_core::concept::{count_unions, nnf, subconcepts, Concept};
use dlsat_core::kb::KnowledgeBase;
use dlsat_core::sat::{encode_trace_cnf, export_dimacs, parse_dimacs, solve_cnf, SolveResult};
use dlsat_core::semantics::{brute_force_sat, verify_model};
use dlsat_core::syntax::{parse_concept, print_concept};
use dlsat_core::tableau::{decide_alc, decide_with_tboxes, extract_model};
use proptest::prelude::*;

fn concept() -> impl Strategy<Value = Concept> {
    let leaf = prop_oneof![
        Just(Concept::Top),
        Just(Concept::Bot),
        prop::sample::select(vec!["A", "B", "C"]).prop_map(Concept::atom),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let role = prop::sample::select(vec!["r", "s"]);
        prop_oneof![
            inner.clone().prop_map(Concept::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Concept::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Concept::or(a, b)),
            (role.clone(), inner.clone()).prop_map(|(r, c)| Concept::exists(r, c)),
            (role, inner).prop_map(|(r, c)| Concept::forall(r, c)),
        ]
    })
}

proptest! {
    #[test]
    fn nnf_is_idempotent_and_normal(c in concept()) {
        let n = nnf(&c);
        prop_assert!(n.is_nnf());
        prop_assert_eq!(nnf(&n), n.clone());
        prop_assert_eq!(nnf(&Concept::not(Concept::not(c))), n);
    }

    #[test]
    fn print_then_parse_is_identity(c in concept()) {
        let text = print_concept(&c);
        prop_assert_eq!(parse_concept(&text).unwrap(), c);
    }

    #[test]
    fn subconcepts_are_distinct_and_rooted(c in concept()) {
        let subs = subconcepts(&c);
        prop_assert_eq!(&subs[0], &c);
        let mut sorted = subs.clone();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), subs.len());
        prop_assert!(subs.len() <= c.size());
    }

    #[test]
    fn engines_agree_and_models_verify(c in concept()) {
        let c = nnf(&c);
        let trace = decide_alc(&c).unwrap();
        let blocking = decide_with_tboxes(&c, &KnowledgeBase::empty()).unwrap();
        let cnf = encode_trace_cnf(&c).unwrap();
        let via_sat = matches!(solve_cnf(&cnf), SolveResult::Sat(_));
        prop_assert_eq!(trace.verdict, blocking.verdict);
        prop_assert_eq!(trace.verdict.is_sat(), via_sat);
        for res in [&trace, &blocking] {
            if let Some(w) = &res.witness {
                let m = extract_model(w).unwrap();
                prop_assert!(verify_model(&m, &c, &KnowledgeBase::empty()));
            }
        }
        if brute_force_sat(&c, &KnowledgeBase::empty(), 2).is_found() {
            prop_assert!(trace.verdict.is_sat());
        }
        prop_assert!(trace.stats.or_branch_points <= 1u64 << count_unions(&c).min(63));
    }

    #[test]
    fn dimacs_round_trip(c in concept()) {
        let cnf = encode_trace_cnf(&nnf(&c)).unwrap();
        let back = parse_dimacs(&export_dimacs(&cnf)).unwrap();
        prop_assert_eq!(back.num_vars, cnf.num_vars);
        prop_assert_eq!(back.clauses, cnf.clauses);
    }
}
