use proptest::prelude::*;

use ost_core::compliance::{check_compliance, oracle_compliant, synth};
use ost_core::congruence::canonicalize;
use ost_core::propgen::{
    check_synth_case, gen_compliant_pair, gen_orch, gen_runtime, gen_type, gen_typed_process,
    rewrite_walk, shrink, Shrink,
};
use ost_core::semantics::{run, Deterministic, ErrorClass, SemanticsMode};
use ost_core::surface::{parse_orch, parse_process, parse_type, pretty_orch, pretty_process, pretty_type};
use ost_core::syntax::Context;
use ost_core::typecheck::typecheck;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn generated_pairs_comply(seed: u64, depth in 0usize..=5) {
        let (c, s, f) = gen_compliant_pair(seed, depth);
        prop_assert!(check_compliance(&f, &c, &s));
        prop_assert_eq!(oracle_compliant(&c, &s, 64), Ok(true));
    }

    #[test]
    fn synthesis_agrees_with_oracle(seed: u64, depth in 1usize..=5) {
        let c = gen_type(seed, depth, true, seed % 3 == 0);
        let (_, s, _) = gen_compliant_pair(seed.rotate_left(7), depth);
        prop_assert_eq!(check_synth_case(&c, &s, &synth), Ok(()));
    }

    #[test]
    fn types_and_orchestrators_round_trip(seed: u64, depth in 0usize..=5) {
        let t = gen_type(seed, depth, true, seed % 2 == 0);
        prop_assert_eq!(parse_type(&pretty_type(&t)).unwrap(), t);
        let f = gen_orch(seed, depth);
        prop_assert_eq!(parse_orch(&pretty_orch(&f)).unwrap(), f);
    }

    #[test]
    fn canonical_form_is_stable_under_rewriting(seed: u64, steps in 0usize..60) {
        let p = gen_runtime(seed);
        let c = canonicalize(&p).unwrap();
        prop_assert_eq!(canonicalize(&c.to_process()).unwrap(), c.clone());
        prop_assert_eq!(canonicalize(&rewrite_walk(seed, &p, steps)).unwrap(), c);
        prop_assert_eq!(parse_process(&pretty_process(&p)).unwrap(), p);
    }

    #[test]
    fn typed_processes_run_without_errors(seed: u64, sessions in 1usize..=2) {
        let p = gen_typed_process(seed, sessions, 3);
        let d = typecheck(&Context::new(), &p, SemanticsMode::Plain).unwrap();
        prop_assert!(d.without_ends().is_empty());
        let trace = run(&p, SemanticsMode::Plain, true, &mut Deterministic, 1000).unwrap();
        prop_assert_eq!(trace.errors, vec![ErrorClass::NotAnError]);
    }

    #[test]
    fn shrinking_only_descends(seed: u64) {
        let t = gen_type(seed, 4, true, false);
        let w = t.weight();
        let small = shrink(t, |u| u.depth() >= 1);
        prop_assert!(small.weight() <= w);
        prop_assert!(small.depth() >= 1 || small.weight() == w);
    }
}
