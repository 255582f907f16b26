mod common;

use common::{arb_mutations, arb_tree, check_freezing, freezing_instance, language, mutate, pick};
use proptest::prelude::*;
use ptfreeze::freezing::{freeze_advanced, freeze_baseline};
use ptfreeze::ipda::{ipda_apply, IpdaOptions, IpdaRequest, ReferenceIpda};
use ptfreeze::{accepts, Trace};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(250))]

    #[test]
    fn freezing_postconditions_hold_for_both_algorithms(inst in freezing_instance()) {
        prop_assume!(inst.is_some());
        let inst = inst.unwrap();
        let req = IpdaRequest { tree: inst.tree.clone(), trace: inst.trace.clone(), previous: inst.previous.clone() };
        let opts = IpdaOptions::default();
        let base = freeze_baseline(&ReferenceIpda, &req, &inst.frozen, &opts);
        prop_assert!(base.is_ok(), "baseline failed on {:?}: {:?}", inst, base);
        check_freezing(&base.unwrap(), &inst).map_err(TestCaseError::fail)?;
        let adv = freeze_advanced(&ReferenceIpda, &req, &inst.frozen, &opts);
        prop_assert!(adv.is_ok(), "advanced failed on {:?}: {:?}", inst, adv);
        check_freezing(&adv.unwrap(), &inst).map_err(TestCaseError::fail)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn reference_ipda_meets_its_contract(t in arb_tree(12), prev in proptest::collection::vec(any::<usize>(), 0..=3),
                                         i in any::<usize>(), muts in arb_mutations()) {
        let lang = language(&t, 2);
        prop_assume!(lang.is_some());
        let lang = lang.unwrap();
        let previous: Vec<Trace> = prev.iter().map(|&p| pick(&lang, p)).collect();
        let trace = mutate(&pick(&lang, i), &muts);
        let req = IpdaRequest::new(t.clone(), trace.clone(), previous.clone());
        let out = ipda_apply(&ReferenceIpda, &req, &IpdaOptions::default()).unwrap();
        for p in previous.iter().chain([&trace]) {
            prop_assert!(accepts(&out, p));
        }
        if accepts(&t, &trace) {
            prop_assert_eq!(out, t);
        }
    }
}
