//! Property suites over seeded random scenarios.

use proptest::prelude::*;

use trfeas_core::certificate::{
    basis, check_limit_completeness, check_soundness, extract_assignment, uniform_depth,
};
use trfeas_core::feasibility::{
    brute_force_feasible, enumerate_witnesses, is_feasible_at, is_feasible_in, min_feasible_depth,
};
use trfeas_core::random::{random_scenario, RandomParams, ScheduleKind};
use trfeas_core::{
    parse_scenario, serialize_scenario, validate_scenario, Depth, ItemSet, QueryClass,
};

fn arb_params() -> impl Strategy<Value = RandomParams> {
    (
        1usize..=16,
        1usize..=4,
        1usize..=8,
        0.0f64..=1.0,
        prop::sample::select(ScheduleKind::ALL.to_vec()),
    )
        .prop_map(
            |(universe_size, slots, queries, relation_density, schedule_kind)| RandomParams {
                universe_size,
                slots,
                queries,
                relation_density,
                schedule_kind,
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn serialization_is_canonical(seed in any::<u64>(), p in arb_params()) {
        let sc = random_scenario(seed, &p).unwrap();
        let text = serialize_scenario(&sc.to_document());
        let doc = parse_scenario(&text).unwrap();
        prop_assert_eq!(serialize_scenario(&doc), text.clone());
        let again = validate_scenario(&doc).unwrap();
        prop_assert_eq!(&again, &sc);
        for q in again.class.queries() {
            for t in q.relation() {
                for (i, item) in t.iter().enumerate() {
                    prop_assert!(q.slots()[i].admissible.contains(item));
                }
            }
        }
    }

    #[test]
    fn oracle_agrees_and_witnesses_are_valid(seed in any::<u64>(), p in arb_params()) {
        let sc = random_scenario(seed, &p).unwrap();
        let s = &sc.schedule;
        for q in sc.class.queries() {
            for k in Depth::up_to(s.effective_horizon()) {
                let dom = s.domain_at(k);
                let out = is_feasible_at(q, s, k);
                prop_assert_eq!(brute_force_feasible(q, &dom).unwrap(), out.feasible);
                let all = enumerate_witnesses(q, &dom);
                prop_assert_eq!(out.witness.as_ref(), all.first());
                for w in &all {
                    prop_assert!(q.contains_tuple(&w.assignment));
                    prop_assert!(w.assignment.iter().all(|i| dom.contains(i)));
                }
            }
        }
    }

    #[test]
    fn feasibility_is_monotone_in_the_domain(seed in any::<u64>(), p in arb_params(), mask in any::<u16>()) {
        let sc = random_scenario(seed, &p).unwrap();
        let items: Vec<_> = sc.universe.items().iter().cloned().collect();
        let small: ItemSet = items.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, x)| x.clone()).collect();
        let big: ItemSet = items.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1 || i % 3 == 0).map(|(_, x)| x.clone()).collect();
        for q in sc.class.queries() {
            let ws = enumerate_witnesses(q, &small);
            let wb = enumerate_witnesses(q, &big);
            prop_assert!(ws.iter().all(|w| wb.contains(w)));
            if is_feasible_in(q, &small).feasible {
                prop_assert!(is_feasible_in(q, &big).feasible);
            }
        }
    }

    #[test]
    fn extracted_certificates_are_sound_and_complete(seed in any::<u64>(), p in arb_params()) {
        let sc = random_scenario(seed, &p).unwrap();
        let s = &sc.schedule;
        let limit = s.limit_domain();
        if let Some(class) = sc.class.filtered(|q| is_feasible_in(q, &limit).feasible) {
            let a = extract_assignment(&class, s).unwrap();
            prop_assert!(check_soundness(&a, &class, s).sound);
            prop_assert!(check_limit_completeness(&a, &class, s).limit_complete);

            let r = uniform_depth(&class, s, Some(&a)).unwrap();
            if let Some(k) = r.uniform_depth {
                for q in class.queries() {
                    prop_assert!(is_feasible_at(q, s, k).feasible);
                }
                for j in 1..k.get() {
                    let kj = Depth::new(j).unwrap();
                    prop_assert!(class.queries().iter().any(|q| !is_feasible_at(q, s, kj).feasible));
                }
            }
            if let (Some(scan), Some(cert)) = (r.uniform_depth, r.certificate_depth) {
                prop_assert!(scan <= cert);
            }
            if s.is_monotone().monotone {
                prop_assert!(r.certificate_depth.is_some() && r.certificate_verified);
            }
            // Singleton class: uniform depth is that query's minimal depth.
            let q = class.queries()[0].clone();
            let single = QueryClass::new(vec![q.clone()]).unwrap();
            prop_assert_eq!(uniform_depth(&single, s, None).unwrap().uniform_depth, min_feasible_depth(&q, s));
        }
    }

    #[test]
    fn basis_grows_under_class_extension(seed in any::<u64>(), p in arb_params()) {
        let sc = random_scenario(seed, &p).unwrap();
        let s = &sc.schedule;
        let limit = s.limit_domain();
        if let Some(class) = sc.class.filtered(|q| is_feasible_in(q, &limit).feasible) {
            let mut prev = ItemSet::new();
            for n in 1..=class.len() {
                let prefix = QueryClass::new(class.queries()[..n].to_vec()).unwrap();
                let b = basis(&extract_assignment(&prefix, s).unwrap());
                prop_assert!(prev.is_subset(&b));
                prev = b;
            }
        }
    }
}
