//! The three canonical counterexample scenarios.
//!
//! * [`prop1`]: alternating truncation. A two-slot query is feasible in the
//!   limit but never at a finite depth, because the schedule swaps `a` for `b`.
//! * [`prop2`]: a ranked list `e1..en` with one single-slot query per item.
//!   Every query is eventually feasible, but the uniform depth grows with `n`.
//! * [`prop3`]: both slots have a candidate at depth 1 yet no relation tuple is
//!   jointly available.

use std::collections::BTreeMap;

use crate::evidence::{
    item_set, tuple, EvidenceItem, Query, QueryClass, Slot, Universe, ValidatedScenario,
};
use crate::schedule::{Schedule, Tail};

/// `U = {a, b}`, `D(odd) = {a}`, `D(even) = {b}`, one query requiring `(a, b)`.
pub fn prop1() -> ValidatedScenario {
    let universe = Universe::new(["a", "b"].map(EvidenceItem::from)).unwrap();
    let schedule = Schedule::explicit(vec![item_set(["a"]), item_set(["b"])], Tail::Cycle);
    let q = Query::new(
        "q",
        vec![
            Slot::new("first", item_set(["a"])),
            Slot::new("second", item_set(["b"])),
        ],
        [tuple(["a", "b"])],
    )
    .unwrap();
    ValidatedScenario::new(universe, schedule, QueryClass::new(vec![q]).unwrap(), None).unwrap()
}

/// Item id `e{i}` of the ranked family.
pub fn prop2_item(i: usize) -> EvidenceItem {
    EvidenceItem::new(format!("e{i}"))
}

/// `U = {e1..en}`, cumulative order `e1..en`, queries `q1..qn` where `qi`
/// needs exactly `ei`; certificates `{ei}` are included. Panics if `n == 0`.
pub fn prop2(n: usize) -> ValidatedScenario {
    assert!(n >= 1, "family size must be positive");
    let items: Vec<EvidenceItem> = (1..=n).map(prop2_item).collect();
    let universe = Universe::new(items.clone()).unwrap();
    let schedule = Schedule::cumulative(items.clone());
    let queries = items
        .iter()
        .enumerate()
        .map(|(i, e)| {
            Query::new(
                format!("q{}", i + 1),
                vec![Slot::new("item", [e.clone()].into())],
                [vec![e.clone()]],
            )
            .unwrap()
        })
        .collect();
    let certificates: BTreeMap<String, _> = items
        .iter()
        .enumerate()
        .map(|(i, e)| (format!("q{}", i + 1), [e.clone()].into()))
        .collect();
    ValidatedScenario::new(
        universe,
        schedule,
        QueryClass::new(queries).unwrap(),
        Some(certificates),
    )
    .unwrap()
}

/// `U = {a1, a2, b1, b2}`, `A1 = {a1, a2}`, `A2 = {b1, b2}`,
/// `D(1) = {a1, a2, b1}`, `D(k >= 2) = U`, relation `{(a1, b2), (a2, b2)}`.
///
/// At depth 1 slot coverage is `[2, 1]` but every tuple needs the missing
/// `b2`. Note the relation: with matched pairs `{(a1, b1), (a2, b2)}` the
/// tuple `(a1, b1)` would already be available at depth 1, so no gap would
/// exist. The second step adds `b2` so the query is feasible in the limit.
pub fn prop3() -> ValidatedScenario {
    let universe = Universe::new(["a1", "a2", "b1", "b2"].map(EvidenceItem::from)).unwrap();
    let schedule = Schedule::explicit(
        vec![
            item_set(["a1", "a2", "b1"]),
            item_set(["a1", "a2", "b1", "b2"]),
        ],
        Tail::RepeatLast,
    );
    let q = Query::new(
        "q",
        vec![
            Slot::new("first", item_set(["a1", "a2"])),
            Slot::new("second", item_set(["b1", "b2"])),
        ],
        [tuple(["a1", "b2"]), tuple(["a2", "b2"])],
    )
    .unwrap();
    ValidatedScenario::new(universe, schedule, QueryClass::new(vec![q]).unwrap(), None).unwrap()
}

/// Resolves a demo name: `prop1`, `prop2:N` (N >= 1) or `prop3`.
pub fn by_name(name: &str) -> Option<ValidatedScenario> {
    match name {
        "prop1" => Some(prop1()),
        "prop3" => Some(prop3()),
        _ => {
            let n: usize = name.strip_prefix("prop2:")?.parse().ok()?;
            (n >= 1).then(|| prop2(n))
        }
    }
}
