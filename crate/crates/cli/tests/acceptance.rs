//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::{Command, ExitCode};

use trfeas_core::certificate::{
    basis, check_limit_completeness, check_soundness, extract_assignment, is_finitely_generated,
    uniform_depth, UniformMethod,
};
use trfeas_core::feasibility::{
    brute_force_feasible, check_nr, constructive_min_depth, diagnose, is_feasible_at,
    is_feasible_limit, min_feasible_depth,
};
use trfeas_core::fixtures;
use trfeas_core::par::{self, Exec};
use trfeas_core::random::{random_scenario, RandomParams, ScheduleKind};
use trfeas_core::schedule::MonotoneViolation;
use trfeas_core::{
    parse_scenario, serialize_scenario, validate_scenario, Depth, EvidenceItem, ItemSet,
    ValidatedScenario,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const SEEDS: std::ops::RangeInclusive<u64> = 1..=200;

fn d(k: usize) -> Depth {
    Depth::new(k).unwrap()
}

/// Parameters vary with the seed so the suite covers every size up to the caps.
fn params_for(seed: u64, kind: ScheduleKind) -> RandomParams {
    const DENSITIES: [f64; 4] = [0.1, 0.25, 0.4, 0.7];
    RandomParams {
        universe_size: 4 + (seed as usize % 13),
        slots: 1 + (seed as usize % 4),
        queries: 1 + (seed as usize / 4 % 8),
        relation_density: DENSITIES[seed as usize % DENSITIES.len()],
        schedule_kind: kind,
    }
}

fn suite(kinds: &[ScheduleKind]) -> Vec<(u64, ScheduleKind, ValidatedScenario)> {
    kinds
        .iter()
        .flat_map(|&kind| SEEDS.map(move |seed| (seed, kind)))
        .map(|(seed, kind)| {
            (
                seed,
                kind,
                random_scenario(seed, &params_for(seed, kind)).unwrap(),
            )
        })
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn alternation_counterexample() -> Outcome {
    let sc = fixtures::prop1();
    let q = &sc.class.queries()[0];
    let s = &sc.schedule;
    ensure(s.effective_horizon() == d(2), || "horizon != 2".into())?;
    ensure(is_feasible_limit(q, s).feasible, || {
        "not feasible in the limit".into()
    })?;
    for k in Depth::up_to(s.effective_horizon()) {
        ensure(!is_feasible_at(q, s, k).feasible, || {
            format!("feasible at depth {k}")
        })?;
    }
    let nr = check_nr(q, s);
    ensure(!nr.nr_holds && nr.first_feasible_depth.is_none(), || {
        format!("{nr:?}")
    })?;
    let m = s.is_monotone();
    ensure(
        !m.monotone
            && m.violation
                == Some(MonotoneViolation {
                    depth: d(1),
                    dropped: EvidenceItem::new("a"),
                }),
        || format!("{m:?}"),
    )?;
    Ok("limit-feasible, infeasible at k=1..2, NR violated, violation (1, a)".into())
}

fn monotone_min_depth_suite() -> Outcome {
    let scenarios = suite(&ScheduleKind::MONOTONE);
    let results = par::map(
        Exec::Parallel,
        &scenarios,
        |(seed, kind, sc)| -> Result<usize, String> {
            let s = &sc.schedule;
            let mut checked = 0;
            for q in sc.class.queries() {
                if !is_feasible_limit(q, s).feasible {
                    continue;
                }
                checked += 1;
                let tag = || format!("seed {seed} {kind:?} query {}", q.id());
                let k = min_feasible_depth(q, s)
                    .ok_or_else(|| format!("{}: no finite depth", tag()))?;
                for j in 1..k.get() {
                    ensure(!is_feasible_at(q, s, d(j)).feasible, || {
                        format!("{}: feasible below K at {j}", tag())
                    })?;
                }
                ensure(is_feasible_at(q, s, k).feasible, || {
                    format!("{}: infeasible at K", tag())
                })?;
                let fast = constructive_min_depth(q, s).map_err(|e| format!("{}: {e}", tag()))?;
                ensure(fast == Some(k), || {
                    format!("{}: fast path {fast:?} != scan {k}", tag())
                })?;
            }
            Ok(checked)
        },
    );
    let mut total = 0;
    for r in results {
        total += r?;
    }
    ensure(total > 0, || "no limit-feasible queries generated".into())?;
    Ok(format!(
        "{} monotone scenarios, {total} limit-feasible queries, zero violations",
        scenarios.len()
    ))
}

fn certificate_depth_check(
    sc_class: &trfeas_core::QueryClass,
    s: &trfeas_core::Schedule,
) -> Result<(), String> {
    let a = extract_assignment(sc_class, s).map_err(|e| e.to_string())?;
    let sound = check_soundness(&a, sc_class, s);
    ensure(sound.sound, || {
        format!("unsound: {:?}", sound.first_counterexample())
    })?;
    ensure(
        check_limit_completeness(&a, sc_class, s).limit_complete,
        || "not limit-complete".into(),
    )?;
    let r = uniform_depth(sc_class, s, None).map_err(|e| e.to_string())?;
    ensure(r.method == UniformMethod::Certificate, || {
        "certificate method not used".into()
    })?;
    let ck = r.certificate_depth.ok_or("no certificate K")?;
    ensure(r.certificate_verified, || {
        "certificate K not verified".into()
    })?;
    for q in sc_class.queries() {
        ensure(is_feasible_at(q, s, ck).feasible, || {
            format!("{} infeasible at certificate K", q.id())
        })?;
    }
    let sk = r.uniform_depth.ok_or("no scan K")?;
    ensure(sk <= ck, || format!("scan K {sk} > certificate K {ck}"))?;
    Ok(())
}

fn certificate_uniform_suite() -> Outcome {
    let scenarios = suite(&ScheduleKind::MONOTONE);
    let results = par::map(
        Exec::Parallel,
        &scenarios,
        |(seed, kind, sc)| -> Result<(bool, bool), String> {
            let s = &sc.schedule;
            let tag = |e: String| format!("seed {seed} {kind:?}: {e}");
            let limit = s.limit_domain();
            let all = sc
                .class
                .queries()
                .iter()
                .all(|q| trfeas_core::feasibility::is_feasible_in(q, &limit).feasible);
            if all {
                certificate_depth_check(&sc.class, s).map_err(tag)?;
                return Ok((true, false));
            }
            // Also exercise the limit-feasible sub-class of the remaining scenarios.
            match sc
                .class
                .filtered(|q| trfeas_core::feasibility::is_feasible_in(q, &limit).feasible)
            {
                Some(sub) => {
                    certificate_depth_check(&sub, s).map_err(tag)?;
                    Ok((false, true))
                }
                None => Ok((false, false)),
            }
        },
    );
    let (mut full, mut sub) = (0, 0);
    for r in results {
        let (f, s) = r?;
        full += usize::from(f);
        sub += usize::from(s);
    }
    ensure(full > 0, || {
        "no fully limit-feasible monotone scenario generated".into()
    })?;
    Ok(format!(
        "{full} fully limit-feasible scenarios (+{sub} limit-feasible sub-classes), zero violations"
    ))
}

fn ranked_family_growth() -> Outcome {
    for n in [1usize, 2, 5, 10, 25, 50] {
        let sc = fixtures::prop2(n);
        let s = &sc.schedule;
        for (i, q) in sc.class.queries().iter().enumerate() {
            let k = min_feasible_depth(q, s);
            ensure(k == Some(d(i + 1)), || {
                format!("n={n}: min depth of q{} is {k:?}", i + 1)
            })?;
        }
        let r = uniform_depth(&sc.class, s, None).map_err(|e| e.to_string())?;
        ensure(r.uniform_depth == Some(d(n)), || {
            format!("n={n}: scan K {:?}", r.uniform_depth)
        })?;
        ensure(r.certificate_depth == Some(d(n)), || {
            format!("n={n}: certificate K {:?}", r.certificate_depth)
        })?;
        let a = extract_assignment(&sc.class, s).map_err(|e| e.to_string())?;
        ensure(basis(&a).len() == n, || {
            format!("n={n}: |basis| = {}", basis(&a).len())
        })?;
        if n >= 2 {
            let g: ItemSet = (1..n).map(fixtures::prop2_item).collect();
            ensure(!is_finitely_generated(&a, &g), || {
                format!("n={n}: generated by e1..e(n-1)")
            })?;
        }
    }
    Ok("n in {1,2,5,10,25,50}: min depths i, scan K = certificate K = |basis| = n".into())
}

fn coverage_gap() -> Outcome {
    let sc = fixtures::prop3();
    let diag = diagnose(&sc.class.queries()[0], &sc.schedule, Depth::ONE);
    ensure(diag.slot_coverage == vec![2, 1], || {
        format!("coverage {:?}", diag.slot_coverage)
    })?;
    ensure(diag.all_slots_covered, || "slots not all covered".into())?;
    ensure(!diag.feasible, || "feasible at depth 1".into())?;
    let b2 = EvidenceItem::new("b2");
    ensure(
        diag.blocking.iter().any(|b| b.missing.contains(&b2)),
        || "b2 not reported missing".into(),
    )?;
    Ok("coverage [2, 1], all slots covered, infeasible, b2 missing".into())
}

fn oracle_equivalence() -> Outcome {
    let scenarios = suite(&ScheduleKind::ALL);
    let results = par::map(
        Exec::Parallel,
        &scenarios,
        |(seed, kind, sc)| -> Result<usize, String> {
            let mut n = 0;
            for q in sc.class.queries() {
                for k in Depth::up_to(sc.schedule.effective_horizon()) {
                    let oracle = brute_force_feasible(q, &sc.schedule.domain_at(k))
                        .map_err(|e| e.to_string())?;
                    let fast = is_feasible_at(q, &sc.schedule, k).feasible;
                    ensure(oracle == fast, || {
                        format!("seed {seed} {kind:?} query {} depth {k}: oracle {oracle} vs scan {fast}", q.id())
                    })?;
                    n += 1;
                }
            }
            Ok(n)
        },
    );
    let mut total = 0;
    for r in results {
        total += r?;
    }
    Ok(format!(
        "{} scenarios, {total} (query, depth) checks, zero disagreements",
        scenarios.len()
    ))
}

fn closure_properties() -> Outcome {
    let scenarios = suite(&ScheduleKind::ALL);
    for (seed, kind, sc) in &scenarios {
        let s = &sc.schedule;
        let c = s.monotone_closure();
        let tag = || format!("seed {seed} {kind:?}");
        ensure(c.is_monotone().monotone, || {
            format!("{}: closure not monotone", tag())
        })?;
        ensure(c.limit_domain() == s.limit_domain(), || {
            format!("{}: limit changed", tag())
        })?;
        for k in Depth::up_to(s.effective_horizon()) {
            ensure(s.domain_at(k).is_subset(&c.domain_at(k)), || {
                format!("{}: closure does not dominate at {k}", tag())
            })?;
        }
    }
    let p1 = fixtures::prop1();
    let closed = p1.schedule.monotone_closure();
    let q = &p1.class.queries()[0];
    ensure(is_feasible_at(q, &closed, d(2)).feasible, || {
        "prop1 closure infeasible at 2".into()
    })?;
    Ok(format!(
        "{} schedules: monotone, same limit, dominating; prop1 closure feasible at 2",
        scenarios.len()
    ))
}

fn serialization_and_cli() -> Outcome {
    let mut fixtures_checked = 0;
    for sc in [
        fixtures::prop1(),
        fixtures::prop2(1),
        fixtures::prop2(8),
        fixtures::prop2(50),
        fixtures::prop3(),
    ] {
        let text = serialize_scenario(&sc.to_document());
        let doc = parse_scenario(&text).map_err(|e| e.to_string())?;
        ensure(serialize_scenario(&doc) == text, || {
            "round trip not byte-identical".into()
        })?;
        ensure(
            validate_scenario(&doc).map_err(|e| e.to_string())? == sc,
            || "round trip changed the scenario".into(),
        )?;
        fixtures_checked += 1;
    }
    let bin = env!("CARGO_BIN_EXE_trfeas");
    for (name, want) in [("prop1", 1), ("prop2:8", 0), ("prop3", 0), ("prop2:0", 2)] {
        let status = Command::new(bin)
            .args(["demo", name])
            .output()
            .map_err(|e| e.to_string())?
            .status;
        ensure(status.code() == Some(want), || {
            format!("demo {name}: exit {:?}, want {want}", status.code())
        })?;
    }
    Ok(format!(
        "{fixtures_checked} fixtures byte-identical; demo exit codes prop1=1 prop2:8=0 prop3=0 bad=2"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "1 non-monotone alternation destroys finite feasibility",
            alternation_counterexample,
        ),
        (
            "2 monotone schedules preserve feasibility (scan = constructive)",
            monotone_min_depth_suite,
        ),
        (
            "3 certificate uniform depth on monotone schedules",
            certificate_uniform_suite,
        ),
        ("4 ranked-family growth law", ranked_family_growth),
        ("5 slot coverage without joint witness", coverage_gap),
        ("6 brute-force oracle equivalence", oracle_equivalence),
        ("7 monotone closure properties", closure_properties),
        (
            "8 canonical serialization and CLI exit codes",
            serialization_and_cli,
        ),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
