//! Human-readable rendering of analysis reports.

use std::fmt::Write;

use trfeas_core::analysis::{AnalysisReport, ClassResult, QueryResult};
use trfeas_core::certificate::UniformMethod;
use trfeas_core::{Depth, ItemSet, Witness};

fn set(items: &ItemSet) -> String {
    let ids: Vec<&str> = items.iter().map(|i| i.as_str()).collect();
    format!("{{{}}}", ids.join(", "))
}

fn witness(w: &Option<Witness>) -> String {
    match w {
        Some(w) => {
            let ids: Vec<&str> = w.assignment.iter().map(|i| i.as_str()).collect();
            format!("({})", ids.join(", "))
        }
        None => "none".into(),
    }
}

fn depth(d: Option<Depth>) -> String {
    d.map_or_else(|| "none".into(), |d| d.to_string())
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn query(out: &mut String, r: &QueryResult) {
    let _ = writeln!(out, "query {}", r.id);
    if let Some(f) = &r.feasible_at {
        let _ = writeln!(
            out,
            "  feasible at depth {}: {} (witness {})",
            f.depth,
            yes(f.outcome.feasible),
            witness(&f.outcome.witness)
        );
    }
    if let Some(l) = &r.limit {
        let _ = writeln!(
            out,
            "  feasible in the limit: {} (witness {})",
            yes(l.feasible),
            witness(&l.witness)
        );
    }
    if let Some(m) = &r.min_depth {
        let constructive = if m.constructive_applicable {
            depth(m.constructive)
        } else {
            "n/a (schedule not monotone)".into()
        };
        let _ = writeln!(
            out,
            "  min feasible depth: {} (constructive bound: {constructive})",
            depth(m.scan)
        );
    }
    if let Some(nr) = &r.nr {
        let _ = writeln!(
            out,
            "  noetherian retrieval: {} (first feasible depth {})",
            if nr.nr_holds { "holds" } else { "VIOLATED" },
            depth(nr.first_feasible_depth)
        );
    }
    if let Some(d) = &r.diagnosis {
        let cov: Vec<String> = d.slot_coverage.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(
            out,
            "  depth {}: slot coverage [{}], feasible: {}",
            d.depth,
            cov.join(", "),
            yes(d.feasible)
        );
        if d.coverage_gap {
            let _ = writeln!(out, "  >>> all slots covered, no joint witness <<<");
        }
        for b in &d.blocking {
            let ids: Vec<&str> = b.tuple.iter().map(|i| i.as_str()).collect();
            let _ = writeln!(out, "    ({}) missing {}", ids.join(", "), set(&b.missing));
        }
    }
    if let Some(gaps) = &r.coverage_gap_depths {
        if !gaps.is_empty() {
            let ks: Vec<String> = gaps.iter().map(|k| k.to_string()).collect();
            let _ = writeln!(
                out,
                "  all slots covered, no joint witness at depth(s) {}",
                ks.join(", ")
            );
        }
    }
}

pub fn text(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let s = &r.schedule;
    let _ = writeln!(
        out,
        "schedule: {}, horizon {}, monotone: {}",
        s.kind,
        s.horizon,
        yes(s.monotone)
    );
    if let Some(v) = &s.violation {
        let _ = writeln!(
            out,
            "  drops `{}` between depth {} and {}",
            v.dropped,
            v.depth,
            v.depth.next()
        );
    }
    let _ = writeln!(out, "  limit domain: {}", set(&s.limit_domain));
    for q in &r.queries {
        query(&mut out, q);
    }
    match &r.class {
        Some(ClassResult::Uniform(u)) => {
            let _ = writeln!(out, "uniform depth (scan): {}", depth(u.uniform_depth));
            let bound = match u.method {
                UniformMethod::Certificate => format!(
                    "{} (verified: {})",
                    depth(u.certificate_depth),
                    yes(u.certificate_verified)
                ),
                UniformMethod::Scan => "n/a".into(),
            };
            let _ = writeln!(out, "certificate depth bound: {bound}");
            let _ = writeln!(out, "basis ({} items): {}", u.basis.len(), set(&u.basis));
            if let Some(q) = &u.violating_query {
                let _ = writeln!(out, "violating query: {q}");
            }
        }
        Some(ClassResult::Undefined { not_limit_feasible }) => {
            let _ = writeln!(
                out,
                "uniform depth undefined: `{not_limit_feasible}` is infeasible in the limit"
            );
        }
        None => {}
    }
    if let Some(c) = &r.certificates {
        let _ = writeln!(out, "certificates ({:?}):", c.source);
        for (q, items) in &c.assignment {
            let _ = writeln!(out, "  {q}: {}", set(items));
        }
        for q in &c.uncertified {
            let _ = writeln!(out, "  {q}: none (infeasible in the limit)");
        }
        if let (Some(s), Some(l)) = (&c.soundness, &c.completeness) {
            let _ = writeln!(
                out,
                "  sound: {}, limit-complete: {}",
                yes(s.sound),
                yes(l.limit_complete)
            );
        }
    }
    if r.violations.is_empty() {
        let _ = writeln!(out, "result: all checked properties hold");
    } else {
        let _ = writeln!(out, "result: {} violation(s)", r.violations.len());
        for v in &r.violations {
            let _ = writeln!(out, "  - {v}");
        }
    }
    out
}
