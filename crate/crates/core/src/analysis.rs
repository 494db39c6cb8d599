//! Machine-readable analysis reports and the analyses that fill them.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::certificate::{
    check_limit_completeness, check_soundness, extract_certificate, uniform_depth,
    CertificateAssignment, CertificateSource, CompletenessReport, SoundnessReport, UniformReport,
};
use crate::evidence::{ItemSet, Query, ValidatedScenario};
use crate::feasibility::{
    check_nr, constructive_min_depth, diagnose, is_feasible_at, is_feasible_limit,
    min_feasible_depth, Diagnosis, FeasibilityOutcome, NrReport,
};
use crate::par::{self, Exec};
use crate::schedule::{Depth, MonotoneViolation, Schedule};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommandEcho {
    pub name: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScheduleFacts {
    pub kind: &'static str,
    pub monotone: bool,
    pub violation: Option<MonotoneViolation>,
    pub horizon: Depth,
    pub limit_domain: ItemSet,
}

impl ScheduleFacts {
    pub fn of(s: &Schedule) -> Self {
        let m = s.is_monotone();
        ScheduleFacts {
            kind: s.kind_name(),
            monotone: m.monotone,
            violation: m.violation,
            horizon: s.effective_horizon(),
            limit_domain: s.limit_domain(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DepthOutcome {
    pub depth: Depth,
    #[serde(flatten)]
    pub outcome: FeasibilityOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinDepthResult {
    /// Exhaustive scan over the horizon.
    pub scan: Option<Depth>,
    /// Constructive bound; only computed on monotone schedules.
    pub constructive: Option<Depth>,
    pub constructive_applicable: bool,
}

/// Per-query results. Fields a command does not compute are omitted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryResult {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub feasible_at: Option<DepthOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<FeasibilityOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_depth: Option<MinDepthResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nr: Option<NrReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnosis: Option<Diagnosis>,
    /// Depths within the horizon where every slot is covered but no tuple is available.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage_gap_depths: Option<Vec<Depth>>,
}

impl QueryResult {
    pub fn new(id: &str) -> Self {
        QueryResult {
            id: id.to_owned(),
            feasible_at: None,
            limit: None,
            min_depth: None,
            nr: None,
            diagnosis: None,
            coverage_gap_depths: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum ClassResult {
    Uniform(UniformReport),
    Undefined { not_limit_feasible: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateResult {
    pub source: CertificateSource,
    pub assignment: BTreeMap<String, ItemSet>,
    /// Queries with no certificate because they are infeasible in the limit.
    pub uncertified: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub soundness: Option<SoundnessReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub completeness: Option<CompletenessReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub command: CommandEcho,
    pub schedule: ScheduleFacts,
    pub queries: Vec<QueryResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<ClassResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificates: Option<CertificateResult>,
    /// Property violations found; empty means every checked property holds.
    pub violations: Vec<String>,
}

impl AnalysisReport {
    pub fn new(command: CommandEcho, s: &Schedule) -> Self {
        AnalysisReport {
            schema_version: SCHEMA_VERSION,
            command,
            schedule: ScheduleFacts::of(s),
            queries: Vec::new(),
            class: None,
            certificates: None,
            violations: Vec::new(),
        }
    }

    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("reports always serialize");
        out.push('\n');
        out
    }
}

pub fn feasibility_at(q: &Query, s: &Schedule, k: Depth) -> QueryResult {
    QueryResult {
        feasible_at: Some(DepthOutcome {
            depth: k,
            outcome: is_feasible_at(q, s, k),
        }),
        ..QueryResult::new(q.id())
    }
}

pub fn min_depth(q: &Query, s: &Schedule) -> MinDepthResult {
    let constructive = constructive_min_depth(q, s);
    MinDepthResult {
        scan: min_feasible_depth(q, s),
        constructive_applicable: constructive.is_ok(),
        constructive: constructive.ok().flatten(),
    }
}

pub fn coverage_gap_depths(q: &Query, s: &Schedule) -> Vec<Depth> {
    Depth::up_to(s.effective_horizon())
        .filter(|&k| diagnose(q, s, k).coverage_gap)
        .collect()
}

/// NR check for every query; a violation is recorded per failing query.
pub fn nr_all(
    sc: &ValidatedScenario,
    report: &mut AnalysisReport,
    only: Option<&Query>,
    exec: Exec,
) {
    let queries: Vec<&Query> = match only {
        Some(q) => vec![q],
        None => sc.class.queries().iter().collect(),
    };
    let results = par::map(exec, &queries, |q| {
        let nr = check_nr(q, &sc.schedule);
        QueryResult {
            limit: Some(is_feasible_limit(q, &sc.schedule)),
            nr: Some(nr),
            ..QueryResult::new(q.id())
        }
    });
    for r in &results {
        if let Some(note) = r.nr.as_ref().and_then(|n| n.violation_note.clone()) {
            report.violations.push(note);
        }
    }
    report.queries = results;
}

pub fn uniform(sc: &ValidatedScenario, report: &mut AnalysisReport) {
    let supplied = sc.certificate_assignment();
    match uniform_depth(&sc.class, &sc.schedule, supplied.as_ref()) {
        Ok(r) => {
            if r.uniform_depth.is_none() {
                report.violations.push(format!(
                    "no uniform depth within horizon {}; violating query `{}`",
                    sc.schedule.effective_horizon(),
                    r.violating_query.as_deref().unwrap_or("?")
                ));
            }
            if r.certificate_depth.is_some() && !r.certificate_verified {
                report
                    .violations
                    .push("certificate depth does not make every query feasible".to_owned());
            }
            report.class = Some(ClassResult::Uniform(r));
        }
        Err(e) => {
            let query = match &e {
                crate::certificate::CertificateError::NotAllLimitFeasible { query } => {
                    query.clone()
                }
                other => other.to_string(),
            };
            report.violations.push(e.to_string());
            report.class = Some(ClassResult::Undefined {
                not_limit_feasible: query,
            });
        }
    }
}

/// Validates supplied certificates, or extracts them for every limit-feasible
/// query when none are supplied. Returns the assignment over the certified queries.
pub fn certify(sc: &ValidatedScenario, report: &mut AnalysisReport) -> BTreeMap<String, ItemSet> {
    let s = &sc.schedule;
    let (source, assignment, uncertified) = match &sc.certificates {
        Some(certs) => {
            let missing: Vec<String> = sc
                .class
                .queries()
                .iter()
                .filter(|q| !certs.contains_key(q.id()))
                .map(|q| q.id().to_owned())
                .collect();
            (CertificateSource::Supplied, certs.clone(), missing)
        }
        None => {
            let mut map = BTreeMap::new();
            let mut uncertified = Vec::new();
            for q in sc.class.queries() {
                match extract_certificate(q, s) {
                    Ok(c) => {
                        map.insert(c.query_id, c.items);
                    }
                    Err(_) => uncertified.push(q.id().to_owned()),
                }
            }
            (CertificateSource::Extracted, map, uncertified)
        }
    };

    // Checks run on the sub-class that has certificates.
    let certified = sc.class.filtered(|q| assignment.contains_key(q.id()));
    let (soundness, completeness) = match &certified {
        Some(class) => {
            let a = CertificateAssignment::from_map(class, assignment.clone())
                .expect("assignment keys match the certified sub-class");
            (
                Some(check_soundness(&a, class, s)),
                Some(check_limit_completeness(&a, class, s)),
            )
        }
        None => (None, None),
    };
    if let Some(r) = &soundness {
        if let Some((q, k)) = r.first_counterexample() {
            report
                .violations
                .push(format!("certificate for `{q}` is unsound at depth {k}"));
        }
    }
    if let Some(r) = &completeness {
        for c in r.per_query.iter().filter(|c| !c.missing.is_empty()) {
            report.violations.push(format!(
                "certificate for `{}` is not limit-complete: {} item(s) outside the limit domain",
                c.query_id,
                c.missing.len()
            ));
        }
    }
    if source == CertificateSource::Supplied {
        for q in &uncertified {
            report
                .violations
                .push(format!("no certificate supplied for `{q}`"));
        }
    }
    report.certificates = Some(CertificateResult {
        source,
        assignment: assignment.clone(),
        uncertified,
        soundness,
        completeness,
    });
    assignment
}

/// Everything at once: schedule facts, per-query limit feasibility, minimal
/// depth by both routes, NR status, depth-1 diagnosis and coverage gaps, then
/// the class-level uniform depth and certificate checks.
pub fn analyze(sc: &ValidatedScenario, command: CommandEcho, exec: Exec) -> AnalysisReport {
    let s = &sc.schedule;
    let mut report = AnalysisReport::new(command, s);
    let results = par::map(exec, sc.class.queries(), |q| {
        let nr = check_nr(q, s);
        QueryResult {
            id: q.id().to_owned(),
            feasible_at: None,
            limit: Some(is_feasible_limit(q, s)),
            min_depth: Some(min_depth(q, s)),
            nr: Some(nr),
            diagnosis: Some(diagnose(q, s, Depth::ONE)),
            coverage_gap_depths: Some(coverage_gap_depths(q, s)),
        }
    });
    for r in &results {
        if let Some(note) = r.nr.as_ref().and_then(|n| n.violation_note.clone()) {
            report.violations.push(note);
        }
        if let Some(m) = &r.min_depth {
            if m.constructive_applicable && m.constructive != m.scan {
                report.violations.push(format!(
                    "query `{}`: constructive depth {:?} disagrees with scan {:?}",
                    r.id, m.constructive, m.scan
                ));
            }
        }
    }
    report.queries = results;
    uniform(sc, &mut report);
    certify(sc, &mut report);
    report
}

/// Full analysis of many scenarios. The fan-out is across scenarios; each
/// scenario is analyzed sequentially inside its worker.
pub fn analyze_many(scenarios: &[ValidatedScenario], exec: Exec) -> Vec<AnalysisReport> {
    par::map(exec, scenarios, |sc| {
        analyze(
            sc,
            CommandEcho {
                name: "analyze".into(),
                args: Vec::new(),
            },
            Exec::Sequential,
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn echo() -> CommandEcho {
        CommandEcho {
            name: "test".into(),
            args: vec![],
        }
    }

    #[test]
    fn prop1_full_analysis_reports_violations() {
        let r = analyze(&fixtures::prop1(), echo(), Exec::Sequential);
        assert!(!r.holds());
        assert!(!r.schedule.monotone);
        assert!(!r.queries[0].nr.as_ref().unwrap().nr_holds);
        assert!(matches!(&r.class, Some(ClassResult::Uniform(u)) if u.uniform_depth.is_none()));
    }

    #[test]
    fn prop2_and_prop3_hold() {
        let r = analyze(&fixtures::prop2(6), echo(), Exec::Parallel);
        assert!(r.holds(), "{:?}", r.violations);
        match &r.class {
            Some(ClassResult::Uniform(u)) => {
                assert_eq!(u.uniform_depth, Depth::new(6));
                assert_eq!(u.certificate_depth, Depth::new(6));
            }
            other => panic!("{other:?}"),
        }
        let r = analyze(&fixtures::prop3(), echo(), Exec::Sequential);
        assert!(r.holds(), "{:?}", r.violations);
        assert_eq!(r.queries[0].coverage_gap_depths, Some(vec![Depth::ONE]));
    }

    #[test]
    fn parallel_and_sequential_reports_agree() {
        let scs: Vec<_> = (0..24)
            .map(|seed| {
                let kind = crate::random::ScheduleKind::ALL[seed as usize % 4];
                crate::random::random_scenario(seed, &crate::random::RandomParams::with_kind(kind))
                    .unwrap()
            })
            .collect();
        assert_eq!(
            analyze_many(&scs, Exec::Sequential),
            analyze_many(&scs, Exec::Parallel)
        );
    }

    #[test]
    fn certify_flags_bad_supplied_certificate() {
        let mut sc = fixtures::prop2(3);
        sc.certificates
            .as_mut()
            .unwrap()
            .insert("q2".into(), crate::evidence::item_set(["e1"]));
        let mut r = AnalysisReport::new(echo(), &sc.schedule);
        certify(&sc, &mut r);
        assert!(!r.holds());
        assert!(r.violations[0].contains("q2"));
    }
}
