//! Witness certificates, their soundness and limit-completeness checks, the
//! basis of a query class, and uniform retrieval depths.
//!
//! The default certificate for a query is the component set of one canonical
//! limit witness. Any assignment that is sound and limit-complete is equally
//! acceptable; user-supplied assignments are validated, never trusted.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::evidence::{ItemSet, Query, QueryClass};
use crate::feasibility::{enumerate_witnesses, is_feasible_in, tuple_ready_depth};
use crate::par::{self, Exec};
use crate::schedule::{Depth, Schedule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("query `{query}` is infeasible in the limit; no certificate exists")]
    InfeasibleInLimit { query: String },
    #[error("query `{query}` is infeasible in the limit; uniform retrieval is undefined")]
    NotAllLimitFeasible { query: String },
    #[error("no certificate given for query `{query}`")]
    MissingCertificate { query: String },
    #[error("certificate given for unknown query `{query}`")]
    UnknownQuery { query: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessCertificate {
    pub query_id: String,
    pub items: ItemSet,
}

/// Exactly one certificate per query of a class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct CertificateAssignment {
    certs: BTreeMap<String, ItemSet>,
}

impl CertificateAssignment {
    pub fn from_map(
        class: &QueryClass,
        certs: BTreeMap<String, ItemSet>,
    ) -> Result<Self, CertificateError> {
        for q in class.queries() {
            if !certs.contains_key(q.id()) {
                return Err(CertificateError::MissingCertificate {
                    query: q.id().to_owned(),
                });
            }
        }
        if let Some(extra) = certs.keys().find(|k| class.get(k).is_none()) {
            return Err(CertificateError::UnknownQuery {
                query: extra.clone(),
            });
        }
        Ok(CertificateAssignment { certs })
    }

    pub fn from_certificates(
        class: &QueryClass,
        certs: impl IntoIterator<Item = WitnessCertificate>,
    ) -> Result<Self, CertificateError> {
        Self::from_map(
            class,
            certs.into_iter().map(|c| (c.query_id, c.items)).collect(),
        )
    }

    pub fn get(&self, query_id: &str) -> Option<&ItemSet> {
        self.certs.get(query_id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &ItemSet)> {
        self.certs.iter()
    }

    pub fn as_map(&self) -> &BTreeMap<String, ItemSet> {
        &self.certs
    }
}

/// Certificate for `q`: the items of a canonical limit witness. On a monotone
/// schedule the witness that becomes available earliest is preferred (ties by
/// canonical relation order); otherwise the first in canonical order.
pub fn extract_certificate(
    q: &Query,
    s: &Schedule,
) -> Result<WitnessCertificate, CertificateError> {
    let witnesses = enumerate_witnesses(q, &s.limit_domain());
    let chosen = if s.is_monotone().monotone {
        // min_by_key keeps the first of equal keys, i.e. canonical order.
        witnesses
            .into_iter()
            .min_by_key(|w| tuple_ready_depth(s, &w.assignment))
    } else {
        witnesses.into_iter().next()
    };
    chosen
        .map(|w| WitnessCertificate {
            query_id: q.id().to_owned(),
            items: w.items(),
        })
        .ok_or_else(|| CertificateError::InfeasibleInLimit {
            query: q.id().to_owned(),
        })
}

/// Extracted certificates for every query of the class.
pub fn extract_assignment(
    class: &QueryClass,
    s: &Schedule,
) -> Result<CertificateAssignment, CertificateError> {
    let certs = par::map(Exec::default(), class.queries(), |q| {
        extract_certificate(q, s)
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    CertificateAssignment::from_certificates(class, certs)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuerySoundness {
    pub query_id: String,
    /// First depth where the certificate is available but the query is not feasible.
    pub counterexample: Option<Depth>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SoundnessReport {
    pub sound: bool,
    pub per_query: Vec<QuerySoundness>,
}

impl SoundnessReport {
    /// First `(query, depth)` counterexample in class order.
    pub fn first_counterexample(&self) -> Option<(&str, Depth)> {
        self.per_query
            .iter()
            .find_map(|r| r.counterexample.map(|k| (r.query_id.as_str(), k)))
    }
}

/// Checks `WC(q) ⊆ D(k) ⇒ Feas(q,k)` for every query and every depth up to
/// the effective horizon, which covers all depths since the schedule repeats.
pub fn check_soundness(
    assign: &CertificateAssignment,
    class: &QueryClass,
    s: &Schedule,
) -> SoundnessReport {
    let domains: Vec<ItemSet> = Depth::up_to(s.effective_horizon())
        .map(|k| s.domain_at(k))
        .collect();
    let per_query = par::map(Exec::default(), class.queries(), |q| {
        let cert = assign.get(q.id());
        let counterexample = domains.iter().enumerate().find_map(|(i, dom)| {
            let available = cert.is_some_and(|c| c.is_subset(dom));
            (available && !is_feasible_in(q, dom).feasible).then(|| Depth::new(i + 1).unwrap())
        });
        QuerySoundness {
            query_id: q.id().to_owned(),
            counterexample,
        }
    });
    SoundnessReport {
        sound: per_query.iter().all(|r| r.counterexample.is_none()),
        per_query,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryCompleteness {
    pub query_id: String,
    pub limit_feasible: bool,
    /// Certificate items outside `D(∞)`; non-empty only for limit-feasible queries.
    pub missing: ItemSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompletenessReport {
    pub limit_complete: bool,
    pub per_query: Vec<QueryCompleteness>,
}

/// Checks `Feas(q,∞) ⇒ WC(q) ⊆ D(∞)` for every query.
pub fn check_limit_completeness(
    assign: &CertificateAssignment,
    class: &QueryClass,
    s: &Schedule,
) -> CompletenessReport {
    let limit = s.limit_domain();
    let per_query: Vec<QueryCompleteness> = class
        .queries()
        .iter()
        .map(|q| {
            let limit_feasible = is_feasible_in(q, &limit).feasible;
            let missing = match (limit_feasible, assign.get(q.id())) {
                (true, Some(c)) => c.difference(&limit).cloned().collect(),
                _ => ItemSet::new(),
            };
            QueryCompleteness {
                query_id: q.id().to_owned(),
                limit_feasible,
                missing,
            }
        })
        .collect();
    CompletenessReport {
        limit_complete: per_query.iter().all(|r| r.missing.is_empty()),
        per_query,
    }
}

/// `B(Q)`, the union of all certificates.
pub fn basis(assign: &CertificateAssignment) -> ItemSet {
    assign.certs.values().flatten().cloned().collect()
}

/// Whether every certificate lies inside the generator set `g`.
pub fn is_finitely_generated(assign: &CertificateAssignment, g: &ItemSet) -> bool {
    assign.certs.values().all(|c| c.is_subset(g))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UniformMethod {
    Certificate,
    Scan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateSource {
    /// Components of a canonical limit witness, chosen by this tool.
    Extracted,
    Supplied,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniformReport {
    pub method: UniformMethod,
    /// Smallest depth at which every query is feasible (scan result).
    pub uniform_depth: Option<Depth>,
    /// Latest first appearance over the basis, when the certificate route applies.
    pub certificate_depth: Option<Depth>,
    /// Every query was re-checked feasible at `certificate_depth`.
    pub certificate_verified: bool,
    pub certificate_source: CertificateSource,
    pub certificates_sound: bool,
    pub certificates_limit_complete: bool,
    pub basis: ItemSet,
    pub finitely_generated_within: Option<ItemSet>,
    /// Set when no uniform depth exists: the smallest-index query that is
    /// infeasible at every candidate depth, or failing that, the
    /// smallest-index query blocking the last candidate.
    pub violating_query: Option<String>,
    /// For each candidate depth `1..=H` with no uniform depth, the smallest-index blocker.
    pub blockers: Vec<String>,
}

/// Uniform depth for a query class, by exhaustive scan and, on monotone
/// schedules with a validated assignment, by the certificate bound.
pub fn uniform_depth(
    class: &QueryClass,
    s: &Schedule,
    assign: Option<&CertificateAssignment>,
) -> Result<UniformReport, CertificateError> {
    let limit = s.limit_domain();
    let limit_ok = par::map(Exec::default(), class.queries(), |q| {
        is_feasible_in(q, &limit).feasible
    });
    if let Some(pos) = limit_ok.iter().position(|ok| !ok) {
        return Err(CertificateError::NotAllLimitFeasible {
            query: class.queries()[pos].id().to_owned(),
        });
    }

    let (assignment, source) = match assign {
        Some(a) => (a.clone(), CertificateSource::Supplied),
        None => (extract_assignment(class, s)?, CertificateSource::Extracted),
    };
    let sound = check_soundness(&assignment, class, s).sound;
    let complete = check_limit_completeness(&assignment, class, s).limit_complete;
    let basis_set = basis(&assignment);

    // feasible[q][k-1] = Feas(q, k) for k in 1..=H.
    let domains: Vec<ItemSet> = Depth::up_to(s.effective_horizon())
        .map(|k| s.domain_at(k))
        .collect();
    let feasible: Vec<Vec<bool>> = par::map(Exec::default(), class.queries(), |q| {
        domains
            .iter()
            .map(|d| is_feasible_in(q, d).feasible)
            .collect()
    });
    let all_at = |k: usize| feasible.iter().all(|row| row[k]);
    let scan = (0..domains.len()).find(|&k| all_at(k));
    let uniform = scan.map(|k| Depth::new(k + 1).unwrap());

    let (violating_query, blockers) = if uniform.is_some() {
        (None, Vec::new())
    } else {
        let blockers: Vec<String> = (0..domains.len())
            .map(|k| {
                let pos = feasible.iter().position(|row| !row[k]).unwrap();
                class.queries()[pos].id().to_owned()
            })
            .collect();
        let always_blocked = feasible.iter().position(|row| row.iter().all(|f| !f));
        let violating = match always_blocked {
            Some(pos) => class.queries()[pos].id().to_owned(),
            None => blockers.last().cloned().unwrap(),
        };
        (Some(violating), blockers)
    };

    let certificate_route = s.is_monotone().monotone && sound && complete;
    let (certificate_depth, certificate_verified) = if certificate_route {
        let k = basis_set
            .iter()
            .map(|item| s.first_depth(item))
            .try_fold(Depth::ONE, |acc, d| d.map(|d| acc.max(d)));
        match k {
            Some(k) => {
                let dom = s.domain_at(k);
                let verified = class
                    .queries()
                    .iter()
                    .all(|q| is_feasible_in(q, &dom).feasible);
                (Some(k), verified)
            }
            None => (None, false),
        }
    } else {
        (None, false)
    };

    Ok(UniformReport {
        method: if certificate_depth.is_some() {
            UniformMethod::Certificate
        } else {
            UniformMethod::Scan
        },
        uniform_depth: uniform,
        certificate_depth,
        certificate_verified,
        certificate_source: source,
        certificates_sound: sound,
        certificates_limit_complete: complete,
        finitely_generated_within: certificate_depth.map(|_| basis_set.clone()),
        basis: basis_set,
        violating_query,
        blockers,
    })
}
