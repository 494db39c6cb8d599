//! Feasibility at finite depth and in the limit, minimal feasible depth,
//! Noetherian-retrieval checks and slotwise-coverage diagnosis.
//!
//! Feasibility is decided by a linear scan of the explicit relation with early
//! exit on the first contained tuple, O(|R_q| * m_q) set lookups. The scan
//! visits tuples in canonical order, so the reported witness is deterministic.

use serde::Serialize;
use thiserror::Error;

use crate::evidence::{ItemSet, Query, Tuple, Witness};
use crate::schedule::{Depth, Schedule};

/// Upper bound on the admissible-product size the brute-force oracle accepts.
pub const DEFAULT_PRODUCT_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeasibilityError {
    #[error("slot index {index} out of range for query with {arity} slots")]
    SlotIndexOutOfRange { index: usize, arity: usize },
    #[error("admissible product of {size} tuples exceeds cap {cap}")]
    ProductTooLarge { size: u128, cap: u128 },
    #[error("the constructive depth bound requires a monotone schedule")]
    NonMonotoneSchedule,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeasibilityOutcome {
    pub feasible: bool,
    pub witness: Option<Witness>,
}

impl FeasibilityOutcome {
    fn from_tuple(q: &Query, t: Option<&Tuple>) -> Self {
        FeasibilityOutcome {
            feasible: t.is_some(),
            witness: t.map(|t| Witness {
                query_id: q.id().to_owned(),
                assignment: t.clone(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NrReport {
    pub query_id: String,
    pub limit_feasible: bool,
    pub first_feasible_depth: Option<Depth>,
    pub nr_holds: bool,
    pub violation_note: Option<String>,
}

/// A relation tuple that is not contained in the evaluated domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockedTuple {
    pub tuple: Tuple,
    pub missing: ItemSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnosis {
    pub query_id: String,
    pub depth: Depth,
    /// `|A_i(q) ∩ D(k)|` per slot.
    pub slot_coverage: Vec<usize>,
    pub all_slots_covered: bool,
    pub feasible: bool,
    /// Every relation tuple with the items it is missing; empty when feasible.
    pub blocking: Vec<BlockedTuple>,
    /// Every slot has a candidate but no tuple is jointly available.
    pub coverage_gap: bool,
}

/// `D_i(q,k) = A_i(q) ∩ D(k)`. Slots are indexed from zero.
pub fn slot_domain(
    q: &Query,
    s: &Schedule,
    k: Depth,
    slot: usize,
) -> Result<ItemSet, FeasibilityError> {
    let admissible = &q
        .slots()
        .get(slot)
        .ok_or(FeasibilityError::SlotIndexOutOfRange {
            index: slot,
            arity: q.arity(),
        })?
        .admissible;
    Ok(admissible.intersection(&s.domain_at(k)).cloned().collect())
}

fn first_contained<'q>(q: &'q Query, domain: &ItemSet) -> Option<&'q Tuple> {
    q.relation().iter().find(|t| {
        t.iter()
            .enumerate()
            .all(|(i, item)| domain.contains(item) && q.slots()[i].admissible.contains(item))
    })
}

/// Feasibility against an arbitrary evidence set.
pub fn is_feasible_in(q: &Query, domain: &ItemSet) -> FeasibilityOutcome {
    FeasibilityOutcome::from_tuple(q, first_contained(q, domain))
}

/// `Feas(q, k)`.
pub fn is_feasible_at(q: &Query, s: &Schedule, k: Depth) -> FeasibilityOutcome {
    is_feasible_in(q, &s.domain_at(k))
}

/// `Feas(q, ∞)`.
pub fn is_feasible_limit(q: &Query, s: &Schedule) -> FeasibilityOutcome {
    is_feasible_in(q, &s.limit_domain())
}

/// All witnesses inside `domain`, in canonical relation order.
pub fn enumerate_witnesses(q: &Query, domain: &ItemSet) -> Vec<Witness> {
    q.relation()
        .iter()
        .filter(|t| t.iter().all(|item| domain.contains(item)))
        .map(|t| Witness {
            query_id: q.id().to_owned(),
            assignment: t.clone(),
        })
        .collect()
}

/// Smallest `K` with `Feas(q, K)`, found by scanning depths up to the
/// effective horizon. `None` means no finite depth works.
pub fn min_feasible_depth(q: &Query, s: &Schedule) -> Option<Depth> {
    Depth::up_to(s.effective_horizon()).find(|&k| first_contained(q, &s.domain_at(k)).is_some())
}

/// Depth at which tuple `t` is fully available on a monotone schedule:
/// the latest first appearance among its components.
pub(crate) fn tuple_ready_depth(
    s: &Schedule,
    t: &[crate::evidence::EvidenceItem],
) -> Option<Depth> {
    t.iter()
        .map(|item| s.first_depth(item))
        .try_fold(Depth::ONE, |acc, d| d.map(|d| acc.max(d)))
}

/// Constructive route for monotone schedules: minimum over relation tuples of
/// the maximum first appearance of their components. Must agree with
/// [`min_feasible_depth`].
pub fn constructive_min_depth(q: &Query, s: &Schedule) -> Result<Option<Depth>, FeasibilityError> {
    if !s.is_monotone().monotone {
        return Err(FeasibilityError::NonMonotoneSchedule);
    }
    Ok(q.relation()
        .iter()
        .filter_map(|t| tuple_ready_depth(s, t))
        .min())
}

/// Noetherian retrieval for one query: limit feasibility implies feasibility
/// at some finite depth.
pub fn check_nr(q: &Query, s: &Schedule) -> NrReport {
    let limit_feasible = is_feasible_limit(q, s).feasible;
    let first = if limit_feasible {
        min_feasible_depth(q, s)
    } else {
        None
    };
    let nr_holds = !limit_feasible || first.is_some();
    let violation_note = (!nr_holds).then(|| {
        format!(
            "query `{}` is feasible in the limit but infeasible at every depth 1..={} \
             (and beyond, since the schedule repeats)",
            q.id(),
            s.effective_horizon()
        )
    });
    NrReport {
        query_id: q.id().to_owned(),
        limit_feasible,
        first_feasible_depth: first,
        nr_holds,
        violation_note,
    }
}

/// Independent oracle: enumerates the full product of `A_i(q) ∩ domain` and
/// tests relation membership.
pub fn brute_force_feasible(q: &Query, domain: &ItemSet) -> Result<bool, FeasibilityError> {
    brute_force_feasible_with_cap(q, domain, DEFAULT_PRODUCT_CAP)
}

pub fn brute_force_feasible_with_cap(
    q: &Query,
    domain: &ItemSet,
    cap: u128,
) -> Result<bool, FeasibilityError> {
    let size = q
        .slots()
        .iter()
        .map(|s| s.admissible.len() as u128)
        .fold(1u128, |a, b| a.saturating_mul(b));
    if size > cap {
        return Err(FeasibilityError::ProductTooLarge { size, cap });
    }
    let axes: Vec<Vec<_>> = q
        .slots()
        .iter()
        .map(|s| s.admissible.intersection(domain).cloned().collect())
        .collect();
    if axes.iter().any(Vec::is_empty) {
        return Ok(false);
    }
    // Odometer over the product.
    let mut idx = vec![0usize; axes.len()];
    let mut candidate: Tuple = axes.iter().map(|a| a[0].clone()).collect();
    loop {
        if q.contains_tuple(&candidate) {
            return Ok(true);
        }
        let mut pos = axes.len();
        loop {
            if pos == 0 {
                return Ok(false);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < axes[pos].len() {
                candidate[pos] = axes[pos][idx[pos]].clone();
                break;
            }
            idx[pos] = 0;
            candidate[pos] = axes[pos][0].clone();
        }
    }
}

/// Per-slot coverage versus joint feasibility at depth `k`.
pub fn diagnose(q: &Query, s: &Schedule, k: Depth) -> Diagnosis {
    let domain = s.domain_at(k);
    let slot_coverage: Vec<usize> = q
        .slots()
        .iter()
        .map(|slot| slot.admissible.intersection(&domain).count())
        .collect();
    let all_slots_covered = slot_coverage.iter().all(|&c| c >= 1);
    let feasible = first_contained(q, &domain).is_some();
    let blocking = if feasible {
        Vec::new()
    } else {
        q.relation()
            .iter()
            .map(|t| BlockedTuple {
                tuple: t.clone(),
                missing: t.iter().filter(|i| !domain.contains(*i)).cloned().collect(),
            })
            .collect()
    };
    Diagnosis {
        query_id: q.id().to_owned(),
        depth: k,
        slot_coverage,
        all_slots_covered,
        feasible,
        blocking,
        coverage_gap: all_slots_covered && !feasible,
    }
}
