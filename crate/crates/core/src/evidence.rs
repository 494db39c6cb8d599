//! Evidence items, queries, witnesses and whole-scenario validation.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certificate::CertificateAssignment;
use crate::document::{QueryDoc, ScenarioDocument, ScheduleDoc, TailDoc};
use crate::schedule::{Schedule, Tail};

/// Opaque, case-sensitive identifier of an atomic evidence item.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EvidenceItem(String);

impl EvidenceItem {
    pub fn new(id: impl Into<String>) -> Self {
        EvidenceItem(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EvidenceItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for EvidenceItem {
    fn from(s: &str) -> Self {
        EvidenceItem::new(s)
    }
}

/// Sets of evidence items are ordered by id so that every report is byte-stable.
pub type ItemSet = BTreeSet<EvidenceItem>;

/// One slot assignment, positionally aligned with a query's slots.
pub type Tuple = Vec<EvidenceItem>;

/// Builds an [`ItemSet`] from string ids.
pub fn item_set<I, S>(ids: I) -> ItemSet
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    ids.into_iter()
        .map(|s| EvidenceItem::new(s.as_ref()))
        .collect()
}

/// Builds a [`Tuple`] from string ids.
pub fn tuple<I, S>(ids: I) -> Tuple
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    ids.into_iter()
        .map(|s| EvidenceItem::new(s.as_ref()))
        .collect()
}

/// The finite ground set of evidence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    items: ItemSet,
}

impl Universe {
    pub fn new<I: IntoIterator<Item = EvidenceItem>>(ids: I) -> Result<Self, ValidationError> {
        let mut items = ItemSet::new();
        for id in ids {
            if id.as_str().is_empty() {
                return Err(ValidationError::EmptyItemId);
            }
            if !items.insert(id.clone()) {
                return Err(ValidationError::DuplicateItem { item: id.0 });
            }
        }
        if items.is_empty() {
            return Err(ValidationError::EmptyUniverse);
        }
        Ok(Universe { items })
    }

    pub fn items(&self) -> &ItemSet {
        &self.items
    }

    pub fn contains(&self, item: &EvidenceItem) -> bool {
        self.items.contains(item)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    fn require(&self, item: &EvidenceItem, context: &str) -> Result<(), ValidationError> {
        if self.contains(item) {
            Ok(())
        } else {
            Err(ValidationError::UnknownItem {
                item: item.0.clone(),
                context: context.to_owned(),
            })
        }
    }
}

/// A positional requirement of a query. The name is a cosmetic label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub name: String,
    pub admissible: ItemSet,
}

impl Slot {
    pub fn new(name: impl Into<String>, admissible: ItemSet) -> Self {
        Slot {
            name: name.into(),
            admissible,
        }
    }
}

/// A finite constraint-satisfaction instance: slots, admissible sets and an
/// explicit compatibility relation over them.
///
/// The relation is kept as an ordered set of tuples; that order (lexicographic
/// by component id) is the canonical order used for witness selection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    id: String,
    slots: Vec<Slot>,
    relation: BTreeSet<Tuple>,
}

impl Query {
    /// Checks the structural invariants that do not need a universe:
    /// at least one slot, and every tuple inside the product of admissible sets.
    pub fn new(
        id: impl Into<String>,
        slots: Vec<Slot>,
        relation: impl IntoIterator<Item = Tuple>,
    ) -> Result<Self, ValidationError> {
        let id = id.into();
        if slots.is_empty() {
            return Err(ValidationError::EmptySlotList { query: id });
        }
        let mut rel = BTreeSet::new();
        for t in relation {
            if t.len() != slots.len() {
                return Err(ValidationError::ArityMismatch {
                    query: id,
                    expected: slots.len(),
                    found: t.len(),
                });
            }
            if let Some((pos, item)) = t
                .iter()
                .enumerate()
                .find(|(i, item)| !slots[*i].admissible.contains(*item))
            {
                return Err(ValidationError::TupleOutsideAdmissible {
                    query: id,
                    slot: pos,
                    item: item.0.clone(),
                });
            }
            rel.insert(t);
        }
        Ok(Query {
            id,
            slots,
            relation: rel,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    /// Number of slots, always at least one.
    pub fn arity(&self) -> usize {
        self.slots.len()
    }

    /// Relation tuples in canonical order.
    pub fn relation(&self) -> &BTreeSet<Tuple> {
        &self.relation
    }

    pub fn contains_tuple(&self, t: &[EvidenceItem]) -> bool {
        self.relation.contains(t)
    }
}

/// A relation tuple together with the query it answers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub query_id: String,
    pub assignment: Tuple,
}

impl Witness {
    /// The set of items the witness uses.
    pub fn items(&self) -> ItemSet {
        self.assignment.iter().cloned().collect()
    }
}

/// A non-empty, ordered class of queries with unique ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryClass {
    queries: Vec<Query>,
}

impl QueryClass {
    pub fn new(queries: Vec<Query>) -> Result<Self, ValidationError> {
        if queries.is_empty() {
            return Err(ValidationError::EmptyQueryClass);
        }
        let mut seen = HashSet::new();
        for q in &queries {
            if !seen.insert(q.id()) {
                return Err(ValidationError::DuplicateQueryId {
                    query: q.id().to_owned(),
                });
            }
        }
        Ok(QueryClass { queries })
    }

    pub fn queries(&self) -> &[Query] {
        &self.queries
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Query> {
        self.queries.iter().find(|q| q.id() == id)
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.queries.iter().position(|q| q.id() == id)
    }

    /// Class restricted to the queries accepted by `keep`, or `None` if nothing remains.
    pub fn filtered(&self, mut keep: impl FnMut(&Query) -> bool) -> Option<QueryClass> {
        let queries: Vec<Query> = self.queries.iter().filter(|q| keep(q)).cloned().collect();
        if queries.is_empty() {
            None
        } else {
            Some(QueryClass { queries })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("duplicate evidence item `{item}`")]
    DuplicateItem { item: String },
    #[error("unknown evidence item `{item}` referenced in {context}")]
    UnknownItem { item: String, context: String },
    #[error("query `{query}`: relation tuple has {found} components, expected {expected}")]
    ArityMismatch {
        query: String,
        expected: usize,
        found: usize,
    },
    #[error("query `{query}`: tuple component `{item}` is not admissible for slot {slot}")]
    TupleOutsideAdmissible {
        query: String,
        slot: usize,
        item: String,
    },
    #[error("universe is empty")]
    EmptyUniverse,
    #[error("query `{query}` has no slots")]
    EmptySlotList { query: String },
    #[error("evidence item ids must be non-empty")]
    EmptyItemId,
    #[error("explicit schedule has no steps")]
    EmptySteps,
    #[error("scenario has no queries")]
    EmptyQueryClass,
    #[error("duplicate query id `{query}`")]
    DuplicateQueryId { query: String },
    #[error("certificate given for unknown query `{query}`")]
    UnknownCertificateQuery { query: String },
}

/// A scenario whose universe, schedule, query class and optional certificates
/// satisfy every structural invariant. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidatedScenario {
    pub universe: Universe,
    pub schedule: Schedule,
    pub class: QueryClass,
    /// User-supplied certificates. These are structurally valid (known items,
    /// known queries) but not yet checked for soundness or completeness.
    pub certificates: Option<BTreeMap<String, ItemSet>>,
}

impl ValidatedScenario {
    /// Assembles and validates a scenario from already-built parts.
    pub fn new(
        universe: Universe,
        schedule: Schedule,
        class: QueryClass,
        certificates: Option<BTreeMap<String, ItemSet>>,
    ) -> Result<Self, ValidationError> {
        check_schedule(&universe, &schedule)?;
        for q in class.queries() {
            for (i, slot) in q.slots().iter().enumerate() {
                for item in &slot.admissible {
                    universe.require(item, &format!("query `{}` slot {i}", q.id()))?;
                }
            }
        }
        if let Some(certs) = &certificates {
            for (qid, items) in certs {
                if class.get(qid).is_none() {
                    return Err(ValidationError::UnknownCertificateQuery { query: qid.clone() });
                }
                for item in items {
                    universe.require(item, &format!("certificate for `{qid}`"))?;
                }
            }
        }
        Ok(ValidatedScenario {
            universe,
            schedule,
            class,
            certificates,
        })
    }

    /// Supplied certificates as an assignment, if they cover the whole class.
    pub fn certificate_assignment(&self) -> Option<CertificateAssignment> {
        let certs = self.certificates.as_ref()?;
        CertificateAssignment::from_map(&self.class, certs.clone()).ok()
    }

    /// Converts back to the serialized document form.
    pub fn to_document(&self) -> ScenarioDocument {
        let ids = |set: &ItemSet| set.iter().map(|i| i.0.clone()).collect::<Vec<_>>();
        let schedule = match &self.schedule {
            Schedule::Cumulative { order } => ScheduleDoc::Cumulative {
                order: order.iter().map(|i| i.0.clone()).collect(),
            },
            Schedule::Explicit { steps, tail } => ScheduleDoc::Explicit {
                steps: steps.iter().map(ids).collect(),
                tail: match tail {
                    Tail::RepeatLast => TailDoc::RepeatLast,
                    Tail::Cycle => TailDoc::Cycle,
                },
            },
        };
        let queries = self
            .class
            .queries()
            .iter()
            .map(|q| QueryDoc {
                id: q.id().to_owned(),
                slots: q
                    .slots()
                    .iter()
                    .map(|s| crate::document::SlotDoc {
                        name: s.name.clone(),
                        admissible: ids(&s.admissible),
                    })
                    .collect(),
                relation: q
                    .relation()
                    .iter()
                    .map(|t| t.iter().map(|i| i.0.clone()).collect())
                    .collect(),
            })
            .collect();
        ScenarioDocument {
            universe: ids(self.universe.items()),
            schedule,
            queries,
            certificates: self
                .certificates
                .as_ref()
                .map(|c| c.iter().map(|(k, v)| (k.clone(), ids(v))).collect()),
        }
    }
}

fn check_schedule(universe: &Universe, schedule: &Schedule) -> Result<(), ValidationError> {
    match schedule {
        Schedule::Cumulative { order } => {
            let mut seen = HashSet::new();
            for item in order {
                universe.require(item, "cumulative schedule")?;
                if !seen.insert(item) {
                    return Err(ValidationError::DuplicateItem {
                        item: item.0.clone(),
                    });
                }
            }
        }
        Schedule::Explicit { steps, .. } => {
            if steps.is_empty() {
                return Err(ValidationError::EmptySteps);
            }
            for (k, step) in steps.iter().enumerate() {
                for item in step {
                    universe.require(item, &format!("schedule step {}", k + 1))?;
                }
            }
        }
    }
    Ok(())
}

/// Validates a parsed scenario document. Total: malformed input yields an
/// error, never a panic.
pub fn validate_scenario(raw: &ScenarioDocument) -> Result<ValidatedScenario, ValidationError> {
    let universe = Universe::new(raw.universe.iter().map(|s| EvidenceItem::new(s.as_str())))?;
    let schedule = match &raw.schedule {
        ScheduleDoc::Cumulative { order } => Schedule::Cumulative {
            order: order
                .iter()
                .map(|s| EvidenceItem::new(s.as_str()))
                .collect(),
        },
        ScheduleDoc::Explicit { steps, tail } => Schedule::Explicit {
            steps: steps.iter().map(item_set).collect(),
            tail: match tail {
                TailDoc::RepeatLast => Tail::RepeatLast,
                TailDoc::Cycle => Tail::Cycle,
            },
        },
    };
    let mut queries = Vec::with_capacity(raw.queries.len());
    for qd in &raw.queries {
        let slots: Vec<Slot> = qd
            .slots
            .iter()
            .map(|s| Slot::new(s.name.clone(), item_set(&s.admissible)))
            .collect();
        // Unknown ids are reported before containment so a typo in a tuple
        // surfaces as UnknownItem rather than TupleOutsideAdmissible.
        for t in &qd.relation {
            for id in t {
                universe.require(
                    &EvidenceItem::new(id.as_str()),
                    &format!("relation of query `{}`", qd.id),
                )?;
            }
        }
        queries.push(Query::new(
            qd.id.clone(),
            slots,
            qd.relation.iter().map(tuple),
        )?);
    }
    let class = QueryClass::new(queries)?;
    let certificates = raw
        .certificates
        .as_ref()
        .map(|c| c.iter().map(|(k, v)| (k.clone(), item_set(v))).collect());
    ValidatedScenario::new(universe, schedule, class, certificates)
}
