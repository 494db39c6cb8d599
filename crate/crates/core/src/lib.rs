//! Feasibility preservation analysis for truncation-based retrieval.
//!
//! Queries are finite constraint-satisfaction instances over a universe of
//! evidence items. Retrieval is a depth-indexed family of candidate sets
//! `D(k)`. The crate decides whether a query that is feasible against the
//! union of all candidates is also feasible at some finite depth, per query
//! and uniformly over a class, and produces certificates and counterexample
//! diagnostics for both questions.
//!
//! Batch work fans out through [`par`]; the `parallel` feature (default)
//! backs it with rayon.

pub mod analysis;
pub mod certificate;
pub mod document;
pub mod evidence;
pub mod feasibility;
pub mod fixtures;
pub mod par;
pub mod random;
pub mod schedule;

pub use document::{parse_scenario, serialize_scenario, DocumentError, ScenarioDocument};
pub use evidence::{
    validate_scenario, EvidenceItem, ItemSet, Query, QueryClass, Slot, Tuple, Universe,
    ValidatedScenario, ValidationError, Witness,
};
pub use par::Exec;
pub use schedule::{Depth, Schedule, Tail};
