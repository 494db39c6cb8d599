//! Scenario file format.
//!
//! ```json
//! {
//!   "universe": ["a", "b"],
//!   "schedule": {"kind": "explicit", "steps": [["a"], ["b"]], "tail": "cycle"},
//!   "queries": [
//!     {"id": "q", "slots": [{"name": "x", "admissible": ["a"]}, {"name": "y", "admissible": ["b"]}],
//!      "relation": [["a", "b"]]}
//!   ],
//!   "certificates": {"q": ["a", "b"]}
//! }
//! ```
//!
//! Parsing is strict: unknown keys are rejected. Serialization is canonical:
//! fixed key order, sets emitted in lexicographic order, two-space indent,
//! trailing newline. A cumulative `order` and the query list keep their order
//! because position is meaningful there.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub universe: Vec<String>,
    pub schedule: ScheduleDoc,
    pub queries: Vec<QueryDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificates: Option<BTreeMap<String, Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleDoc {
    Cumulative {
        order: Vec<String>,
    },
    Explicit {
        steps: Vec<Vec<String>>,
        tail: TailDoc,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailDoc {
    RepeatLast,
    Cycle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryDoc {
    pub id: String,
    pub slots: Vec<SlotDoc>,
    pub relation: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlotDoc {
    pub name: String,
    pub admissible: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at line {line}, column {column}: {message}")]
    Schema {
        line: usize,
        column: usize,
        message: String,
    },
}

impl From<serde_json::Error> for DocumentError {
    fn from(e: serde_json::Error) -> Self {
        let (line, column) = (e.line(), e.column());
        // serde_json's Display appends the position; keep only the message.
        let full = e.to_string();
        let message = full
            .rsplit_once(" at line ")
            .map(|(m, _)| m.to_owned())
            .unwrap_or(full);
        match e.classify() {
            serde_json::error::Category::Data => DocumentError::Schema {
                line,
                column,
                message,
            },
            _ => DocumentError::Parse {
                line,
                column,
                message,
            },
        }
    }
}

pub fn parse_scenario(text: &str) -> Result<ScenarioDocument, DocumentError> {
    Ok(serde_json::from_str(text)?)
}

impl ScenarioDocument {
    /// Sorts every set-valued field; order-carrying lists are left alone.
    pub fn canonicalized(&self) -> ScenarioDocument {
        let sorted = |v: &Vec<String>| {
            let mut v = v.clone();
            v.sort();
            v
        };
        let mut doc = self.clone();
        doc.universe.sort();
        if let ScheduleDoc::Explicit { steps, .. } = &mut doc.schedule {
            for step in steps.iter_mut() {
                step.sort();
            }
        }
        for q in &mut doc.queries {
            for s in &mut q.slots {
                s.admissible = sorted(&s.admissible);
            }
            q.relation.sort();
        }
        if let Some(certs) = &mut doc.certificates {
            for items in certs.values_mut() {
                items.sort();
            }
        }
        doc
    }
}

/// Canonical text form of a document.
pub fn serialize_scenario(doc: &ScenarioDocument) -> String {
    let mut out = serde_json::to_string_pretty(&doc.canonicalized())
        .expect("scenario documents always serialize");
    out.push('\n');
    out
}
