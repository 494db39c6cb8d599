//! Finitely represented retrieval schedules.
//!
//! A schedule is the depth-indexed family `D(1), D(2), ...` of candidate
//! evidence sets. Three shapes are representable: a cumulative ranked list,
//! a list of steps that stabilizes on its last entry, and a periodic cycle of
//! steps. All of them are fully determined by depths `1..=H` where `H` is the
//! [effective horizon](Schedule::effective_horizon), which is what makes the
//! limit domain and every "exists a finite depth" question decidable.

use std::fmt;
use std::num::NonZeroUsize;

use serde::{Serialize, Serializer};

use crate::evidence::{EvidenceItem, ItemSet};

/// Retrieval depth (budget). Always at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Depth(NonZeroUsize);

impl Depth {
    pub const ONE: Depth = Depth(NonZeroUsize::MIN);

    pub fn new(k: usize) -> Option<Depth> {
        NonZeroUsize::new(k).map(Depth)
    }

    pub fn get(self) -> usize {
        self.0.get()
    }

    /// Depths `1..=h`.
    pub fn up_to(h: Depth) -> impl Iterator<Item = Depth> + Clone {
        (1..=h.get()).map(|k| Depth::new(k).unwrap())
    }

    pub fn next(self) -> Depth {
        Depth(self.0.checked_add(1).expect("depth overflow"))
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for Depth {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(self.get() as u64)
    }
}

/// How an explicit schedule continues past its last listed step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    /// `D(k) = steps[min(k, H)]`.
    RepeatLast,
    /// `D(k) = steps[((k - 1) mod H) + 1]`.
    Cycle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Schedule {
    /// `D(k)` is the first `min(k, |order|)` items of a duplicate-free list.
    Cumulative { order: Vec<EvidenceItem> },
    /// Explicit non-empty list of steps with a continuation rule.
    Explicit { steps: Vec<ItemSet>, tail: Tail },
}

/// First place where `D(k) ⊆ D(k+1)` breaks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonotoneViolation {
    pub depth: Depth,
    /// Smallest id in `D(depth) \ D(depth + 1)`.
    pub dropped: EvidenceItem,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonotonicityReport {
    pub monotone: bool,
    pub violation: Option<MonotoneViolation>,
}

impl Schedule {
    pub fn cumulative<I: IntoIterator<Item = EvidenceItem>>(order: I) -> Self {
        Schedule::Cumulative {
            order: order.into_iter().collect(),
        }
    }

    pub fn explicit(steps: Vec<ItemSet>, tail: Tail) -> Self {
        Schedule::Explicit { steps, tail }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Schedule::Cumulative { .. } => "cumulative",
            Schedule::Explicit {
                tail: Tail::RepeatLast,
                ..
            } => "explicit/repeat_last",
            Schedule::Explicit {
                tail: Tail::Cycle, ..
            } => "explicit/cycle",
        }
    }

    /// The candidate set `D(k)`.
    pub fn domain_at(&self, k: Depth) -> ItemSet {
        match self {
            Schedule::Cumulative { order } => order
                .iter()
                .take(k.get().min(order.len()))
                .cloned()
                .collect(),
            Schedule::Explicit { steps, .. } => steps[self.step_index(k)].clone(),
        }
    }

    /// Zero-based index into `steps` selected by depth `k`.
    fn step_index(&self, k: Depth) -> usize {
        match self {
            Schedule::Cumulative { .. } => unreachable!("cumulative schedules have no steps"),
            Schedule::Explicit { steps, tail } => {
                let h = steps.len();
                match tail {
                    Tail::RepeatLast => k.get().min(h) - 1,
                    Tail::Cycle => (k.get() - 1) % h,
                }
            }
        }
    }

    /// `D(∞)`, the union of `D(k)` over all depths.
    pub fn limit_domain(&self) -> ItemSet {
        match self {
            Schedule::Cumulative { order } => order.iter().cloned().collect(),
            Schedule::Explicit { steps, .. } => steps.iter().flatten().cloned().collect(),
        }
    }

    /// Depth bound after which the family repeats (cycle) or stays constant
    /// (cumulative, repeat-last). Every `D(k)` with `k > H` equals some
    /// `D(k')` with `k' <= H`.
    pub fn effective_horizon(&self) -> Depth {
        let h = match self {
            Schedule::Cumulative { order } => order.len().max(1),
            Schedule::Explicit { steps, .. } => steps.len().max(1),
        };
        Depth::new(h).unwrap()
    }

    /// Decides whether `D(k) ⊆ D(k+1)` for every `k >= 1`.
    pub fn is_monotone(&self) -> MonotonicityReport {
        let (steps, tail) = match self {
            Schedule::Cumulative { .. } => {
                return MonotonicityReport {
                    monotone: true,
                    violation: None,
                }
            }
            Schedule::Explicit { steps, tail } => (steps, *tail),
        };
        let h = steps.len();
        // For a cycle the wrap-around pair (H, 1) is checked too.
        let pairs = match tail {
            Tail::RepeatLast => h.saturating_sub(1),
            Tail::Cycle => h,
        };
        for i in 0..pairs {
            let next = &steps[(i + 1) % h];
            if let Some(dropped) = steps[i].difference(next).next() {
                return MonotonicityReport {
                    monotone: false,
                    violation: Some(MonotoneViolation {
                        depth: Depth::new(i + 1).unwrap(),
                        dropped: dropped.clone(),
                    }),
                };
            }
        }
        MonotonicityReport {
            monotone: true,
            violation: None,
        }
    }

    /// Smallest `k` with `item ∈ D(k)`, or `None` if the item never appears.
    pub fn first_depth(&self, item: &EvidenceItem) -> Option<Depth> {
        match self {
            Schedule::Cumulative { order } => order
                .iter()
                .position(|x| x == item)
                .and_then(|p| Depth::new(p + 1)),
            Schedule::Explicit { steps, .. } => steps
                .iter()
                .position(|s| s.contains(item))
                .and_then(|p| Depth::new(p + 1)),
        }
    }

    /// Prefix-union repair: `D'(k) = ∪_{j<=k} D(j)` as a repeat-last schedule
    /// over the effective horizon.
    pub fn monotone_closure(&self) -> Schedule {
        let mut acc = ItemSet::new();
        let steps = Depth::up_to(self.effective_horizon())
            .map(|k| {
                acc.extend(self.domain_at(k));
                acc.clone()
            })
            .collect();
        Schedule::Explicit {
            steps,
            tail: Tail::RepeatLast,
        }
    }
}
