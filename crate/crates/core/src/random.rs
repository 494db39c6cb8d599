//! Seeded random scenarios for property suites and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::evidence::{
    EvidenceItem, ItemSet, Query, QueryClass, Slot, Tuple, Universe, ValidatedScenario,
};
use crate::schedule::{Schedule, Tail};

pub const MAX_UNIVERSE: usize = 16;
pub const MAX_SLOTS: usize = 4;
pub const MAX_QUERIES: usize = 8;
const MAX_ADMISSIBLE: usize = 5;
const MAX_STEPS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    /// Ranked list over a random subset of the universe.
    Cumulative,
    /// Explicit, repeat-last, each step a superset of the previous one.
    Ascending,
    /// Explicit, repeat-last, steps drawn independently.
    Stabilizing,
    /// Explicit, cyclic, steps drawn independently.
    Cycle,
}

impl ScheduleKind {
    pub const ALL: [ScheduleKind; 4] = [
        ScheduleKind::Cumulative,
        ScheduleKind::Ascending,
        ScheduleKind::Stabilizing,
        ScheduleKind::Cycle,
    ];

    /// Kinds that always produce monotone schedules.
    pub const MONOTONE: [ScheduleKind; 2] = [ScheduleKind::Cumulative, ScheduleKind::Ascending];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RandomParams {
    pub universe_size: usize,
    /// Upper bound on slots per query; each query draws its arity in `1..=slots`.
    pub slots: usize,
    pub queries: usize,
    /// Probability that a tuple of the admissible product joins the relation.
    pub relation_density: f64,
    pub schedule_kind: ScheduleKind,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            universe_size: 10,
            slots: 3,
            queries: 4,
            relation_density: 0.3,
            schedule_kind: ScheduleKind::Cumulative,
        }
    }
}

impl RandomParams {
    pub fn with_kind(kind: ScheduleKind) -> Self {
        RandomParams {
            schedule_kind: kind,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RandomError {
    #[error("parameter `{name}` out of range: {detail}")]
    ParamsOutOfRange { name: &'static str, detail: String },
}

fn check_range(name: &'static str, v: usize, max: usize) -> Result<(), RandomError> {
    if (1..=max).contains(&v) {
        Ok(())
    } else {
        Err(RandomError::ParamsOutOfRange {
            name,
            detail: format!("{v} not in 1..={max}"),
        })
    }
}

/// Deterministic for a fixed seed and parameter set. The output always
/// validates, and every admissible product stays far below the oracle cap.
pub fn random_scenario(seed: u64, params: &RandomParams) -> Result<ValidatedScenario, RandomError> {
    check_range("universe_size", params.universe_size, MAX_UNIVERSE)?;
    check_range("slots", params.slots, MAX_SLOTS)?;
    check_range("queries", params.queries, MAX_QUERIES)?;
    if !(0.0..=1.0).contains(&params.relation_density) {
        return Err(RandomError::ParamsOutOfRange {
            name: "relation_density",
            detail: format!("{} not in [0, 1]", params.relation_density),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let items: Vec<EvidenceItem> = (0..params.universe_size)
        .map(|i| EvidenceItem::new(format!("u{i:02}")))
        .collect();

    let queries = (0..params.queries)
        .map(|qi| random_query(&mut rng, qi, &items, params))
        .collect();
    let schedule = random_schedule(&mut rng, &items, params.schedule_kind);

    let universe = Universe::new(items).expect("generated ids are unique");
    let class = QueryClass::new(queries).expect("generated query ids are unique");
    Ok(ValidatedScenario::new(universe, schedule, class, None)
        .expect("generated scenarios validate"))
}

fn random_query(
    rng: &mut ChaCha8Rng,
    index: usize,
    items: &[EvidenceItem],
    params: &RandomParams,
) -> Query {
    let arity = rng.gen_range(1..=params.slots);
    let slots: Vec<Slot> = (0..arity)
        .map(|i| {
            let admissible: ItemSet = if rng.gen_bool(0.05) {
                ItemSet::new()
            } else {
                let size = rng.gen_range(1..=MAX_ADMISSIBLE.min(items.len()));
                items.choose_multiple(rng, size).cloned().collect()
            };
            Slot::new(format!("s{i}"), admissible)
        })
        .collect();

    let axes: Vec<Vec<EvidenceItem>> = slots
        .iter()
        .map(|s| s.admissible.iter().cloned().collect())
        .collect();
    let mut relation = Vec::new();
    let mut prefix = Tuple::new();
    product_sample(
        rng,
        &axes,
        &mut prefix,
        params.relation_density,
        &mut relation,
    );
    Query::new(format!("q{index}"), slots, relation)
        .expect("relation drawn from admissible product")
}

fn product_sample(
    rng: &mut ChaCha8Rng,
    axes: &[Vec<EvidenceItem>],
    prefix: &mut Tuple,
    density: f64,
    out: &mut Vec<Tuple>,
) {
    if prefix.len() == axes.len() {
        if rng.gen_bool(density) {
            out.push(prefix.clone());
        }
        return;
    }
    for item in &axes[prefix.len()] {
        prefix.push(item.clone());
        product_sample(rng, axes, prefix, density, out);
        prefix.pop();
    }
}

fn random_subset(rng: &mut ChaCha8Rng, items: &[EvidenceItem], p: f64) -> ItemSet {
    items.iter().filter(|_| rng.gen_bool(p)).cloned().collect()
}

fn random_schedule(rng: &mut ChaCha8Rng, items: &[EvidenceItem], kind: ScheduleKind) -> Schedule {
    match kind {
        ScheduleKind::Cumulative => {
            let mut order = items.to_vec();
            order.shuffle(rng);
            let keep = rng.gen_range(items.len() / 2..=items.len());
            order.truncate(keep);
            Schedule::cumulative(order)
        }
        ScheduleKind::Ascending => {
            let h = rng.gen_range(1..=MAX_STEPS);
            let mut acc = ItemSet::new();
            let steps = (0..h)
                .map(|_| {
                    acc.extend(random_subset(rng, items, 0.3));
                    acc.clone()
                })
                .collect();
            Schedule::explicit(steps, Tail::RepeatLast)
        }
        ScheduleKind::Stabilizing | ScheduleKind::Cycle => {
            let h = rng.gen_range(1..=MAX_STEPS);
            let steps = (0..h).map(|_| random_subset(rng, items, 0.5)).collect();
            let tail = if kind == ScheduleKind::Cycle {
                Tail::Cycle
            } else {
                Tail::RepeatLast
            };
            Schedule::explicit(steps, tail)
        }
    }
}
