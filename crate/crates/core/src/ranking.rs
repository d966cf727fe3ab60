//! Ordinal priorities for the alternatives of a group.
//!
//! The synthesis stage consumes priorities in `[1, r]` (1 = best). They
//! either come straight from expert judgment (the explicit strategy) or are
//! derived from the cost/profit estimates.

use std::collections::BTreeMap;

use crate::decimal::Decimal;
use crate::model::{AltId, AlternativeGroup, Priority};

/// How priorities are assigned within a group.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RankingStrategy {
    /// "None" alternatives are pinned to the worst priority `r`; the rest are
    /// ranked by descending profit (competition ranking, capped at `r`).
    /// This is the default.
    ProfitDesc,
    /// Priority is the Pareto layer of `(cost, profit)`, capped at `r`.
    ParetoLayer,
    /// Pass stored expert priorities through, range-checked. The map must
    /// cover every alternative of the group.
    Explicit(BTreeMap<AltId, Priority>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RankingError {
    #[error("priority scale must be at least 1")]
    ZeroScale,
    #[error("explicit priority map does not cover alternative `{alternative}`")]
    IncompleteAssignment { alternative: AltId },
    #[error("priority {priority} for `{alternative}` is outside [1, {scale}]")]
    PriorityOutOfRange { alternative: AltId, priority: Priority, scale: u8 },
}

/// Layers items by repeated removal of the non-dominated front; layer 1 is
/// the front itself. `dominates` must be a strict partial order.
pub(crate) fn dominance_layers<T>(items: &[T], dominates: impl Fn(&T, &T) -> bool) -> Vec<usize> {
    let mut layer = vec![0usize; items.len()];
    let mut current = 1;
    let mut remaining = items.len();
    while remaining > 0 {
        let front: Vec<usize> = (0..items.len())
            .filter(|&i| layer[i] == 0)
            .filter(|&i| {
                (0..items.len())
                    .filter(|&j| layer[j] == 0 && j != i)
                    .all(|j| !dominates(&items[j], &items[i]))
            })
            .collect();
        for &i in &front {
            layer[i] = current;
        }
        remaining -= front.len();
        current += 1;
    }
    layer
}

/// Pareto layers of `(cost, profit)` points, minimizing cost and maximizing
/// profit. Layer 1 is the non-dominated front.
pub fn pareto_layers(items: &[(Decimal, Decimal)]) -> Vec<usize> {
    dominance_layers(items, |a, b| {
        a.0 <= b.0 && a.1 >= b.1 && (a.0 < b.0 || a.1 > b.1)
    })
}

/// Assigns a priority in `[1, r]` to every alternative of `group`.
pub fn assign_priorities(
    group: &AlternativeGroup,
    strategy: &RankingStrategy,
    r: u8,
) -> Result<BTreeMap<AltId, Priority>, RankingError> {
    if r == 0 {
        return Err(RankingError::ZeroScale);
    }
    let cap = |value: usize| {
        Priority::new(value.min(r as usize) as u8).expect("capped priority is in [1, r]")
    };

    match strategy {
        RankingStrategy::ProfitDesc => {
            let worst = cap(r as usize);
            let mut out = BTreeMap::new();
            let ranked: Vec<&crate::model::Alternative> =
                group.alternatives.iter().filter(|a| !a.action.is_none()).collect();
            for alt in &group.alternatives {
                if alt.action.is_none() {
                    out.insert(alt.id.clone(), worst);
                } else {
                    let ahead = ranked.iter().filter(|o| o.profit > alt.profit).count();
                    out.insert(alt.id.clone(), cap(ahead + 1));
                }
            }
            Ok(out)
        }
        RankingStrategy::ParetoLayer => {
            let points: Vec<(Decimal, Decimal)> =
                group.alternatives.iter().map(|a| (a.cost, a.profit)).collect();
            let layers = pareto_layers(&points);
            Ok(group
                .alternatives
                .iter()
                .zip(layers)
                .map(|(alt, layer)| (alt.id.clone(), cap(layer)))
                .collect())
        }
        RankingStrategy::Explicit(map) => {
            let mut out = BTreeMap::new();
            for alt in &group.alternatives {
                let priority = *map.get(&alt.id).ok_or_else(|| {
                    RankingError::IncompleteAssignment { alternative: alt.id.clone() }
                })?;
                if priority.get() > r {
                    return Err(RankingError::PriorityOutOfRange {
                        alternative: alt.id.clone(),
                        priority,
                        scale: r,
                    });
                }
                out.insert(alt.id.clone(), priority);
            }
            Ok(out)
        }
    }
}
