//! Brute-force oracles and random instance generators shared by the
//! acceptance and property suites.
//!
//! The oracles deliberately re-implement lookup, scoring, dominance and
//! tie-breaking from scratch (plain enumeration, integer arithmetic) so they
//! share no code path with the implementations they check.

use std::collections::BTreeMap;

use morpho_core::decimal::Decimal;
use morpho_core::model::{
    AltId, Alternative, AlternativeAction, AlternativeGroup, CompatibilityTable, Priority,
};
use morpho_core::selection::KnapsackItem;
use morpho_core::synthesis::{Composition, QualityVector};

use rand::rngs::StdRng;
use rand::Rng;

/// A scored selection as the oracle sees it: group-to-alternative names plus
/// the raw (w, counts) quality.
pub type OracleEntry = (BTreeMap<String, String>, (u8, Vec<u32>));

/// An integer-tenths MCKP instance: options per group plus a budget.
pub type MckpInstance = (Vec<Vec<(String, i64, i64)>>, i64);

// ---------------------------------------------------------------------------
// Synthesis oracle: enumerate, score, filter.

/// Scores every assignment (one alternative index per group) from first
/// principles and filters by pairwise dominance. Returns the Pareto set as
/// (selection, (w, counts)) with the selection keyed by group id.
pub fn pareto_oracle(
    groups: &[AlternativeGroup],
    compat: &CompatibilityTable,
    priorities: &BTreeMap<AltId, Priority>,
    r: u8,
) -> Vec<OracleEntry> {
    // Own view of the table: an unordered-pair map plus the default.
    let mut table: BTreeMap<(String, String), u8> = BTreeMap::new();
    for entry in &compat.entries {
        let (a, b) = (entry.a.to_string(), entry.b.to_string());
        let key = if a <= b { (a, b) } else { (b, a) };
        table.entry(key).or_insert(entry.value.get());
    }
    let lookup = |a: &str, b: &str| -> u8 {
        let key = if a <= b {
            (a.to_string(), b.to_string())
        } else {
            (b.to_string(), a.to_string())
        };
        table.get(&key).copied().unwrap_or(compat.default.get())
    };

    let sizes: Vec<usize> = groups.iter().map(|g| g.alternatives.len()).collect();
    let total: usize = sizes.iter().product();

    let mut scored = Vec::new();
    for code in 0..total {
        // Decode a mixed-radix index into one pick per group.
        let mut rest = code;
        let picks: Vec<usize> = sizes
            .iter()
            .map(|&size| {
                let p = rest % size;
                rest /= size;
                p
            })
            .collect();

        let ids: Vec<&str> = picks
            .iter()
            .zip(groups)
            .map(|(&p, g)| g.alternatives[p].id.as_str())
            .collect();
        let mut w = 3u8;
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                w = w.min(lookup(ids[i], ids[j]));
            }
        }
        if w == 0 {
            continue;
        }
        let mut counts = vec![0u32; r as usize];
        for id in &ids {
            counts[priorities[&AltId::new(*id)].get() as usize - 1] += 1;
        }
        let selection: BTreeMap<String, String> = groups
            .iter()
            .zip(&picks)
            .map(|(g, &p)| (g.id.to_string(), g.alternatives[p].id.to_string()))
            .collect();
        scored.push((selection, (w, counts)));
    }

    let mut pareto: Vec<_> = scored
        .iter()
        .filter(|(_, q)| !scored.iter().any(|(_, other)| oracle_dominates(other, q)))
        .cloned()
        .collect();
    pareto.sort();
    pareto
}

/// Strict dominance on (w, counts): at least as good on w and on every
/// cumulative count prefix, strictly better somewhere.
pub fn oracle_dominates(a: &(u8, Vec<u32>), b: &(u8, Vec<u32>)) -> bool {
    if a.0 < b.0 {
        return false;
    }
    let mut strict = a.0 > b.0;
    let (mut cum_a, mut cum_b) = (0u64, 0u64);
    for (x, y) in a.1.iter().zip(&b.1) {
        cum_a += u64::from(*x);
        cum_b += u64::from(*y);
        if cum_a < cum_b {
            return false;
        }
        if cum_a > cum_b {
            strict = true;
        }
    }
    strict
}

/// Normalizes an implementation Pareto set for comparison with the oracle.
pub fn flatten_pareto(result: &[(Composition, QualityVector)]) -> Vec<OracleEntry> {
    let mut out: Vec<_> = result
        .iter()
        .map(|(c, q)| {
            let selection: BTreeMap<String, String> = c
                .selection
                .iter()
                .map(|(g, a)| (g.to_string(), a.to_string()))
                .collect();
            (selection, (q.w.get(), q.counts.clone()))
        })
        .collect();
    out.sort();
    out
}

/// Random instance for the synthesis oracle: up to `max_groups` groups of up
/// to `max_alts` alternatives, all cross-pair compatibilities drawn from
/// [0, 3] and priorities from [1, r].
pub fn random_synthesis_instance(
    rng: &mut StdRng,
    max_groups: usize,
    max_alts: usize,
    r: u8,
) -> (Vec<AlternativeGroup>, CompatibilityTable, BTreeMap<AltId, Priority>) {
    let n_groups = rng.random_range(1..=max_groups);
    let mut groups = Vec::new();
    let mut priorities = BTreeMap::new();
    for g in 0..n_groups {
        let n_alts = rng.random_range(1..=max_alts);
        let alternatives: Vec<Alternative> = (0..n_alts)
            .map(|a| Alternative::none(format!("g{g}a{a}"), None))
            .collect();
        for alt in &alternatives {
            priorities.insert(
                alt.id.clone(),
                Priority::new(rng.random_range(1..=r)).unwrap(),
            );
        }
        groups.push(AlternativeGroup::new(format!("g{g}"), "root", alternatives));
    }
    let mut compat = CompatibilityTable::new(3);
    for i in 0..groups.len() {
        for j in i + 1..groups.len() {
            for a in &groups[i].alternatives {
                for b in &groups[j].alternatives {
                    compat.insert(a.id.clone(), b.id.clone(), rng.random_range(0..=3));
                }
            }
        }
    }
    (groups, compat, priorities)
}

// ---------------------------------------------------------------------------
// Knapsack oracles over integer tenths.

/// Optimal subset by exhaustive search: maximal profit, then minimal cost,
/// then the lexicographically smallest sorted id list. Costs and profits are
/// exact tenths.
pub fn knapsack_oracle(
    items: &[(String, i64, i64)],
    budget_tenths: i64,
) -> (i64, i64, Vec<String>) {
    let n = items.len();
    let mut best_mask = 0u32;
    let mut best = (0i64, 0i64); // empty subset
    for mask in 0u32..(1 << n) {
        let mut cost = 0i64;
        let mut profit = 0i64;
        for (i, item) in items.iter().enumerate() {
            if mask & (1 << i) != 0 {
                cost += item.1;
                profit += item.2;
            }
        }
        if cost > budget_tenths {
            continue;
        }
        if (profit, -cost) > (best.0, -best.1) {
            best = (profit, cost);
            best_mask = mask;
        } else if (profit, cost) == best && mask_ids(items, mask) < mask_ids(items, best_mask) {
            best_mask = mask;
        }
    }
    (best.0, best.1, mask_ids(items, best_mask))
}

fn mask_ids(items: &[(String, i64, i64)], mask: u32) -> Vec<String> {
    let mut ids: Vec<String> = items
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, item)| item.0.clone())
        .collect();
    ids.sort();
    ids
}

/// Optimal one-per-group choice by exhaustive search; `None` when no
/// combination fits the budget. Ties: profit, cost, then the choice sequence
/// in the given group order.
pub fn mckp_oracle(
    groups: &[Vec<(String, i64, i64)>],
    budget_tenths: i64,
) -> Option<(i64, i64, Vec<String>)> {
    let total: usize = groups.iter().map(Vec::len).product();
    let mut best: Option<(i64, i64, Vec<usize>)> = None;
    for code in 0..total {
        let mut rest = code;
        let mut cost = 0i64;
        let mut profit = 0i64;
        let mut picks = Vec::with_capacity(groups.len());
        for group in groups {
            let pick = rest % group.len();
            rest /= group.len();
            cost += group[pick].1;
            profit += group[pick].2;
            picks.push(pick);
        }
        if cost > budget_tenths {
            continue;
        }
        let ids = |picks: &Vec<usize>| -> Vec<String> {
            picks
                .iter()
                .zip(groups)
                .map(|(&p, g)| g[p].0.clone())
                .collect()
        };
        let replace = match &best {
            None => true,
            Some((bp, bc, bpicks)) => {
                (profit, -cost) > (*bp, -*bc)
                    || ((profit, cost) == (*bp, *bc) && ids(&picks) < ids(bpicks))
            }
        };
        if replace {
            best = Some((profit, cost, picks));
        }
    }
    best.map(|(profit, cost, picks)| {
        let ids = picks
            .iter()
            .zip(groups)
            .map(|(&p, g)| g[p].0.clone())
            .collect();
        (profit, cost, ids)
    })
}

/// Tenths as a [`Decimal`].
pub fn tenths(value: i64) -> Decimal {
    Decimal::new(value, 1)
}

/// Random flat knapsack instance with one-decimal costs/profits.
pub fn random_knapsack_instance(
    rng: &mut StdRng,
    max_items: usize,
) -> (Vec<(String, i64, i64)>, i64) {
    let n = rng.random_range(0..=max_items);
    let items: Vec<(String, i64, i64)> = (0..n)
        .map(|i| (format!("i{i:02}"), rng.random_range(0..=40), rng.random_range(0..=40)))
        .collect();
    let budget = rng.random_range(0..=120);
    (items, budget)
}

/// Random MCKP instance; roughly half the groups get a free first option.
pub fn random_mckp_instance(
    rng: &mut StdRng,
    max_groups: usize,
    max_options: usize,
) -> MckpInstance {
    let n_groups = rng.random_range(1..=max_groups);
    let groups: Vec<Vec<(String, i64, i64)>> = (0..n_groups)
        .map(|g| {
            let n_options = rng.random_range(1..=max_options);
            (0..n_options)
                .map(|o| {
                    let free = o == 0 && rng.random_bool(0.5);
                    let cost = if free { 0 } else { rng.random_range(0..=30) };
                    (format!("g{g}o{o}"), cost, rng.random_range(0..=30))
                })
                .collect()
        })
        .collect();
    let budget = rng.random_range(0..=100);
    (groups, budget)
}

/// Converts an integer-tenths instance into library knapsack items.
pub fn to_knapsack_items(items: &[(String, i64, i64)]) -> Vec<KnapsackItem> {
    items
        .iter()
        .map(|(id, cost, profit)| KnapsackItem {
            id: id.clone(),
            cost: tenths(*cost),
            profit: tenths(*profit),
        })
        .collect()
}

/// Converts an integer-tenths MCKP instance into alternative groups.
pub fn to_groups(groups: &[Vec<(String, i64, i64)>]) -> Vec<AlternativeGroup> {
    groups
        .iter()
        .enumerate()
        .map(|(g, options)| {
            let alternatives = options
                .iter()
                .map(|(id, cost, profit)| Alternative {
                    id: id.as_str().into(),
                    action: AlternativeAction::None,
                    cost: tenths(*cost),
                    profit: tenths(*profit),
                    priority: None,
                })
                .collect();
            AlternativeGroup::new(format!("g{g}"), "root", alternatives)
        })
        .collect()
}
