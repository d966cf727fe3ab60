//! Exact budgeted selection of change items.
//!
//! Two routes: a 0/1 knapsack over a flat list of change items, and a
//! multiple-choice knapsack that picks exactly one alternative per group.
//! Costs are mapped onto an integer grid by an explicit quantization factor
//! and solved by dynamic programming; results are bit-for-bit deterministic.
//!
//! Ties are broken by lower total cost, then by alternative ids: the
//! knapsack returns the lexicographically smallest sorted id list, the
//! multiple-choice solver the smallest per-group choice sequence in group-id
//! order.

use serde::{Deserialize, Serialize};

use crate::decimal::Decimal;
use crate::model::{AlternativeGroup, GroupId};

/// A flat 0/1 item: select it or not.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KnapsackItem {
    pub id: String,
    pub cost: Decimal,
    pub profit: Decimal,
}

impl KnapsackItem {
    pub fn new(id: impl Into<String>, cost: &str, profit: &str) -> KnapsackItem {
        KnapsackItem {
            id: id.into(),
            cost: cost.parse().expect("valid decimal cost"),
            profit: profit.parse().expect("valid decimal profit"),
        }
    }
}

/// Result of a budgeted selection.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BudgetSelection {
    /// Chosen item/alternative ids, sorted.
    pub chosen: Vec<String>,
    pub total_cost: Decimal,
    pub total_profit: Decimal,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SelectionError {
    #[error("quantization scale must be at least 1")]
    ZeroScale,
    #[error("budget {0} is negative")]
    NegativeBudget(Decimal),
    #[error("item `{id}` has a negative cost")]
    NegativeCost { id: String },
    #[error("item `{id}` has a negative profit")]
    NegativeProfit { id: String },
    #[error("cost {cost} of `{id}` is not an integer multiple of 1/{scale}")]
    NonIntegralCost { id: String, cost: Decimal, scale: u32 },
    #[error("group `{group}` has no alternatives")]
    EmptyGroup { group: GroupId },
    #[error("budget is infeasible: picking one alternative per group costs at least {minimal_cost}")]
    Infeasible { minimal_cost: Decimal },
}

/// Best `(profit, weight)` reachable from a DP state; profit maximal, then
/// weight minimal.
type State = (Decimal, i64);

fn better(a: State, b: State) -> State {
    if a.0 > b.0 || (a.0 == b.0 && a.1 < b.1) {
        a
    } else {
        b
    }
}

fn check_common(budget: Decimal, scale: u32) -> Result<(), SelectionError> {
    if scale == 0 {
        return Err(SelectionError::ZeroScale);
    }
    if budget.is_negative() {
        return Err(SelectionError::NegativeBudget(budget));
    }
    Ok(())
}

fn weight_of(id: &str, cost: Decimal, profit: Decimal, scale: u32) -> Result<i64, SelectionError> {
    if cost.is_negative() {
        return Err(SelectionError::NegativeCost { id: id.to_string() });
    }
    if profit.is_negative() {
        return Err(SelectionError::NegativeProfit { id: id.to_string() });
    }
    cost.quantize(scale)
        .ok_or(SelectionError::NonIntegralCost { id: id.to_string(), cost, scale })
}

/// Profit-maximal subset of `items` with total cost within `budget`.
///
/// Exact: costs are quantized by `scale` (an error names any item whose cost
/// does not fit the grid) and the table is solved over integer capacities.
pub fn knapsack01(
    items: &[KnapsackItem],
    budget: Decimal,
    scale: u32,
) -> Result<BudgetSelection, SelectionError> {
    check_common(budget, scale)?;
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| items[a].id.cmp(&items[b].id));

    let mut weights = Vec::with_capacity(items.len());
    for &i in &order {
        let item = &items[i];
        weights.push(weight_of(&item.id, item.cost, item.profit, scale)?);
    }

    let total_weight: i64 = weights.iter().sum();
    let cap = budget.quantize_floor(scale).min(total_weight).max(0) as usize;
    let n = items.len();

    // suffix[i][c]: best state over items i.. with capacity c.
    let mut suffix = vec![vec![(Decimal::ZERO, 0i64); cap + 1]; n + 1];
    for i in (0..n).rev() {
        let w = weights[i];
        let profit = items[order[i]].profit;
        for c in 0..=cap {
            let mut best = suffix[i + 1][c];
            if w <= c as i64 {
                let after = suffix[i + 1][c - w as usize];
                best = better((after.0 + profit, after.1 + w), best);
            }
            suffix[i][c] = best;
        }
    }

    // Walk items in id order, preferring to stop, then to take. This yields
    // the lexicographically smallest sorted id list among the optima.
    let (mut need_profit, mut need_weight) = suffix[0][cap];
    let mut capacity = cap;
    let mut chosen = Vec::new();
    let mut total_cost = Decimal::ZERO;
    for i in 0..n {
        if need_profit.is_zero() && need_weight == 0 {
            break;
        }
        let w = weights[i];
        let item = &items[order[i]];
        if w <= capacity as i64 {
            let after = suffix[i + 1][capacity - w as usize];
            if after.0 + item.profit == need_profit && after.1 + w == need_weight {
                chosen.push(item.id.clone());
                total_cost += item.cost;
                capacity -= w as usize;
                need_profit = after.0;
                need_weight = after.1;
            }
        }
    }
    debug_assert!(need_profit.is_zero() && need_weight == 0);

    Ok(BudgetSelection { chosen, total_cost, total_profit: suffix[0][cap].0 })
}

/// Profit-maximal choice of exactly one alternative per group with total
/// cost within `budget`; exact DP with the same quantization as
/// [`knapsack01`]. Groups without a zero-cost alternative are effectively
/// mandatory spend, and a budget below the cheapest one-per-group total is
/// reported as infeasible.
pub fn mckp_select(
    groups: &[AlternativeGroup],
    budget: Decimal,
    scale: u32,
) -> Result<BudgetSelection, SelectionError> {
    check_common(budget, scale)?;

    let mut group_order: Vec<usize> = (0..groups.len()).collect();
    group_order.sort_by(|&a, &b| groups[a].id.cmp(&groups[b].id));

    // Options per group in alternative-id order, with quantized weights.
    let mut options: Vec<Vec<(usize, i64)>> = Vec::with_capacity(groups.len());
    for &g in &group_order {
        let group = &groups[g];
        if group.alternatives.is_empty() {
            return Err(SelectionError::EmptyGroup { group: group.id.clone() });
        }
        let mut opts = Vec::with_capacity(group.alternatives.len());
        for (k, alt) in group.alternatives.iter().enumerate() {
            opts.push((k, weight_of(alt.id.as_str(), alt.cost, alt.profit, scale)?));
        }
        opts.sort_by(|a, b| group.alternatives[a.0].id.cmp(&group.alternatives[b.0].id));
        options.push(opts);
    }

    let widest: i64 = options
        .iter()
        .map(|opts| opts.iter().map(|&(_, w)| w).max().unwrap_or(0))
        .sum();
    let cap = budget.quantize_floor(scale).min(widest).max(0) as usize;
    let m = groups.len();

    // suffix[g][c]: best state picking one option from each group g..;
    // `None` marks capacities where no choice fits.
    let mut suffix: Vec<Vec<Option<State>>> = vec![vec![None; cap + 1]; m + 1];
    suffix[m] = vec![Some((Decimal::ZERO, 0)); cap + 1];
    for g in (0..m).rev() {
        let group = &groups[group_order[g]];
        for c in 0..=cap {
            let mut best: Option<State> = None;
            for &(k, w) in &options[g] {
                if w > c as i64 {
                    continue;
                }
                if let Some(after) = suffix[g + 1][c - w as usize] {
                    let cand = (after.0 + group.alternatives[k].profit, after.1 + w);
                    best = Some(match best {
                        None => cand,
                        Some(prev) => better(cand, prev),
                    });
                }
            }
            suffix[g][c] = best;
        }
    }

    let Some((mut need_profit, mut need_weight)) = suffix[0][cap] else {
        let minimal_cost = groups
            .iter()
            .map(|g| g.alternatives.iter().map(|a| a.cost).min().unwrap_or(Decimal::ZERO))
            .sum();
        return Err(SelectionError::Infeasible { minimal_cost });
    };

    // Per group, in group-id order, take the first alternative (in id order)
    // that still completes the optimum.
    let mut capacity = cap;
    let mut chosen = Vec::with_capacity(m);
    let mut total_cost = Decimal::ZERO;
    for g in 0..m {
        let group = &groups[group_order[g]];
        let pick = options[g].iter().find(|&&(k, w)| {
            w <= capacity as i64
                && suffix[g + 1][capacity - w as usize].is_some_and(|after| {
                    after.0 + group.alternatives[k].profit == need_profit
                        && after.1 + w == need_weight
                })
        });
        let &(k, w) = pick.expect("a reachable DP state has a completing option");
        let alt = &group.alternatives[k];
        chosen.push(alt.id.to_string());
        total_cost += alt.cost;
        capacity -= w as usize;
        let after = suffix[g + 1][capacity].expect("completing state exists");
        need_profit = after.0;
        need_weight = after.1;
    }
    debug_assert!(need_profit.is_zero() && need_weight == 0);

    chosen.sort();
    Ok(BudgetSelection { chosen, total_cost, total_profit: suffix[0][cap].expect("checked").0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Alternative;
    use crate::sample;

    fn dec(s: &str) -> Decimal {
        s.parse().unwrap()
    }

    /// Recorded cost/profit estimates of the first generation step.
    fn first_step_items() -> Vec<KnapsackItem> {
        vec![
            KnapsackItem::new("J", "1.5", "1.5"),
            KnapsackItem::new("R", "2.0", "2.5"),
            KnapsackItem::new("T", "2.2", "3.0"),
            KnapsackItem::new("Q", "1.6", "2.0"),
            KnapsackItem::new("W", "1.5", "1.4"),
            KnapsackItem::new("V", "2.0", "2.1"),
            KnapsackItem::new("E", "1.4", "1.7"),
            KnapsackItem::new("M", "1.9", "1.5"),
            KnapsackItem::new("L", "1.8", "1.5"),
            KnapsackItem::new("U", "2.0", "1.6"),
        ]
    }

    #[test]
    fn knapsack_on_recorded_items() {
        // Optimum verified by exhaustive search over all 2^10 subsets.
        let result = knapsack01(&first_step_items(), dec("5.0"), 10).unwrap();
        assert_eq!(result.chosen, vec!["E", "Q", "R"]);
        assert_eq!(result.total_cost, dec("5.0"));
        assert_eq!(result.total_profit, dec("6.2"));

        let result = knapsack01(&first_step_items(), dec("4.2"), 10).unwrap();
        assert_eq!(result.chosen, vec!["R", "T"]);
        assert_eq!(result.total_cost, dec("4.2"));
        assert_eq!(result.total_profit, dec("5.5"));
    }

    #[test]
    fn knapsack_zero_budget_and_singleton() {
        let result = knapsack01(&first_step_items(), Decimal::ZERO, 10).unwrap();
        assert!(result.chosen.is_empty());
        assert_eq!(result.total_profit, Decimal::ZERO);

        let one = vec![KnapsackItem::new("x", "2.0", "1.0")];
        let result = knapsack01(&one, dec("2.0"), 10).unwrap();
        assert_eq!(result.chosen, vec!["x"]);
    }

    #[test]
    fn knapsack_rejects_off_grid_costs() {
        let items = vec![KnapsackItem::new("x", "2.25", "1.0")];
        let err = knapsack01(&items, dec("5.0"), 10).unwrap_err();
        assert_eq!(
            err,
            SelectionError::NonIntegralCost { id: "x".into(), cost: dec("2.25"), scale: 10 }
        );
        assert!(knapsack01(&items, dec("5.0"), 100).is_ok());
    }

    #[test]
    fn knapsack_prefers_cheaper_then_smaller_ids() {
        let items = vec![
            KnapsackItem::new("b", "2.0", "1.0"),
            KnapsackItem::new("a", "1.0", "1.0"),
            KnapsackItem::new("c", "1.0", "1.0"),
        ];
        let result = knapsack01(&items, dec("1.5"), 10).unwrap();
        assert_eq!(result.chosen, vec!["a"]);
    }

    #[test]
    fn mckp_on_the_sample_groups() {
        // Optima verified by exhaustive search over all 216 combinations.
        let model = sample::network_requirements();
        let result = mckp_select(&model.groups, dec("9.0"), 10).unwrap();
        assert_eq!(result.chosen, vec!["A1", "Bh2", "Bt1", "Db3", "Dh3", "Dt3"]);
        assert_eq!(result.total_cost, dec("8.8"));
        assert_eq!(result.total_profit, dec("14.0"));

        let result = mckp_select(&model.groups, dec("100"), 10).unwrap();
        assert_eq!(result.chosen, vec!["A2", "Bh2", "Bt2", "Db3", "Dh3", "Dt3"]);
        assert_eq!(result.total_cost, dec("12.2"));
        assert_eq!(result.total_profit, dec("17.7"));
    }

    #[test]
    fn mckp_all_none_groups() {
        let groups = vec![
            AlternativeGroup::new("G1", "S", vec![Alternative::none("n1", None)]),
            AlternativeGroup::new("G2", "S", vec![Alternative::none("n2", None)]),
        ];
        let result = mckp_select(&groups, Decimal::ZERO, 10).unwrap();
        assert_eq!(result.chosen, vec!["n1", "n2"]);
        assert_eq!(result.total_profit, Decimal::ZERO);
    }

    #[test]
    fn mckp_reports_minimal_mandatory_cost() {
        let groups = vec![
            AlternativeGroup::new(
                "G1",
                "S",
                vec![
                    Alternative::transition("a", "T", 1, 2, "2.0", "1.0", None),
                    Alternative::transition("b", "T", 1, 3, "3.0", "2.0", None),
                ],
            ),
            AlternativeGroup::new(
                "G2",
                "S",
                vec![Alternative::transition("c", "Q", 1, 2, "1.5", "1.0", None)],
            ),
        ];
        let err = mckp_select(&groups, dec("3.0"), 10).unwrap_err();
        assert_eq!(err, SelectionError::Infeasible { minimal_cost: dec("3.5") });
        let ok = mckp_select(&groups, dec("3.5"), 10).unwrap();
        assert_eq!(ok.chosen, vec!["a", "c"]);
    }

    #[test]
    fn scale_invariance() {
        let model = sample::network_requirements();
        let a = mckp_select(&model.groups, dec("9.0"), 10).unwrap();
        let b = mckp_select(&model.groups, dec("9.0"), 1000).unwrap();
        assert_eq!(a, b);
    }
}
