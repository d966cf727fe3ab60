//! Text and JSON renderers for the subcommand reports. JSON output has
//! sorted keys and fixed field names; text output is line-oriented.

use std::collections::BTreeMap;

use serde_json::json;

use morpho_core::evolution::ChangeSet;
use morpho_core::model::{AltId, GroupId, Model, Priority, Violation};
use morpho_core::selection::BudgetSelection;
use morpho_core::synthesis::TreeComposition;

fn to_pretty(value: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    text
}

pub fn validation(violations: &[Violation], json: bool) -> String {
    if json {
        let entries: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return to_pretty(&json!({ "valid": violations.is_empty(), "violations": entries }));
    }
    if violations.is_empty() {
        "model is valid\n".to_string()
    } else {
        let mut out = String::new();
        for violation in violations {
            out.push_str(&format!("violation: {violation}\n"));
        }
        out
    }
}

pub fn change_set(changes: &ChangeSet, json: bool) -> String {
    if json {
        return to_pretty(&serde_json::to_value(changes).expect("change set serializes"));
    }
    let mut out = format!(
        "changes from generation {} to generation {}: {} operation(s)\n",
        changes.from_generation,
        changes.to_generation,
        changes.operations.len()
    );
    for op in &changes.operations {
        out.push_str(&format!("  {op}\n"));
    }
    out
}

pub fn rankings(rankings: &[(GroupId, BTreeMap<AltId, Priority>)], json: bool) -> String {
    if json {
        let groups: BTreeMap<String, BTreeMap<String, u8>> = rankings
            .iter()
            .map(|(group, assigned)| {
                let inner =
                    assigned.iter().map(|(id, p)| (id.to_string(), p.get())).collect();
                (group.to_string(), inner)
            })
            .collect();
        return to_pretty(&json!({ "groups": groups }));
    }
    let mut out = String::new();
    for (group, assigned) in rankings {
        out.push_str(&format!("group {group}\n"));
        for (id, priority) in assigned {
            out.push_str(&format!("  {id} -> {priority}\n"));
        }
    }
    out
}

pub fn compositions(result: &[TreeComposition], model: &Model, json: bool) -> String {
    if json {
        return to_pretty(&json!({
            "compositions": serde_json::to_value(result).expect("compositions serialize"),
        }));
    }
    let mut out = format!("{} Pareto-efficient composition(s)\n", result.len());
    for (i, tc) in result.iter().enumerate() {
        out.push_str(&format!("\ncomposition {}: quality {}\n", i + 1, tc.quality));
        for (group, alt) in &tc.composition.selection {
            out.push_str(&format!("  {group} -> {alt}\n"));
        }
        out.push_str("  node quality:");
        for node in model.tree.preorder() {
            if let Some(quality) = tc.node_quality.get(&node.id) {
                out.push_str(&format!(" {} {}", node.id, quality));
            }
        }
        out.push('\n');
    }
    out
}

pub fn selection(selection: &BudgetSelection, json: bool) -> String {
    if json {
        return to_pretty(&serde_json::to_value(selection).expect("selection serializes"));
    }
    let mut out = format!(
        "selected {} item(s): cost {}, profit {}\n",
        selection.chosen.len(),
        selection.total_cost,
        selection.total_profit
    );
    for id in &selection.chosen {
        out.push_str(&format!("  {id}\n"));
    }
    out
}
