//! Built-in example model: requirements to a communication-network topology
//! across four system generations, with the prospective improvement groups
//! and compatibility estimates used throughout the tests and docs.
//!
//! Generation history: (1) minimum-cost one-connected network, (2) reliable
//! bi-connected network, (3) survivable network with additional links,
//! (4) multi-layer grid-like environment.

use std::collections::BTreeMap;

use crate::evolution::{Annotation, OperationKey};
use crate::model::{
    Alternative, AlternativeGroup, CompatibilityTable, GenerationSnapshot, Model, RequirementNode,
    RequirementTree,
};

fn tree() -> RequirementTree {
    RequirementTree::new(RequirementNode::composite(
        "S",
        "Network topology requirements",
        vec![
            RequirementNode::composite(
                "A",
                "User requirements",
                vec![
                    RequirementNode::leaf("T", "Time of transmission"),
                    RequirementNode::leaf("Q", "Quality of transmission"),
                    RequirementNode::leaf("W", "Cost of transmission"),
                ],
            ),
            RequirementNode::composite(
                "B",
                "System requirements",
                vec![
                    RequirementNode::composite(
                        "I",
                        "Basic criteria",
                        vec![
                            RequirementNode::leaf("J", "Cost"),
                            RequirementNode::leaf("R", "Reliability"),
                            RequirementNode::leaf("H", "Manageability"),
                            RequirementNode::leaf("V", "Maintainability"),
                            RequirementNode::leaf("E", "Testability"),
                            RequirementNode::leaf("M", "Modularity"),
                        ],
                    ),
                    RequirementNode::composite(
                        "Y",
                        "Dynamic criteria",
                        vec![
                            RequirementNode::leaf("L", "Adaptability"),
                            RequirementNode::leaf("F", "Safety"),
                            RequirementNode::leaf("K", "Flexibility"),
                        ],
                    ),
                ],
            ),
            RequirementNode::leaf("C", "Mobility requirements"),
            RequirementNode::composite(
                "D",
                "Evolution requirements",
                vec![
                    RequirementNode::leaf("U", "Upgradeability"),
                    RequirementNode::leaf("Z", "Closeness to grid"),
                ],
            ),
        ],
    ))
}

fn generations() -> Vec<GenerationSnapshot> {
    vec![
        GenerationSnapshot::new(
            1,
            [("T", 1), ("Q", 1), ("W", 1), ("J", 1), ("R", 1), ("H", 1)],
        ),
        GenerationSnapshot::new(
            2,
            [
                ("T", 2),
                ("Q", 2),
                ("W", 2),
                ("J", 2),
                ("R", 2),
                ("H", 1),
                ("V", 1),
                ("E", 1),
                ("M", 1),
                ("L", 1),
                ("U", 1),
            ],
        ),
        GenerationSnapshot::new(
            3,
            [
                ("T", 2),
                ("Q", 2),
                ("W", 2),
                ("J", 2),
                ("R", 2),
                ("H", 2),
                ("V", 2),
                ("E", 2),
                ("M", 1),
                ("L", 2),
                ("F", 1),
                ("K", 1),
                ("U", 1),
            ],
        ),
        GenerationSnapshot::new(
            4,
            [
                ("T", 2),
                ("Q", 3),
                ("W", 2),
                ("J", 3),
                ("R", 2),
                ("H", 2),
                ("V", 3),
                ("E", 2),
                ("M", 2),
                ("L", 2),
                ("F", 1),
                ("K", 1),
                ("C", 1),
                ("U", 2),
                ("Z", 1),
            ],
        ),
    ]
}

fn groups() -> Vec<AlternativeGroup> {
    vec![
        AlternativeGroup::new(
            "A",
            "A",
            vec![
                Alternative::none("A1", Some(1)),
                Alternative::transition("A2", "W", 2, 3, "1.4", "1.6", Some(2)),
            ],
        ),
        AlternativeGroup::new(
            "Bt",
            "B",
            vec![
                Alternative::none("Bt1", Some(3)),
                Alternative::transition("Bt2", "E", 2, 3, "2.0", "2.1", Some(1)),
            ],
        ),
        AlternativeGroup::new(
            "Bh",
            "B",
            vec![
                Alternative::none("Bh1", Some(3)),
                Alternative::transition("Bh2", "M", 2, 3, "1.6", "1.9", Some(1)),
            ],
        ),
        AlternativeGroup::new(
            "Dt",
            "D",
            vec![
                Alternative::none("Dt1", Some(3)),
                Alternative::transition("Dt2", "F", 1, 2, "1.7", "2.1", Some(2)),
                Alternative::transition("Dt3", "F", 1, 3, "2.1", "3.9", Some(1)),
            ],
        ),
        AlternativeGroup::new(
            "Dh",
            "D",
            vec![
                Alternative::none("Dh1", Some(3)),
                Alternative::transition("Dh2", "K", 1, 2, "1.5", "2.0", Some(2)),
                Alternative::transition("Dh3", "K", 1, 3, "3.0", "4.1", Some(1)),
            ],
        ),
        AlternativeGroup::new(
            "Db",
            "D",
            vec![
                Alternative::none("Db1", Some(3)),
                Alternative::transition("Db2", "Z", 1, 2, "1.6", "2.0", Some(2)),
                Alternative::transition("Db3", "Z", 1, 3, "2.1", "4.1", Some(1)),
            ],
        ),
    ]
}

fn compat() -> CompatibilityTable {
    let mut table = CompatibilityTable::new(3);
    // Bt x Bh
    table.insert("Bt1", "Bh1", 2);
    table.insert("Bt1", "Bh2", 2);
    table.insert("Bt2", "Bh1", 2);
    table.insert("Bt2", "Bh2", 3);
    // Dt x Dh
    table.insert("Dt1", "Dh1", 1);
    table.insert("Dt1", "Dh2", 1);
    table.insert("Dt1", "Dh3", 1);
    table.insert("Dt2", "Dh1", 1);
    table.insert("Dt2", "Dh2", 1);
    table.insert("Dt2", "Dh3", 3);
    table.insert("Dt3", "Dh1", 1);
    table.insert("Dt3", "Dh2", 1);
    table.insert("Dt3", "Dh3", 2);
    // Dt x Db
    table.insert("Dt1", "Db1", 1);
    table.insert("Dt1", "Db2", 1);
    table.insert("Dt1", "Db3", 1);
    table.insert("Dt2", "Db1", 1);
    table.insert("Dt2", "Db2", 1);
    table.insert("Dt2", "Db3", 3);
    table.insert("Dt3", "Db1", 1);
    table.insert("Dt3", "Db2", 1);
    table.insert("Dt3", "Db3", 2);
    // Dh x Db
    table.insert("Dh1", "Db1", 1);
    table.insert("Dh1", "Db2", 1);
    table.insert("Dh1", "Db3", 1);
    table.insert("Dh2", "Db1", 1);
    table.insert("Dh2", "Db2", 1);
    table.insert("Dh2", "Db3", 1);
    table.insert("Dh3", "Db1", 1);
    table.insert("Dh3", "Db2", 1);
    table.insert("Dh3", "Db3", 3);
    table
}

/// The complete example model.
pub fn network_requirements() -> Model {
    Model {
        tree: tree(),
        generations: generations(),
        groups: groups(),
        compat: compat(),
        priority_scale: 3,
    }
}

/// Expert cost/profit judgments for the 22 recorded change operations of the
/// three generation steps.
pub fn change_annotations() -> BTreeMap<OperationKey, Annotation> {
    let rows: [(&str, u8, u8, &str, &str); 22] = [
        // generation 1 -> 2
        ("J", 1, 2, "1.5", "1.5"),
        ("R", 1, 2, "2.0", "2.5"),
        ("T", 1, 2, "2.2", "3.0"),
        ("Q", 1, 2, "1.6", "2.0"),
        ("W", 1, 2, "1.5", "1.4"),
        ("V", 0, 1, "2.0", "2.1"),
        ("E", 0, 1, "1.4", "1.7"),
        ("M", 0, 1, "1.9", "1.5"),
        ("L", 0, 1, "1.8", "1.5"),
        ("U", 0, 1, "2.0", "1.6"),
        // generation 2 -> 3
        ("H", 1, 2, "2.5", "2.5"),
        ("V", 1, 2, "2.2", "2.4"),
        ("E", 1, 2, "1.5", "2.0"),
        ("L", 1, 2, "1.5", "1.8"),
        ("F", 0, 1, "1.4", "2.0"),
        ("K", 0, 1, "1.5", "2.1"),
        // generation 3 -> 4
        ("Q", 2, 3, "2.1", "3.0"),
        ("J", 2, 3, "1.7", "2.0"),
        ("M", 1, 2, "1.6", "1.8"),
        ("U", 1, 2, "1.8", "2.0"),
        ("C", 0, 1, "2.8", "3.0"),
        ("Z", 0, 1, "1.5", "2.0"),
    ];
    rows.into_iter()
        .map(|(leaf, from, to, cost, profit)| {
            (OperationKey::leaf(leaf, from, to), Annotation::new(cost, profit))
        })
        .collect()
}
