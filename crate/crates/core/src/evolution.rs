//! Change extraction between system generations.
//!
//! Stage one of the forecasting workflow diffs neighbor generations into
//! typed change operations; stage two merges the per-step change sets into
//! one general set and attaches expert cost/profit judgments.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::decimal::Decimal;
use crate::model::{AltId, GenerationSnapshot, Level, Model, NodeId};

/// The change-operation taxonomy over modular systems, coded O1-O10.
///
/// O1-O3 change, delete or add a design alternative (here: a leaf
/// satisfiability level); O5 re-estimates a compatibility; O6-O8 change,
/// delete or add a system part. O4, O9 and O10 (aggregations and
/// configuration rework) are never produced automatically, only recorded.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum ChangeKind {
    #[serde(rename = "O1")]
    AlternativeChanged,
    #[serde(rename = "O2")]
    AlternativeDeleted,
    #[serde(rename = "O3")]
    AlternativeAdded,
    #[serde(rename = "O4")]
    AlternativesAggregated,
    #[serde(rename = "O5")]
    CompatibilityChanged,
    #[serde(rename = "O6")]
    PartChanged,
    #[serde(rename = "O7")]
    PartDeleted,
    #[serde(rename = "O8")]
    PartAdded,
    #[serde(rename = "O9")]
    PartsAggregated,
    #[serde(rename = "O10")]
    ConfigurationChanged,
}

impl ChangeKind {
    pub fn code(self) -> &'static str {
        match self {
            ChangeKind::AlternativeChanged => "O1",
            ChangeKind::AlternativeDeleted => "O2",
            ChangeKind::AlternativeAdded => "O3",
            ChangeKind::AlternativesAggregated => "O4",
            ChangeKind::CompatibilityChanged => "O5",
            ChangeKind::PartChanged => "O6",
            ChangeKind::PartDeleted => "O7",
            ChangeKind::PartAdded => "O8",
            ChangeKind::PartsAggregated => "O9",
            ChangeKind::ConfigurationChanged => "O10",
        }
    }
}

impl fmt::Display for ChangeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// What a change operation acts on.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChangeTarget {
    Leaf(NodeId),
    Node(NodeId),
    Pair(AltId, AltId),
}

impl fmt::Display for ChangeTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChangeTarget::Leaf(id) | ChangeTarget::Node(id) => write!(f, "{id}"),
            ChangeTarget::Pair(a, b) => write!(f, "{a}/{b}"),
        }
    }
}

/// A satisfiability-level move on one leaf.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct LevelChange {
    pub from: Level,
    pub to: Level,
}

/// One typed change operation, optionally annotated with expert cost/profit
/// estimates.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ChangeOperation {
    pub kind: ChangeKind,
    pub target: ChangeTarget,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition: Option<LevelChange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<Decimal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profit: Option<Decimal>,
}

impl ChangeOperation {
    /// Bare leaf-level operation with the kind derived from the levels.
    pub fn leaf(leaf: impl Into<NodeId>, from: Level, to: Level) -> ChangeOperation {
        ChangeOperation {
            kind: kind_for_levels(from, to),
            target: ChangeTarget::Leaf(leaf.into()),
            transition: Some(LevelChange { from, to }),
            cost: None,
            profit: None,
        }
    }

    /// Identity used for duplicate merging and annotation lookup.
    pub fn key(&self) -> OperationKey {
        OperationKey {
            kind: self.kind,
            target: self.target.clone(),
            transition: self.transition,
        }
    }

    /// The `(leaf, from, to)` view of leaf-level operations.
    pub fn leaf_transition(&self) -> Option<(&NodeId, Level, Level)> {
        match (&self.target, self.transition) {
            (ChangeTarget::Leaf(leaf), Some(t)) => Some((leaf, t.from, t.to)),
            _ => None,
        }
    }
}

impl fmt::Display for ChangeOperation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind, self.target)?;
        if let Some(t) = self.transition {
            write!(f, ": {} -> {}", t.from, t.to)?;
        }
        Ok(())
    }
}

/// Identity of a change operation: kind, target and level move. Two
/// operations with equal keys describe the same change.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct OperationKey {
    pub kind: ChangeKind,
    pub target: ChangeTarget,
    pub transition: Option<LevelChange>,
}

impl OperationKey {
    pub fn leaf(leaf: impl Into<NodeId>, from: u8, to: u8) -> OperationKey {
        let from = Level::new(from).expect("level in [0, 3]");
        let to = Level::new(to).expect("level in [0, 3]");
        OperationKey {
            kind: kind_for_levels(from, to),
            target: ChangeTarget::Leaf(leaf.into()),
            transition: Some(LevelChange { from, to }),
        }
    }
}

impl fmt::Display for OperationKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind, self.target)?;
        if let Some(t) = self.transition {
            write!(f, ": {} -> {}", t.from, t.to)?;
        }
        Ok(())
    }
}

/// Expert cost/profit judgment attached to a change operation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Annotation {
    pub cost: Decimal,
    pub profit: Decimal,
}

impl Annotation {
    pub fn new(cost: &str, profit: &str) -> Annotation {
        Annotation {
            cost: cost.parse().expect("valid decimal cost"),
            profit: profit.parse().expect("valid decimal profit"),
        }
    }
}

/// Change operations between two generations.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChangeSet {
    pub from_generation: u32,
    pub to_generation: u32,
    pub operations: Vec<ChangeOperation>,
}

impl ChangeSet {
    pub fn leaf_transitions(&self) -> Vec<(&NodeId, Level, Level)> {
        self.operations.iter().filter_map(ChangeOperation::leaf_transition).collect()
    }
}

/// A structural difference observed between two generations, before it is
/// mapped onto the operation taxonomy.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RawDifference {
    /// A leaf's satisfiability level differs.
    LeafLevel { leaf: NodeId, from: Level, to: Level },
    /// A part appears (has active leaves where it had none).
    NodeAdded { node: NodeId },
    /// A part disappears.
    NodeRemoved { node: NodeId },
    /// A part's label or leaf/composite status was edited.
    NodeEdited { node: NodeId },
    /// A compatibility estimate differs.
    CompatibilityChanged { a: AltId, b: AltId },
    /// Several parts or alternatives were merged into one. Requires expert
    /// interpretation (O4/O9); not classifiable automatically.
    Aggregation { nodes: Vec<NodeId> },
    /// The system configuration was reworked (O10); not classifiable
    /// automatically.
    Configuration { description: String },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvolutionError {
    #[error("snapshot references `{leaf}`, which is not a leaf of the model tree")]
    ReferenceMismatch { leaf: NodeId },
    #[error("levels for `{leaf}` are identical; not a difference")]
    IdenticalLevels { leaf: NodeId },
    #[error("{0} differences are not classifiable automatically; record the operation manually")]
    Unclassifiable(&'static str),
    #[error("annotation for `{key}` does not match any operation in the union")]
    DanglingAnnotation { key: String },
    #[error("conflicting cost/profit values for merged operation `{key}`")]
    ConflictingAnnotation { key: String },
}

fn kind_for_levels(from: Level, to: Level) -> ChangeKind {
    if from.is_absent() {
        ChangeKind::AlternativeAdded
    } else if to.is_absent() {
        ChangeKind::AlternativeDeleted
    } else {
        ChangeKind::AlternativeChanged
    }
}

/// Maps one observed difference onto the operation taxonomy.
///
/// Level moves from 0 are additions (O3), moves to 0 deletions (O2) and all
/// others changes (O1); part appearance/disappearance is O8/O7, part edits
/// O6, compatibility re-estimates O5. Aggregations and configuration rework
/// are rejected as not automatically classifiable.
pub fn classify_change(difference: &RawDifference) -> Result<ChangeKind, EvolutionError> {
    match difference {
        RawDifference::LeafLevel { leaf, from, to } => {
            if from == to {
                return Err(EvolutionError::IdenticalLevels { leaf: leaf.clone() });
            }
            Ok(kind_for_levels(*from, *to))
        }
        RawDifference::NodeAdded { .. } => Ok(ChangeKind::PartAdded),
        RawDifference::NodeRemoved { .. } => Ok(ChangeKind::PartDeleted),
        RawDifference::NodeEdited { .. } => Ok(ChangeKind::PartChanged),
        RawDifference::CompatibilityChanged { .. } => Ok(ChangeKind::CompatibilityChanged),
        RawDifference::Aggregation { .. } => Err(EvolutionError::Unclassifiable("aggregation")),
        RawDifference::Configuration { .. } => Err(EvolutionError::Unclassifiable("configuration")),
    }
}

/// Detects the change operations between two snapshots of the model tree.
///
/// Emits one leaf operation per level difference and one part operation per
/// composite node whose subtree becomes active (O8) or inactive (O7), in
/// tree pre-order.
pub fn diff_generations(
    prev: &GenerationSnapshot,
    next: &GenerationSnapshot,
    model: &Model,
) -> Result<ChangeSet, EvolutionError> {
    for snapshot in [prev, next] {
        for leaf in snapshot.levels.keys() {
            if !model.tree.is_leaf(leaf) {
                return Err(EvolutionError::ReferenceMismatch { leaf: leaf.clone() });
            }
        }
    }

    let mut operations = Vec::new();
    for node in model.tree.preorder() {
        if node.is_leaf() {
            let from = prev.level(&node.id);
            let to = next.level(&node.id);
            if from != to {
                operations.push(ChangeOperation::leaf(node.id.clone(), from, to));
            }
        } else {
            let before = subtree_active(node, prev);
            let after = subtree_active(node, next);
            if !before && after {
                operations.push(ChangeOperation {
                    kind: ChangeKind::PartAdded,
                    target: ChangeTarget::Node(node.id.clone()),
                    transition: None,
                    cost: None,
                    profit: None,
                });
            } else if before && !after {
                operations.push(ChangeOperation {
                    kind: ChangeKind::PartDeleted,
                    target: ChangeTarget::Node(node.id.clone()),
                    transition: None,
                    cost: None,
                    profit: None,
                });
            }
        }
    }

    Ok(ChangeSet {
        from_generation: prev.index,
        to_generation: next.index,
        operations,
    })
}

fn subtree_active(node: &crate::model::RequirementNode, snapshot: &GenerationSnapshot) -> bool {
    if node.is_leaf() {
        return !snapshot.level(&node.id).is_absent();
    }
    node.children.iter().any(|child| subtree_active(child, snapshot))
}

/// Merges change sets into the general change set and attaches annotations.
///
/// Operations with identical keys collapse into one; a merged operation
/// whose copies disagree on cost or profit is an error, as is an annotation
/// that refers to no operation. Output is ordered by operation key.
pub fn aggregate_changes(
    sets: &[ChangeSet],
    annotations: &BTreeMap<OperationKey, Annotation>,
) -> Result<ChangeSet, EvolutionError> {
    fn merge(
        slot: &mut Option<Decimal>,
        value: Option<Decimal>,
        key: &OperationKey,
    ) -> Result<(), EvolutionError> {
        match (*slot, value) {
            (Some(prev), Some(v)) if prev != v => {
                Err(EvolutionError::ConflictingAnnotation { key: key.to_string() })
            }
            (None, Some(v)) => {
                *slot = Some(v);
                Ok(())
            }
            _ => Ok(()),
        }
    }

    let mut union: BTreeMap<OperationKey, ChangeOperation> = BTreeMap::new();
    for set in sets {
        for op in &set.operations {
            let key = op.key();
            match union.get_mut(&key) {
                None => {
                    union.insert(key, op.clone());
                }
                Some(existing) => {
                    merge(&mut existing.cost, op.cost, &key)?;
                    merge(&mut existing.profit, op.profit, &key)?;
                }
            }
        }
    }

    for (key, annotation) in annotations {
        let Some(op) = union.get_mut(key) else {
            return Err(EvolutionError::DanglingAnnotation { key: key.to_string() });
        };
        merge(&mut op.cost, Some(annotation.cost), key)?;
        merge(&mut op.profit, Some(annotation.profit), key)?;
    }

    Ok(ChangeSet {
        from_generation: sets.iter().map(|s| s.from_generation).min().unwrap_or(0),
        to_generation: sets.iter().map(|s| s.to_generation).max().unwrap_or(0),
        operations: union.into_values().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;

    fn triples(set: &ChangeSet) -> Vec<(String, u8, u8)> {
        set.leaf_transitions()
            .into_iter()
            .map(|(leaf, from, to)| (leaf.to_string(), from.get(), to.get()))
            .collect()
    }

    #[test]
    fn diff_first_step_matches_recorded_changes() {
        let model = sample::network_requirements();
        let set = diff_generations(
            model.generation(1).unwrap(),
            model.generation(2).unwrap(),
            &model,
        )
        .unwrap();
        let expected: Vec<(String, u8, u8)> = [
            ("T", 1, 2),
            ("Q", 1, 2),
            ("W", 1, 2),
            ("J", 1, 2),
            ("R", 1, 2),
            ("V", 0, 1),
            ("E", 0, 1),
            ("M", 0, 1),
            ("L", 0, 1),
            ("U", 0, 1),
        ]
        .map(|(l, f, t)| (l.to_string(), f, t))
        .to_vec();
        assert_eq!(triples(&set), expected);

        // The dynamic-criteria and evolution parts first become active here.
        let parts: Vec<_> = set
            .operations
            .iter()
            .filter(|op| op.kind == ChangeKind::PartAdded)
            .map(|op| op.target.to_string())
            .collect();
        assert_eq!(parts, ["Y", "D"]);
    }

    #[test]
    fn diff_is_empty_on_identical_snapshots() {
        let model = sample::network_requirements();
        let gen3 = model.generation(3).unwrap();
        let set = diff_generations(gen3, gen3, &model).unwrap();
        assert!(set.operations.is_empty());
    }

    #[test]
    fn diff_rejects_unknown_leaves() {
        let model = sample::network_requirements();
        let bogus = GenerationSnapshot::new(5, [("nope", 2)]);
        let err = diff_generations(model.generation(4).unwrap(), &bogus, &model).unwrap_err();
        assert!(matches!(err, EvolutionError::ReferenceMismatch { .. }));
    }

    #[test]
    fn classification_follows_level_moves() {
        let leaf = NodeId::new("H");
        let diff = RawDifference::LeafLevel {
            leaf: leaf.clone(),
            from: Level::new(1).unwrap(),
            to: Level::new(2).unwrap(),
        };
        assert_eq!(classify_change(&diff).unwrap(), ChangeKind::AlternativeChanged);

        let diff = RawDifference::LeafLevel {
            leaf: NodeId::new("F"),
            from: Level::ABSENT,
            to: Level::new(1).unwrap(),
        };
        assert_eq!(classify_change(&diff).unwrap(), ChangeKind::AlternativeAdded);

        let diff = RawDifference::NodeAdded { node: NodeId::new("Y") };
        assert_eq!(classify_change(&diff).unwrap(), ChangeKind::PartAdded);

        let diff = RawDifference::LeafLevel {
            leaf: leaf.clone(),
            from: Level::new(2).unwrap(),
            to: Level::new(2).unwrap(),
        };
        assert!(matches!(
            classify_change(&diff),
            Err(EvolutionError::IdenticalLevels { .. })
        ));
    }

    #[test]
    fn aggregations_are_not_auto_classified() {
        let diff = RawDifference::Aggregation { nodes: vec![NodeId::new("I"), NodeId::new("Y")] };
        assert_eq!(
            classify_change(&diff),
            Err(EvolutionError::Unclassifiable("aggregation"))
        );
        let diff = RawDifference::Configuration { description: "ring to mesh".into() };
        assert_eq!(
            classify_change(&diff),
            Err(EvolutionError::Unclassifiable("configuration"))
        );
    }

    #[test]
    fn aggregate_merges_duplicates() {
        let op = ChangeOperation::leaf("H", Level::new(1).unwrap(), Level::new(2).unwrap());
        let a = ChangeSet { from_generation: 1, to_generation: 2, operations: vec![op.clone()] };
        let b = ChangeSet { from_generation: 2, to_generation: 3, operations: vec![op.clone()] };
        let merged = aggregate_changes(&[a, b], &BTreeMap::new()).unwrap();
        assert_eq!(merged.operations, vec![op]);
        assert_eq!((merged.from_generation, merged.to_generation), (1, 3));
    }

    #[test]
    fn aggregate_of_nothing_is_empty() {
        let merged = aggregate_changes(&[], &BTreeMap::new()).unwrap();
        assert!(merged.operations.is_empty());
    }

    #[test]
    fn aggregating_the_recorded_tables_annotates_all_22_operations() {
        let annotations = crate::sample::change_annotations();
        let table_ops: Vec<ChangeOperation> = annotations
            .keys()
            .map(|key| ChangeOperation {
                kind: key.kind,
                target: key.target.clone(),
                transition: key.transition,
                cost: None,
                profit: None,
            })
            .collect();
        let set = ChangeSet { from_generation: 1, to_generation: 4, operations: table_ops };
        let general = aggregate_changes(&[set], &annotations).unwrap();
        assert_eq!(general.operations.len(), 22);
        assert!(general.operations.iter().all(|op| op.cost.is_some() && op.profit.is_some()));
    }

    #[test]
    fn aggregating_the_diffed_steps_leaves_structural_extras_unannotated() {
        let model = crate::sample::network_requirements();
        let annotations = crate::sample::change_annotations();
        let sets: Vec<ChangeSet> = [(1, 2), (2, 3), (3, 4)]
            .map(|(a, b)| {
                diff_generations(model.generation(a).unwrap(), model.generation(b).unwrap(), &model)
                    .unwrap()
            })
            .to_vec();
        let general = aggregate_changes(&sets, &annotations).unwrap();
        assert_eq!((general.from_generation, general.to_generation), (1, 4));
        assert_eq!(general.operations.iter().filter(|op| op.cost.is_some()).count(), 22);

        // Unannotated: the two part additions and the one level move the
        // recorded tables omit.
        let extras: Vec<String> = general
            .operations
            .iter()
            .filter(|op| op.cost.is_none())
            .map(|op| op.to_string())
            .collect();
        assert_eq!(extras, ["O1 V: 2 -> 3", "O8 D", "O8 Y"]);
    }

    #[test]
    fn aggregate_rejects_dangling_annotations() {
        let mut annotations = BTreeMap::new();
        annotations.insert(OperationKey::leaf("H", 1, 2), Annotation::new("1.0", "1.0"));
        let err = aggregate_changes(&[], &annotations).unwrap_err();
        assert!(matches!(err, EvolutionError::DanglingAnnotation { .. }));
    }

    #[test]
    fn aggregate_rejects_conflicting_duplicate_values() {
        let mut op = ChangeOperation::leaf("H", Level::new(1).unwrap(), Level::new(2).unwrap());
        op.cost = Some("1.0".parse().unwrap());
        let mut other = op.clone();
        other.cost = Some("2.0".parse().unwrap());
        let a = ChangeSet { from_generation: 1, to_generation: 2, operations: vec![op] };
        let b = ChangeSet { from_generation: 2, to_generation: 3, operations: vec![other] };
        let err = aggregate_changes(&[a, b], &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, EvolutionError::ConflictingAnnotation { .. }));
    }
}
