//! Morphological model of a requirement system.
//!
//! A system is a rooted tree of requirement parts whose leaves are elementary
//! criteria. Each historical generation records an ordinal satisfiability
//! level per leaf (absent leaves sit at level 0). Prospective improvements
//! are grouped design alternatives attached to tree nodes, with pairwise
//! ordinal compatibility estimates between alternatives of different groups.
//!
//! All types are plain immutable values; construction never enforces the
//! cross-referential invariants, [`Model::validate`] reports them instead.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::decimal::Decimal;

macro_rules! id_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({:?})", stringify!($name), self.0)
            }
        }

        impl From<&str> for $name {
            fn from(id: &str) -> Self {
                Self::new(id)
            }
        }

        impl From<String> for $name {
            fn from(id: String) -> Self {
                Self(id)
            }
        }
    };
}

id_type!(
    /// Identifier of a requirement-tree node (part or leaf criterion).
    NodeId
);
id_type!(
    /// Identifier of a group of design alternatives.
    GroupId
);
id_type!(
    /// Identifier of a single design alternative.
    AltId
);

/// Errors for out-of-range ordinals and dangling leaf references.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("satisfiability level {0} is outside [0, 3]")]
    InvalidLevel(u8),
    #[error("compatibility value {0} is outside [0, 3]")]
    InvalidCompatibility(u8),
    #[error("priority {0} must be at least 1")]
    InvalidPriority(u8),
    #[error("`{0}` is not a leaf of the requirement tree")]
    UnknownLeaf(NodeId),
}

/// Ordinal satisfiability level of a leaf criterion.
///
/// 0 = none/absent, 1 = low, 2 = medium, 3 = high.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Level(u8);

impl Level {
    pub const ABSENT: Level = Level(0);
    pub const MAX: Level = Level(3);

    pub fn new(value: u8) -> Result<Level, ModelError> {
        if value > 3 {
            return Err(ModelError::InvalidLevel(value));
        }
        Ok(Level(value))
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn is_absent(self) -> bool {
        self.0 == 0
    }
}

impl TryFrom<u8> for Level {
    type Error = ModelError;

    fn try_from(value: u8) -> Result<Level, ModelError> {
        Level::new(value)
    }
}

impl From<Level> for u8 {
    fn from(level: Level) -> u8 {
        level.0
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Ordinal compatibility estimate between two alternatives, 0 = incompatible.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Compatibility(u8);

impl Compatibility {
    pub const INCOMPATIBLE: Compatibility = Compatibility(0);
    pub const MAX: Compatibility = Compatibility(3);

    pub fn new(value: u8) -> Result<Compatibility, ModelError> {
        if value > 3 {
            return Err(ModelError::InvalidCompatibility(value));
        }
        Ok(Compatibility(value))
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn is_compatible(self) -> bool {
        self.0 > 0
    }
}

impl TryFrom<u8> for Compatibility {
    type Error = ModelError;

    fn try_from(value: u8) -> Result<Compatibility, ModelError> {
        Compatibility::new(value)
    }
}

impl From<Compatibility> for u8 {
    fn from(value: Compatibility) -> u8 {
        value.0
    }
}

impl fmt::Display for Compatibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Ordinal priority of an alternative, 1 = best. The upper bound is the
/// model's priority scale `r` and is checked by validation, not here.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Priority(u8);

impl Priority {
    pub fn new(value: u8) -> Result<Priority, ModelError> {
        if value == 0 {
            return Err(ModelError::InvalidPriority(value));
        }
        Ok(Priority(value))
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl TryFrom<u8> for Priority {
    type Error = ModelError;

    fn try_from(value: u8) -> Result<Priority, ModelError> {
        Priority::new(value)
    }
}

impl From<Priority> for u8 {
    fn from(value: Priority) -> u8 {
        value.0
    }
}

impl fmt::Display for Priority {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A requirement part. Leaves (no children) are the elementary criteria that
/// carry satisfiability levels; composite nodes structure them.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct RequirementNode {
    pub id: NodeId,
    pub label: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<RequirementNode>,
}

impl RequirementNode {
    pub fn leaf(id: impl Into<NodeId>, label: impl Into<String>) -> RequirementNode {
        RequirementNode { id: id.into(), label: label.into(), children: Vec::new() }
    }

    pub fn composite(
        id: impl Into<NodeId>,
        label: impl Into<String>,
        children: Vec<RequirementNode>,
    ) -> RequirementNode {
        RequirementNode { id: id.into(), label: label.into(), children }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Rooted tree of requirement parts.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RequirementTree {
    pub root: RequirementNode,
}

impl RequirementTree {
    pub fn new(root: RequirementNode) -> RequirementTree {
        RequirementTree { root }
    }

    /// All nodes in pre-order (parent before children, children in stored
    /// order). This is the canonical ordering for every deterministic output.
    pub fn preorder(&self) -> Vec<&RequirementNode> {
        let mut out = Vec::new();
        fn walk<'a>(node: &'a RequirementNode, out: &mut Vec<&'a RequirementNode>) {
            out.push(node);
            for child in &node.children {
                walk(child, out);
            }
        }
        walk(&self.root, &mut out);
        out
    }

    /// Leaf ids in pre-order.
    pub fn leaf_ids(&self) -> Vec<&NodeId> {
        self.preorder().into_iter().filter(|n| n.is_leaf()).map(|n| &n.id).collect()
    }

    pub fn find(&self, id: &NodeId) -> Option<&RequirementNode> {
        self.preorder().into_iter().find(|n| &n.id == id)
    }

    pub fn contains(&self, id: &NodeId) -> bool {
        self.find(id).is_some()
    }

    pub fn is_leaf(&self, id: &NodeId) -> bool {
        self.find(id).is_some_and(RequirementNode::is_leaf)
    }
}

/// Satisfiability levels of one system generation.
///
/// Leaves missing from `levels` are at level 0; storing an explicit 0 is
/// equivalent and both render the same way.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GenerationSnapshot {
    pub index: u32,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub levels: BTreeMap<NodeId, Level>,
}

impl GenerationSnapshot {
    pub fn new<I, K>(index: u32, levels: I) -> GenerationSnapshot
    where
        I: IntoIterator<Item = (K, u8)>,
        K: Into<NodeId>,
    {
        GenerationSnapshot {
            index,
            levels: levels
                .into_iter()
                .filter(|(_, v)| *v != 0)
                .map(|(k, v)| (k.into(), Level::new(v).expect("level in [0, 3]")))
                .collect(),
        }
    }

    /// Stored level, or 0 for leaves without an entry. Does not check that
    /// the id is a tree leaf; see [`Model::leaf_level`] for the checked form.
    pub fn level(&self, leaf: &NodeId) -> Level {
        self.levels.get(leaf).copied().unwrap_or(Level::ABSENT)
    }

    /// Snapshot with explicit zero entries dropped, for value comparisons
    /// under the absent-leaf convention.
    pub fn normalized(&self) -> GenerationSnapshot {
        GenerationSnapshot {
            index: self.index,
            levels: self
                .levels
                .iter()
                .filter(|(_, level)| !level.is_absent())
                .map(|(id, level)| (id.clone(), *level))
                .collect(),
        }
    }
}

/// A leaf-level transition performed by an alternative.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LeafTransition {
    pub leaf: NodeId,
    pub from: Level,
    pub to: Level,
}

/// What selecting an alternative does: nothing, or one leaf transition.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "ActionRepr", into = "ActionRepr")]
pub enum AlternativeAction {
    None,
    Transition(LeafTransition),
}

impl AlternativeAction {
    pub fn transition(&self) -> Option<&LeafTransition> {
        match self {
            AlternativeAction::None => None,
            AlternativeAction::Transition(t) => Some(t),
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, AlternativeAction::None)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ActionRepr {
    Keyword(String),
    Transition(LeafTransition),
}

impl TryFrom<ActionRepr> for AlternativeAction {
    type Error = String;

    fn try_from(repr: ActionRepr) -> Result<AlternativeAction, String> {
        match repr {
            ActionRepr::Keyword(word) if word == "none" => Ok(AlternativeAction::None),
            ActionRepr::Keyword(word) => Err(format!("unknown action {word:?}, expected \"none\"")),
            ActionRepr::Transition(t) => Ok(AlternativeAction::Transition(t)),
        }
    }
}

impl From<AlternativeAction> for ActionRepr {
    fn from(action: AlternativeAction) -> ActionRepr {
        match action {
            AlternativeAction::None => ActionRepr::Keyword("none".to_string()),
            AlternativeAction::Transition(t) => ActionRepr::Transition(t),
        }
    }
}

/// One selectable design alternative of a group.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Alternative {
    pub id: AltId,
    pub action: AlternativeAction,
    pub cost: Decimal,
    pub profit: Decimal,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priority: Option<Priority>,
}

impl Alternative {
    pub fn none(id: impl Into<AltId>, priority: Option<u8>) -> Alternative {
        Alternative {
            id: id.into(),
            action: AlternativeAction::None,
            cost: Decimal::ZERO,
            profit: Decimal::ZERO,
            priority: priority.map(|p| Priority::new(p).expect("priority >= 1")),
        }
    }

    pub fn transition(
        id: impl Into<AltId>,
        leaf: impl Into<NodeId>,
        from: u8,
        to: u8,
        cost: &str,
        profit: &str,
        priority: Option<u8>,
    ) -> Alternative {
        Alternative {
            id: id.into(),
            action: AlternativeAction::Transition(LeafTransition {
                leaf: leaf.into(),
                from: Level::new(from).expect("level in [0, 3]"),
                to: Level::new(to).expect("level in [0, 3]"),
            }),
            cost: cost.parse().expect("valid decimal cost"),
            profit: profit.parse().expect("valid decimal profit"),
            priority: priority.map(|p| Priority::new(p).expect("priority >= 1")),
        }
    }
}

/// Alternatives competing for one slot of the improvement structure,
/// attached to the tree node under which they are composed.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AlternativeGroup {
    pub id: GroupId,
    pub node: NodeId,
    pub alternatives: Vec<Alternative>,
}

impl AlternativeGroup {
    pub fn new(
        id: impl Into<GroupId>,
        node: impl Into<NodeId>,
        alternatives: Vec<Alternative>,
    ) -> AlternativeGroup {
        AlternativeGroup { id: id.into(), node: node.into(), alternatives }
    }

    pub fn alternative(&self, id: &AltId) -> Option<&Alternative> {
        self.alternatives.iter().find(|a| &a.id == id)
    }
}

/// One symmetric compatibility estimate between alternatives of two groups.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CompatibilityEntry {
    pub a: AltId,
    pub b: AltId,
    pub value: Compatibility,
}

/// Pairwise compatibility estimates. Pairs without an entry take `default`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CompatibilityTable {
    pub default: Compatibility,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub entries: Vec<CompatibilityEntry>,
}

impl CompatibilityTable {
    pub fn new(default: u8) -> CompatibilityTable {
        CompatibilityTable {
            default: Compatibility::new(default).expect("compatibility in [0, 3]"),
            entries: Vec::new(),
        }
    }

    pub fn insert(&mut self, a: impl Into<AltId>, b: impl Into<AltId>, value: u8) {
        self.entries.push(CompatibilityEntry {
            a: a.into(),
            b: b.into(),
            value: Compatibility::new(value).expect("compatibility in [0, 3]"),
        });
    }

    /// Estimate for an unordered pair; entries match in either orientation.
    pub fn value(&self, a: &AltId, b: &AltId) -> Compatibility {
        self.entries
            .iter()
            .find(|e| (&e.a == a && &e.b == b) || (&e.a == b && &e.b == a))
            .map(|e| e.value)
            .unwrap_or(self.default)
    }
}

fn default_priority_scale() -> u8 {
    3
}

/// Complete morphological model: requirement tree, generation history,
/// prospective alternative groups and their compatibility estimates.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Model {
    pub tree: RequirementTree,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generations: Vec<GenerationSnapshot>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub groups: Vec<AlternativeGroup>,
    pub compat: CompatibilityTable,
    #[serde(rename = "priorityScale", default = "default_priority_scale")]
    pub priority_scale: u8,
}

impl Model {
    /// Level of `leaf` in `snapshot`, or an error when `leaf` is not a leaf
    /// of this model's tree.
    pub fn leaf_level(
        &self,
        snapshot: &GenerationSnapshot,
        leaf: &NodeId,
    ) -> Result<Level, ModelError> {
        if !self.tree.is_leaf(leaf) {
            return Err(ModelError::UnknownLeaf(leaf.clone()));
        }
        Ok(snapshot.level(leaf))
    }

    pub fn generation(&self, index: u32) -> Option<&GenerationSnapshot> {
        self.generations.iter().find(|g| g.index == index)
    }

    pub fn latest_generation(&self) -> Option<&GenerationSnapshot> {
        self.generations.iter().max_by_key(|g| g.index)
    }

    pub fn group(&self, id: &GroupId) -> Option<&AlternativeGroup> {
        self.groups.iter().find(|g| &g.id == id)
    }

    pub fn groups_for_node(&self, node: &NodeId) -> Vec<&AlternativeGroup> {
        self.groups.iter().filter(|g| &g.node == node).collect()
    }

    /// Looks an alternative up across all groups.
    pub fn alternative(&self, id: &AltId) -> Option<(&AlternativeGroup, &Alternative)> {
        self.groups
            .iter()
            .find_map(|g| g.alternative(id).map(|a| (g, a)))
    }

    /// Group owning each alternative id, for distinct-group checks.
    fn group_of(&self) -> BTreeMap<&AltId, &GroupId> {
        let mut map = BTreeMap::new();
        for group in &self.groups {
            for alt in &group.alternatives {
                map.entry(&alt.id).or_insert(&group.id);
            }
        }
        map
    }

    /// The priorities stored on the alternatives, as one model-wide map.
    /// Alternatives without a stored priority are simply missing from it.
    pub fn stored_priorities(&self) -> BTreeMap<AltId, Priority> {
        self.groups
            .iter()
            .flat_map(|g| &g.alternatives)
            .filter_map(|a| a.priority.map(|p| (a.id.clone(), p)))
            .collect()
    }

    /// Checks every structural invariant and returns the violations found.
    /// An empty report means the model is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut report = Vec::new();

        // Tree: node ids unique.
        let mut seen = BTreeSet::new();
        for node in self.tree.preorder() {
            if !seen.insert(&node.id) {
                report.push(Violation::DuplicateNodeId { id: node.id.clone() });
            }
        }

        // Generations: positive, strictly increasing indices over tree leaves.
        for (pos, generation) in self.generations.iter().enumerate() {
            if generation.index == 0 {
                report.push(Violation::ZeroGenerationIndex { position: pos });
            }
            if let Some(prev) = pos.checked_sub(1).map(|p| &self.generations[p]) {
                if generation.index <= prev.index {
                    report.push(Violation::GenerationOrder {
                        prev: prev.index,
                        next: generation.index,
                    });
                }
            }
            for leaf in generation.levels.keys() {
                if !self.tree.is_leaf(leaf) {
                    report.push(Violation::UnknownSnapshotLeaf {
                        generation: generation.index,
                        leaf: leaf.clone(),
                    });
                }
            }
        }

        // Groups and alternatives.
        if self.priority_scale == 0 {
            report.push(Violation::ZeroPriorityScale);
        }
        let mut group_ids = BTreeSet::new();
        let mut alt_ids = BTreeSet::new();
        for group in &self.groups {
            if !group_ids.insert(&group.id) {
                report.push(Violation::DuplicateGroupId { id: group.id.clone() });
            }
            if !self.tree.contains(&group.node) {
                report.push(Violation::UnknownGroupNode {
                    group: group.id.clone(),
                    node: group.node.clone(),
                });
            }
            if group.alternatives.is_empty() {
                report.push(Violation::EmptyGroup { group: group.id.clone() });
            }
            for alt in &group.alternatives {
                if !alt_ids.insert(&alt.id) {
                    report.push(Violation::DuplicateAlternativeId { id: alt.id.clone() });
                }
                if alt.cost.is_negative() {
                    report.push(Violation::NegativeCost { alternative: alt.id.clone() });
                }
                if alt.profit.is_negative() {
                    report.push(Violation::NegativeProfit { alternative: alt.id.clone() });
                }
                if let Some(priority) = alt.priority {
                    if self.priority_scale != 0 && priority.get() > self.priority_scale {
                        report.push(Violation::PriorityOutOfRange {
                            alternative: alt.id.clone(),
                            priority,
                            scale: self.priority_scale,
                        });
                    }
                }
                if let Some(t) = alt.action.transition() {
                    if t.from == t.to {
                        report.push(Violation::NoOpTransition { alternative: alt.id.clone() });
                    }
                    if !self.tree.is_leaf(&t.leaf) {
                        report.push(Violation::UnknownActionLeaf {
                            alternative: alt.id.clone(),
                            leaf: t.leaf.clone(),
                        });
                    }
                }
            }
        }

        // Compatibility entries: known alternatives, distinct groups, one
        // value per unordered pair.
        let group_of = self.group_of();
        let mut pairs: BTreeMap<(&AltId, &AltId), Compatibility> = BTreeMap::new();
        for entry in &self.compat.entries {
            for id in [&entry.a, &entry.b] {
                if !group_of.contains_key(id) {
                    report.push(Violation::UnknownCompatibilityAlternative { id: id.clone() });
                }
            }
            match (group_of.get(&entry.a), group_of.get(&entry.b)) {
                (Some(ga), Some(gb)) if ga == gb => {
                    report.push(Violation::SameGroupCompatibility {
                        a: entry.a.clone(),
                        b: entry.b.clone(),
                        group: (*ga).clone(),
                    });
                }
                _ => {}
            }
            let key = if entry.a <= entry.b {
                (&entry.a, &entry.b)
            } else {
                (&entry.b, &entry.a)
            };
            match pairs.get(&key) {
                None => {
                    pairs.insert(key, entry.value);
                }
                Some(prev) if *prev != entry.value => {
                    report.push(Violation::AsymmetricCompatibility {
                        a: key.0.clone(),
                        b: key.1.clone(),
                        values: (*prev, entry.value),
                    });
                }
                Some(_) => {
                    report.push(Violation::DuplicateCompatibilityPair {
                        a: key.0.clone(),
                        b: key.1.clone(),
                    });
                }
            }
        }

        report
    }
}

/// A single invariant violation found by [`Model::validate`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Violation {
    #[error("duplicate node id `{id}` in the requirement tree")]
    DuplicateNodeId { id: NodeId },
    #[error("generation at position {position} has index 0 (indices start at 1)")]
    ZeroGenerationIndex { position: usize },
    #[error("generation indices not strictly increasing: {prev} then {next}")]
    GenerationOrder { prev: u32, next: u32 },
    #[error("generation {generation} sets a level for `{leaf}`, which is not a tree leaf")]
    UnknownSnapshotLeaf { generation: u32, leaf: NodeId },
    #[error("duplicate group id `{id}`")]
    DuplicateGroupId { id: GroupId },
    #[error("group `{group}` references missing node `{node}`")]
    UnknownGroupNode { group: GroupId, node: NodeId },
    #[error("group `{group}` has no alternatives")]
    EmptyGroup { group: GroupId },
    #[error("duplicate alternative id `{id}`")]
    DuplicateAlternativeId { id: AltId },
    #[error("alternative `{alternative}` has a negative cost")]
    NegativeCost { alternative: AltId },
    #[error("alternative `{alternative}` has a negative profit")]
    NegativeProfit { alternative: AltId },
    #[error("alternative `{alternative}` has priority {priority}, outside [1, {scale}]")]
    PriorityOutOfRange { alternative: AltId, priority: Priority, scale: u8 },
    #[error("alternative `{alternative}` transitions to its own level")]
    NoOpTransition { alternative: AltId },
    #[error("alternative `{alternative}` targets `{leaf}`, which is not a tree leaf")]
    UnknownActionLeaf { alternative: AltId, leaf: NodeId },
    #[error("priority scale must be at least 1")]
    ZeroPriorityScale,
    #[error("compatibility entry references unknown alternative `{id}`")]
    UnknownCompatibilityAlternative { id: AltId },
    #[error("compatibility entry for `{a}` and `{b}` pairs alternatives of the same group `{group}`")]
    SameGroupCompatibility { a: AltId, b: AltId, group: GroupId },
    #[error("conflicting compatibility values {} and {} for `{a}`/`{b}`", values.0, values.1)]
    AsymmetricCompatibility { a: AltId, b: AltId, values: (Compatibility, Compatibility) },
    #[error("duplicate compatibility entry for `{a}`/`{b}`")]
    DuplicateCompatibilityPair { a: AltId, b: AltId },
}
