//! Hierarchical morphological synthesis of improvement compositions.
//!
//! A composition picks one alternative per group. It is scored by a quality
//! vector `N(S) = (w; n1..nr)`: `w` is the worst pairwise compatibility of
//! the selection and `n_k` counts selected alternatives of priority `k`.
//! Each tree node keeps only its Pareto-efficient compositions; those become
//! candidate alternatives of the parent node, bottom-up to the root.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{
    AltId, AlternativeGroup, Compatibility, CompatibilityTable, GroupId, Model, NodeId, Priority,
    RequirementNode,
};
use crate::ranking::dominance_layers;

/// One selected alternative per participating group.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Composition {
    pub selection: BTreeMap<GroupId, AltId>,
}

impl Composition {
    pub fn new<I, G, A>(selection: I) -> Composition
    where
        I: IntoIterator<Item = (G, A)>,
        G: Into<GroupId>,
        A: Into<AltId>,
    {
        Composition {
            selection: selection.into_iter().map(|(g, a)| (g.into(), a.into())).collect(),
        }
    }

    pub fn get(&self, group: &GroupId) -> Option<&AltId> {
        self.selection.get(group)
    }

    pub fn alternative_ids(&self) -> impl Iterator<Item = &AltId> {
        self.selection.values()
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for alt in self.selection.values() {
            if !first {
                f.write_str("*")?;
            }
            write!(f, "{alt}")?;
            first = false;
        }
        Ok(())
    }
}

/// Quality vector `(w; n1..nr)` of a composition.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct QualityVector {
    /// Minimum pairwise compatibility over the selection; the scale maximum
    /// when fewer than two groups participate.
    pub w: Compatibility,
    /// `counts[k-1]` selected alternatives hold priority `k`.
    pub counts: Vec<u32>,
}

/// Outcome of comparing two quality vectors.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Dominance {
    StrictlyBetter,
    StrictlyWorse,
    Equal,
    Incomparable,
}

impl QualityVector {
    pub fn new(w: Compatibility, counts: Vec<u32>) -> QualityVector {
        QualityVector { w, counts }
    }

    pub fn scale(&self) -> usize {
        self.counts.len()
    }

    fn cumulative(&self) -> Vec<u64> {
        self.counts
            .iter()
            .scan(0u64, |acc, &n| {
                *acc += n as u64;
                Some(*acc)
            })
            .collect()
    }

    /// Compares under the dominance order: at least as compatible, and at
    /// least as many alternatives at every priority prefix `1..=k`.
    pub fn compare(&self, other: &QualityVector) -> Result<Dominance, SynthesisError> {
        if self.scale() != other.scale() {
            return Err(SynthesisError::ScaleMismatch {
                left: self.scale(),
                right: other.scale(),
            });
        }
        if self == other {
            return Ok(Dominance::Equal);
        }
        let at_least = |a: &QualityVector, b: &QualityVector| {
            a.w >= b.w
                && a.cumulative().iter().zip(b.cumulative()).all(|(x, y)| *x >= y)
        };
        if at_least(self, other) {
            Ok(Dominance::StrictlyBetter)
        } else if at_least(other, self) {
            Ok(Dominance::StrictlyWorse)
        } else {
            Ok(Dominance::Incomparable)
        }
    }

    /// True when `self` strictly dominates `other`. Panics on mismatched
    /// scales; use [`QualityVector::compare`] for checked comparison.
    pub fn strictly_dominates(&self, other: &QualityVector) -> bool {
        matches!(
            self.compare(other).expect("quality vectors share one scale"),
            Dominance::StrictlyBetter
        )
    }
}

impl fmt::Display for QualityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.w)?;
        for (i, n) in self.counts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SynthesisError {
    #[error("quality vectors have different priority scales ({left} vs {right})")]
    ScaleMismatch { left: usize, right: usize },
    #[error("no priority assigned to alternative `{alternative}`")]
    MissingPriority { alternative: AltId },
    #[error("priority {priority} of `{alternative}` exceeds the scale {scale}")]
    PriorityOutOfRange { alternative: AltId, priority: Priority, scale: u8 },
    #[error("priority scale must be at least 1")]
    ZeroScale,
    #[error("cannot synthesize an empty list of groups")]
    NoGroups,
    #[error("group `{group}` has no alternatives")]
    EmptyGroup { group: GroupId },
}

/// True when every cross-group pair of the selection is compatible
/// (estimate >= 1). Vacuously true for fewer than two groups.
pub fn feasible(composition: &Composition, compat: &CompatibilityTable) -> bool {
    let alts: Vec<&AltId> = composition.alternative_ids().collect();
    pairs(alts.len()).all(|(i, j)| compat.value(alts[i], alts[j]).is_compatible())
}

/// Scores a composition: worst pairwise compatibility plus per-priority
/// counts of the selected alternatives.
pub fn quality_vector(
    composition: &Composition,
    compat: &CompatibilityTable,
    priorities: &BTreeMap<AltId, Priority>,
    r: u8,
) -> Result<QualityVector, SynthesisError> {
    if r == 0 {
        return Err(SynthesisError::ZeroScale);
    }
    let alts: Vec<&AltId> = composition.alternative_ids().collect();
    let w = pairs(alts.len())
        .map(|(i, j)| compat.value(alts[i], alts[j]))
        .min()
        .unwrap_or(Compatibility::MAX);
    let mut counts = vec![0u32; r as usize];
    for alt in &alts {
        let priority = priorities
            .get(*alt)
            .ok_or_else(|| SynthesisError::MissingPriority { alternative: (*alt).clone() })?;
        if priority.get() > r {
            return Err(SynthesisError::PriorityOutOfRange {
                alternative: (*alt).clone(),
                priority: *priority,
                scale: r,
            });
        }
        counts[priority.get() as usize - 1] += 1;
    }
    Ok(QualityVector::new(w, counts))
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Composes one alternative per group and keeps the Pareto-efficient
/// feasible compositions, ordered by group id then alternative id. Distinct
/// compositions with equal quality are all retained.
pub fn synthesize_node(
    groups: &[&AlternativeGroup],
    compat: &CompatibilityTable,
    priorities: &BTreeMap<AltId, Priority>,
    r: u8,
) -> Result<Vec<(Composition, QualityVector)>, SynthesisError> {
    let slots = real_slots(groups, priorities, r)?;
    let entries = enumerate(&slots, r, |a, b| match (&a.alternative, &b.alternative) {
        (Some(x), Some(y)) => compat.value(x, y),
        _ => unreachable!("node synthesis only sees real alternatives"),
    });
    Ok(entries
        .into_iter()
        .map(|e| (Composition { selection: e.selection }, e.quality))
        .collect())
}

/// Configuration for hierarchical synthesis.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TreeSynthesisConfig {
    /// Compatibility assumed for pairs involving a composed subtree
    /// candidate, which the table cannot price.
    pub child_compat: Compatibility,
}

impl Default for TreeSynthesisConfig {
    fn default() -> TreeSynthesisConfig {
        TreeSynthesisConfig { child_compat: Compatibility::MAX }
    }
}

/// A Pareto-efficient composition of the whole tree, with the quality vector
/// observed at every participating composite node.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TreeComposition {
    pub composition: Composition,
    /// Quality vector at the synthesis root.
    pub quality: QualityVector,
    /// Quality vectors of the node-level sub-compositions, keyed by node id.
    pub node_quality: BTreeMap<NodeId, QualityVector>,
}

/// Synthesizes the whole requirement tree bottom-up.
///
/// Each node composes its own groups together with the Pareto-efficient
/// results of its children; child results act as candidate alternatives
/// whose priority is their Pareto layer (capped at `r`) and whose pairwise
/// compatibility is `config.child_compat`. Returns the root's Pareto set
/// with the full per-group selection reconstructed.
pub fn synthesize_tree(
    model: &Model,
    priorities: &BTreeMap<AltId, Priority>,
    config: &TreeSynthesisConfig,
) -> Result<Vec<TreeComposition>, SynthesisError> {
    let r = model.priority_scale;
    if r == 0 {
        return Err(SynthesisError::ZeroScale);
    }
    let result = synth_subtree(model, &model.tree.root, priorities, config, r)?;
    Ok(result
        .unwrap_or_default()
        .into_iter()
        .map(|e| TreeComposition {
            composition: Composition { selection: e.selection },
            quality: e.quality,
            node_quality: e.node_quality,
        })
        .collect())
}

/// A partial composition flowing up the tree.
#[derive(Clone, Debug)]
struct Candidate {
    /// Real alternative id, or `None` for a composed subtree result.
    alternative: Option<AltId>,
    priority: Priority,
    selection: BTreeMap<GroupId, AltId>,
    node_quality: BTreeMap<NodeId, QualityVector>,
}

struct Entry {
    selection: BTreeMap<GroupId, AltId>,
    quality: QualityVector,
    node_quality: BTreeMap<NodeId, QualityVector>,
}

fn real_slots(
    groups: &[&AlternativeGroup],
    priorities: &BTreeMap<AltId, Priority>,
    r: u8,
) -> Result<Vec<Vec<Candidate>>, SynthesisError> {
    if r == 0 {
        return Err(SynthesisError::ZeroScale);
    }
    if groups.is_empty() {
        return Err(SynthesisError::NoGroups);
    }
    let mut slots = Vec::with_capacity(groups.len());
    for group in groups {
        if group.alternatives.is_empty() {
            return Err(SynthesisError::EmptyGroup { group: group.id.clone() });
        }
        let mut candidates = Vec::with_capacity(group.alternatives.len());
        for alt in &group.alternatives {
            let priority = *priorities
                .get(&alt.id)
                .ok_or_else(|| SynthesisError::MissingPriority { alternative: alt.id.clone() })?;
            if priority.get() > r {
                return Err(SynthesisError::PriorityOutOfRange {
                    alternative: alt.id.clone(),
                    priority,
                    scale: r,
                });
            }
            candidates.push(Candidate {
                alternative: Some(alt.id.clone()),
                priority,
                selection: BTreeMap::from([(group.id.clone(), alt.id.clone())]),
                node_quality: BTreeMap::new(),
            });
        }
        slots.push(candidates);
    }
    Ok(slots)
}

/// Exhaustively enumerates one candidate per slot, drops selections with an
/// incompatible pair, scores the rest and filters to the Pareto-efficient
/// set, sorted by the merged selection.
fn enumerate(
    slots: &[Vec<Candidate>],
    r: u8,
    compat_of: impl Fn(&Candidate, &Candidate) -> Compatibility,
) -> Vec<Entry> {
    let mut scored: Vec<Entry> = Vec::new();
    let mut cursor = vec![0usize; slots.len()];
    if slots.iter().any(Vec::is_empty) {
        return scored;
    }
    'product: loop {
        let picked: Vec<&Candidate> = cursor.iter().zip(slots).map(|(&i, s)| &s[i]).collect();

        let w = pairs(picked.len())
            .map(|(i, j)| compat_of(picked[i], picked[j]))
            .min()
            .unwrap_or(Compatibility::MAX);
        if w.is_compatible() || picked.len() < 2 {
            let mut counts = vec![0u32; r as usize];
            let mut selection = BTreeMap::new();
            let mut node_quality = BTreeMap::new();
            for candidate in &picked {
                counts[candidate.priority.get() as usize - 1] += 1;
                selection.extend(candidate.selection.clone());
                node_quality.extend(candidate.node_quality.clone());
            }
            scored.push(Entry {
                selection,
                quality: QualityVector::new(w, counts),
                node_quality,
            });
        }

        // Odometer increment over the slots.
        for (digit, slot) in cursor.iter_mut().zip(slots).rev() {
            *digit += 1;
            if *digit < slot.len() {
                continue 'product;
            }
            *digit = 0;
        }
        break;
    }

    let keep: Vec<bool> = (0..scored.len())
        .map(|i| {
            scored
                .iter()
                .all(|other| !other.quality.strictly_dominates(&scored[i].quality))
        })
        .collect();
    let mut kept: Vec<Entry> = scored
        .into_iter()
        .zip(keep)
        .filter_map(|(entry, keep)| keep.then_some(entry))
        .collect();
    kept.sort_by(|a, b| a.selection.iter().cmp(b.selection.iter()));
    kept
}

fn synth_subtree(
    model: &Model,
    node: &RequirementNode,
    priorities: &BTreeMap<AltId, Priority>,
    config: &TreeSynthesisConfig,
    r: u8,
) -> Result<Option<Vec<Entry>>, SynthesisError> {
    let own_groups = model.groups_for_node(&node.id);
    let mut child_slots: Vec<Vec<Candidate>> = Vec::new();
    for child in &node.children {
        if let Some(entries) = synth_subtree(model, child, priorities, config, r)? {
            child_slots.push(lift_candidates(entries, r));
        }
    }
    if own_groups.is_empty() && child_slots.is_empty() {
        return Ok(None);
    }

    let mut slots = match own_groups.is_empty() {
        true => Vec::new(),
        false => real_slots(&own_groups, priorities, r)?,
    };
    slots.append(&mut child_slots);

    let entries = enumerate(&slots, r, |a, b| match (&a.alternative, &b.alternative) {
        (Some(x), Some(y)) => model.compat.value(x, y),
        _ => config.child_compat,
    });
    let entries = entries
        .into_iter()
        .map(|mut e| {
            e.node_quality.insert(node.id.clone(), e.quality.clone());
            e
        })
        .collect();
    Ok(Some(entries))
}

/// Turns a node's Pareto set into candidate alternatives for its parent.
/// Priority is the Pareto layer of the quality vector, capped at `r`; being
/// a Pareto set, every member lands on layer 1.
fn lift_candidates(entries: Vec<Entry>, r: u8) -> Vec<Candidate> {
    let qualities: Vec<&QualityVector> = entries.iter().map(|e| &e.quality).collect();
    let layers = dominance_layers(&qualities, |a, b| a.strictly_dominates(b));
    entries
        .into_iter()
        .zip(layers)
        .map(|(entry, layer)| Candidate {
            alternative: None,
            priority: Priority::new(layer.min(r as usize) as u8)
                .expect("pareto layers start at 1"),
            selection: entry.selection,
            node_quality: entry.node_quality,
        })
        .collect()
}
