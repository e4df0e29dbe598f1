//! How cycle shapes change along a tracked chain.

use std::collections::{BTreeMap, BTreeSet};

use crate::detect::SmellType;
use crate::track::TemporalInstance;

/// Shape-change tallies over all tracked cycles, counted two ways: per
/// transition occurrence and per instance, since a single bouncy chain
/// can rack up many occurrences.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ShapeTransitionStats {
    /// (from, to) → number of adjacent-version occurrences.
    pub transition_counts: BTreeMap<(String, String), usize>,
    /// (from, to) → number of distinct instances exhibiting it.
    pub transition_instances: BTreeMap<(String, String), usize>,
    /// Shape → number of instances that ever held it.
    pub instances_with_shape: BTreeMap<String, usize>,
    /// Shape → number of instances that ever changed away from it.
    pub instances_changed_from: BTreeMap<String, usize>,
    /// Cycle chains considered.
    pub total_chains: usize,
    /// Chains with at least one shape change.
    pub chains_with_change: usize,
}

/// Tallies adjacent-version shape changes over the cycle chains.
///
/// A transition is an adjacent pair with differing shapes; a chain
/// bouncing back and forth counts each direction every time it occurs.
/// Non-cycle instances carry no shapes and are ignored.
pub fn shape_transitions(temporal: &[TemporalInstance]) -> ShapeTransitionStats {
    let mut stats = ShapeTransitionStats::default();
    let chains = temporal
        .iter()
        .filter(|t| t.smell_type == SmellType::CyclicDependency && !t.shapes.is_empty());
    for chain in chains {
        stats.total_chains += 1;
        let mut changed_from = BTreeSet::new();
        let mut seen_pairs = BTreeSet::new();
        for pair in chain.shapes.windows(2) {
            if pair[0] != pair[1] {
                let key = (pair[0].clone(), pair[1].clone());
                if seen_pairs.insert(key.clone()) {
                    *stats.transition_instances.entry(key.clone()).or_default() += 1;
                }
                *stats.transition_counts.entry(key).or_default() += 1;
                changed_from.insert(pair[0].as_str());
            }
        }
        for shape in chain.shapes.iter().collect::<BTreeSet<_>>() {
            *stats.instances_with_shape.entry(shape.clone()).or_default() += 1;
        }
        if !changed_from.is_empty() {
            stats.chains_with_change += 1;
        }
        for shape in changed_from {
            *stats.instances_changed_from.entry(shape.to_string()).or_default() += 1;
        }
    }
    stats
}
