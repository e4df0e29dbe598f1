//! Tracking: matches smell instances across adjacent versions into
//! temporal instances, the unit of the survival and trend analyses.
//!
//! Two instances of the same type and level match when the Jaccard
//! similarity of their affected-artefact sets clears a threshold; matches
//! are picked greedily from the most similar pair down, one-to-one. A
//! chain of matches over strictly consecutive versions is one
//! [`TemporalInstance`]. There is no gap bridging: a smell absent for one
//! version dies, and an identical one later is a new temporal instance.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detect::{characteristic, SmellInstance, SmellType};
use crate::graph::Level;

/// Default Jaccard similarity needed to match two instances.
pub const DEFAULT_TRACK_THRESHOLD: f64 = 0.5;

/// One accepted pairing between adjacent versions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchDecision {
    pub prev_id: String,
    pub next_id: String,
    /// Jaccard similarity of the affected sets, ≥ the match threshold.
    pub similarity: f64,
}

/// One chain link: an instance id pinned to its version.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLink {
    pub version_index: usize,
    pub instance_id: String,
}

/// A smell followed across consecutive versions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalInstance {
    /// Stable id, derived from the first chain member.
    pub tid: String,
    pub smell_type: SmellType,
    pub level: Level,
    /// One link per version the smell is present in, consecutive.
    pub chain: Vec<ChainLink>,
    pub birth_version: usize,
    /// First version the smell is absent from; `None` while still alive
    /// at the last analyzed version (right-censored).
    pub death_version: Option<usize>,
    /// Number of versions the smell is present in (= chain length).
    pub age: usize,
    /// The shape at each chain version; populated for cycles only.
    pub shapes: Vec<String>,
}

impl TemporalInstance {
    /// Right-censored: still alive when the analysis window ended.
    pub fn is_censored(&self) -> bool {
        self.death_version.is_none()
    }
}

/// Errors from tracking.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum TrackError {
    #[error("instance {id} has version {found}, expected {expected}")]
    VersionMismatch { id: String, expected: usize, found: usize },
}

/// Jaccard similarity of two artefact sets: |∩| / |∪|, 0 when both empty.
pub fn jaccard(a: &BTreeSet<&str>, b: &BTreeSet<&str>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 0.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

/// Matches instances of version `v` against version `v + 1`.
///
/// Candidate pairs share type and level and have Jaccard similarity of
/// their affected sets ≥ `threshold`; they are ranked by (similarity
/// descending, previous id, next id) and accepted greedily one-to-one,
/// so exact matches always win over partial ones.
pub fn match_versions(
    prev: &[SmellInstance],
    next: &[SmellInstance],
    threshold: f64,
) -> Result<Vec<MatchDecision>, TrackError> {
    if let Some(first) = prev.first() {
        let v = first.version_index;
        for instance in prev {
            if instance.version_index != v {
                return Err(TrackError::VersionMismatch {
                    id: instance.id.clone(),
                    expected: v,
                    found: instance.version_index,
                });
            }
        }
        for instance in next {
            if instance.version_index != v + 1 {
                return Err(TrackError::VersionMismatch {
                    id: instance.id.clone(),
                    expected: v + 1,
                    found: instance.version_index,
                });
            }
        }
    } else if let Some(first) = next.first() {
        let v = first.version_index;
        for instance in next {
            if instance.version_index != v {
                return Err(TrackError::VersionMismatch {
                    id: instance.id.clone(),
                    expected: v,
                    found: instance.version_index,
                });
            }
        }
    }

    let mut candidates: Vec<(f64, &str, &str)> = Vec::new();
    for p in prev {
        let p_set = p.affected();
        for q in next {
            if p.smell_type != q.smell_type || p.level != q.level {
                continue;
            }
            let similarity = jaccard(&p_set, &q.affected());
            if similarity >= threshold {
                candidates.push((similarity, &p.id, &q.id));
            }
        }
    }
    candidates.sort_by(|a, b| {
        b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)).then_with(|| a.2.cmp(b.2))
    });
    let mut used_prev = BTreeSet::new();
    let mut used_next = BTreeSet::new();
    let mut decisions = Vec::new();
    for (similarity, prev_id, next_id) in candidates {
        if used_prev.contains(prev_id) || used_next.contains(next_id) {
            continue;
        }
        used_prev.insert(prev_id);
        used_next.insert(next_id);
        decisions.push(MatchDecision {
            prev_id: prev_id.to_string(),
            next_id: next_id.to_string(),
            similarity,
        });
    }
    Ok(decisions)
}

/// Builds temporal instances from per-version detection results.
///
/// `versions[i]` must hold the instances of version `i`; the slice length
/// defines the analysis window, so chains alive in the last slot come out
/// censored. Every instance lands in exactly one chain.
pub fn build_temporal_instances(
    versions: &[Vec<SmellInstance>],
    threshold: f64,
) -> Result<Vec<TemporalInstance>, TrackError> {
    for (v, instances) in versions.iter().enumerate() {
        for instance in instances {
            if instance.version_index != v {
                return Err(TrackError::VersionMismatch {
                    id: instance.id.clone(),
                    expected: v,
                    found: instance.version_index,
                });
            }
        }
    }

    struct Chain<'a> {
        members: Vec<&'a SmellInstance>,
    }
    let mut chains: Vec<Chain> = Vec::new();
    // Chains whose last member sits in the previous version, by last id.
    let mut open: BTreeMap<&str, usize> = BTreeMap::new();

    for (v, instances) in versions.iter().enumerate() {
        let mut next_open: BTreeMap<&str, usize> = BTreeMap::new();
        let mut matched_next: BTreeSet<&str> = BTreeSet::new();
        let decisions = if v > 0 {
            match_versions(&versions[v - 1], instances, threshold)?
        } else {
            Vec::new()
        };
        for decision in &decisions {
            let chain_idx = open[decision.prev_id.as_str()];
            let member = instances
                .iter()
                .find(|i| i.id == decision.next_id)
                .expect("matched id comes from this version");
            chains[chain_idx].members.push(member);
            next_open.insert(member.id.as_str(), chain_idx);
            matched_next.insert(decision.next_id.as_str());
        }
        for instance in instances {
            if !matched_next.contains(instance.id.as_str()) {
                chains.push(Chain { members: vec![instance] });
                next_open.insert(&instance.id, chains.len() - 1);
            }
        }
        open = next_open;
    }

    let last_version = versions.len().saturating_sub(1);
    let mut temporal: Vec<TemporalInstance> = chains
        .into_iter()
        .map(|chain| {
            let first = chain.members[0];
            let last = chain.members.last().unwrap();
            let shapes = if first.smell_type == SmellType::CyclicDependency {
                chain
                    .members
                    .iter()
                    .map(|m| {
                        m.characteristic_tag(characteristic::SHAPE).unwrap_or_default().to_string()
                    })
                    .collect()
            } else {
                Vec::new()
            };
            TemporalInstance {
                tid: format!("t-{}", first.id),
                smell_type: first.smell_type,
                level: first.level,
                chain: chain
                    .members
                    .iter()
                    .map(|m| ChainLink {
                        version_index: m.version_index,
                        instance_id: m.id.clone(),
                    })
                    .collect(),
                birth_version: first.version_index,
                death_version: (last.version_index < last_version)
                    .then_some(last.version_index + 1),
                age: chain.members.len(),
                shapes,
            }
        })
        .collect();
    temporal.sort_by(|a, b| {
        (a.birth_version, a.smell_type, a.level, &a.tid)
            .cmp(&(b.birth_version, b.smell_type, b.level, &b.tid))
    });
    Ok(temporal)
}
