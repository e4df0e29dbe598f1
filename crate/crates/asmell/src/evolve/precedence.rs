//! Temporal precedence between smell kinds: of the instance pairs that
//! ever overlap, how often was one kind born before the other?

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{sets_intersect, CoocEntry, CoocMatrix};
use crate::detect::SmellInstance;
use crate::track::TemporalInstance;

/// What the numerator and denominator count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrecedenceMode {
    /// Row instances with at least one qualifying partner (default).
    Instances,
    /// Ordered instance pairs, so one prolific predecessor weighs more.
    Pairs,
}

/// The stratification key for precedence: smell type and level, since
/// both cycle levels behave differently over time.
pub fn precedence_kind(t: &TemporalInstance) -> String {
    format!("{}.{}", t.smell_type.code(), t.level)
}

/// Every kind a temporal instance can have, in presentation order.
pub fn precedence_kinds() -> Vec<&'static str> {
    vec!["CD.file", "CD.component", "UD.component", "HL.file", "HL.component", "GC.component"]
}

/// A temporal instance with its per-version affected sets resolved.
struct Resolved<'a> {
    kind: String,
    birth: i64,
    alive: BTreeMap<usize, BTreeSet<&'a str>>,
}

fn resolve<'a>(
    versions: &'a [Vec<SmellInstance>],
    temporal: &'a [TemporalInstance],
) -> Vec<Resolved<'a>> {
    let by_id: BTreeMap<&str, &SmellInstance> =
        versions.iter().flatten().map(|i| (i.id.as_str(), i)).collect();
    temporal
        .iter()
        .map(|t| Resolved {
            kind: precedence_kind(t),
            birth: t.birth_version as i64,
            alive: t
                .chain
                .iter()
                .map(|link| {
                    let instance = by_id
                        .get(link.instance_id.as_str())
                        .expect("chain member missing from the version lists");
                    (link.version_index, instance.affected())
                })
                .collect(),
        })
        .collect()
}

/// True when some version has both instances alive with intersecting
/// affected sets, each evaluated as of that version.
fn overlaps(a: &Resolved, b: &Resolved) -> bool {
    let (small, large) = if a.alive.len() <= b.alive.len() { (a, b) } else { (b, a) };
    small
        .alive
        .iter()
        .any(|(v, set)| large.alive.get(v).is_some_and(|other| sets_intersect(set, other)))
}

/// Ordered index pairs (x, y) of differing kind that ever overlap.
fn overlapping_pairs(resolved: &[Resolved]) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for x in 0..resolved.len() {
        for y in x + 1..resolved.len() {
            if resolved[x].kind != resolved[y].kind && overlaps(&resolved[x], &resolved[y]) {
                pairs.push((x, y));
                pairs.push((y, x));
            }
        }
    }
    pairs
}

fn matrix_for_k(
    resolved: &[Resolved],
    pairs: &[(usize, usize)],
    totals: &BTreeMap<String, usize>,
    k: usize,
    mode: PrecedenceMode,
) -> CoocMatrix {
    let kinds = precedence_kinds();
    let mut entries = BTreeMap::new();
    for &row in &kinds {
        for &col in &kinds {
            if row == col {
                continue;
            }
            let cell_pairs = pairs.iter().filter(|&&(x, y)| {
                resolved[x].kind == row && resolved[y].kind == col
            });
            let (mut within, mut preceded) = (BTreeSet::new(), BTreeSet::new());
            let (mut within_pairs, mut preceded_pairs) = (0usize, 0usize);
            for &(x, y) in cell_pairs {
                let diff = resolved[y].birth - resolved[x].birth;
                if diff.unsigned_abs() as usize <= k {
                    within.insert(x);
                    within_pairs += 1;
                }
                if diff > 0 && diff as usize <= k {
                    preceded.insert(x);
                    preceded_pairs += 1;
                }
            }
            let entry = match mode {
                PrecedenceMode::Instances => {
                    CoocEntry { numerator: preceded.len(), denominator: within.len() }
                }
                PrecedenceMode::Pairs => {
                    CoocEntry { numerator: preceded_pairs, denominator: within_pairs }
                }
            };
            entries.insert((row.to_string(), col.to_string()), entry);
        }
    }
    CoocMatrix {
        k: Some(k),
        kinds: kinds.iter().map(|k| k.to_string()).collect(),
        entries,
        totals: totals.clone(),
    }
}

fn kind_totals(resolved: &[Resolved]) -> BTreeMap<String, usize> {
    let mut totals: BTreeMap<String, usize> =
        precedence_kinds().iter().map(|k| (k.to_string(), 0)).collect();
    for r in resolved {
        *totals.get_mut(&r.kind).expect("every type/level combination is a known kind") += 1;
    }
    totals
}

/// The precedence matrix for one birth-distance window `k`.
///
/// Cell (i, j) answers: of all kind-i instances that ever overlapped a
/// kind-j instance born within `k` versions of them, what share was born
/// strictly first? Chain members are resolved against `versions`.
pub fn precedence_matrix(
    versions: &[Vec<SmellInstance>],
    temporal: &[TemporalInstance],
    k: usize,
    mode: PrecedenceMode,
) -> CoocMatrix {
    let resolved = resolve(versions, temporal);
    let pairs = overlapping_pairs(&resolved);
    matrix_for_k(&resolved, &pairs, &kind_totals(&resolved), k, mode)
}

/// Precedence matrices for every window from 1 to `k_max` inclusive.
pub fn precedence_matrices(
    versions: &[Vec<SmellInstance>],
    temporal: &[TemporalInstance],
    k_max: usize,
    mode: PrecedenceMode,
) -> Vec<CoocMatrix> {
    let resolved = resolve(versions, temporal);
    let pairs = overlapping_pairs(&resolved);
    let totals = kind_totals(&resolved);
    (1..=k_max).map(|k| matrix_for_k(&resolved, &pairs, &totals, k, mode)).collect()
}
