//! Co-occurrence of smell kinds over shared artefacts.
//!
//! Smells are broken down into *kinds*: cycles and god components count
//! as a whole, while hub-like and unstable dependencies are split per
//! role, so "how often does a cycle touch a hub's dependants" and "…the
//! hub itself" are separate questions. The unit of counting is one
//! instance viewed through one kind, carrying that kind's artefact set.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::detect::{Role, SmellInstance, SmellType};
use crate::graph::Level;

/// One matrix cell, kept as an exact ratio so aggregation over projects
/// stays lossless.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoocEntry {
    /// Row-kind units with at least one qualifying column-kind partner.
    pub numerator: usize,
    /// All row-kind units.
    pub denominator: usize,
}

impl CoocEntry {
    /// Share of row units with a partner, or `None` when the row kind
    /// never occurred (rendered blank, not as 0%).
    pub fn percentage(&self) -> Option<f64> {
        (self.denominator > 0).then(|| 100.0 * self.numerator as f64 / self.denominator as f64)
    }
}

/// A kind-by-kind percentage matrix with exact counts behind each cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CoocMatrix {
    /// Birth-distance window for precedence matrices, `None` for plain
    /// co-occurrence.
    pub k: Option<usize>,
    /// Row and column labels, in presentation order.
    pub kinds: Vec<String>,
    /// Cells keyed by (row kind, column kind). Same-kind cells are
    /// undefined and absent.
    pub entries: BTreeMap<(String, String), CoocEntry>,
    /// Number of units per kind, the shared row denominator.
    pub totals: BTreeMap<String, usize>,
}

/// The kinds tabulated per level. Unstable and god components only exist
/// between components, so the file matrix is smaller.
pub fn cooc_kinds(level: Level) -> Vec<&'static str> {
    match level {
        Level::Component => vec![
            "CD",
            "UD.less_stable",
            "UD.centre",
            "HL.incoming",
            "HL.centre",
            "HL.outgoing",
            "GC",
        ],
        Level::File => vec!["CD", "HL.incoming", "HL.centre", "HL.outgoing"],
    }
}

/// True when the two sets share at least one artefact.
pub fn sets_intersect(a: &BTreeSet<&str>, b: &BTreeSet<&str>) -> bool {
    a.intersection(b).next().is_some()
}

/// The kind-tagged artefact sets one instance contributes. Roles that
/// came out empty contribute no unit.
fn kind_units(instance: &SmellInstance) -> Vec<(&'static str, BTreeSet<&str>)> {
    let units = match instance.smell_type {
        SmellType::CyclicDependency => vec![("CD", instance.affected())],
        SmellType::GodComponent => vec![("GC", instance.affected())],
        SmellType::UnstableDependency => vec![
            ("UD.less_stable", instance.role(Role::LessStable).collect()),
            ("UD.centre", instance.role(Role::Centre).collect()),
        ],
        SmellType::HubLikeDependency => vec![
            ("HL.incoming", instance.role(Role::Incoming).collect()),
            ("HL.centre", instance.role(Role::Centre).collect()),
            ("HL.outgoing", instance.role(Role::Outgoing).collect()),
        ],
    };
    units.into_iter().filter(|(_, set)| !set.is_empty()).collect()
}

/// Builds the co-occurrence matrix for one level over all versions.
///
/// Cell (i, j) answers: of all kind-i units, what share shared an
/// artefact with some kind-j unit *in the same version*? A unit from the
/// same instance qualifies as a partner when the kinds differ, which is
/// how role pairs of one smell type relate to each other.
pub fn cooccurrence_matrix(versions: &[Vec<SmellInstance>], level: Level) -> CoocMatrix {
    let kinds = cooc_kinds(level);
    let mut per_version: Vec<BTreeMap<&str, Vec<BTreeSet<&str>>>> = Vec::new();
    for instances in versions {
        let mut by_kind: BTreeMap<&str, Vec<BTreeSet<&str>>> =
            kinds.iter().map(|k| (*k, Vec::new())).collect();
        for instance in instances.iter().filter(|i| i.level == level) {
            for (kind, set) in kind_units(instance) {
                by_kind
                    .get_mut(kind)
                    .expect("every unit kind is in the level's kind list")
                    .push(set);
            }
        }
        per_version.push(by_kind);
    }

    let totals: BTreeMap<String, usize> = kinds
        .iter()
        .map(|kind| {
            let total = per_version.iter().map(|bk| bk[kind].len()).sum();
            (kind.to_string(), total)
        })
        .collect();

    let mut entries = BTreeMap::new();
    for &row in &kinds {
        for &col in &kinds {
            if row == col {
                continue;
            }
            let numerator = per_version
                .iter()
                .map(|bk| {
                    bk[row]
                        .iter()
                        .filter(|x| bk[col].iter().any(|y| sets_intersect(x, y)))
                        .count()
                })
                .sum();
            entries.insert(
                (row.to_string(), col.to_string()),
                CoocEntry { numerator, denominator: totals[row] },
            );
        }
    }

    CoocMatrix {
        k: None,
        kinds: kinds.iter().map(|k| k.to_string()).collect(),
        entries,
        totals,
    }
}

/// Sums matrices cell-wise, so percentages aggregate weighted by each
/// input's own unit counts rather than averaging the percentages.
///
/// All inputs must tabulate the same kinds with the same window.
pub fn combine_weighted(matrices: &[CoocMatrix]) -> CoocMatrix {
    let Some(first) = matrices.first() else {
        return CoocMatrix {
            k: None,
            kinds: Vec::new(),
            entries: BTreeMap::new(),
            totals: BTreeMap::new(),
        };
    };
    let mut combined = first.clone();
    for matrix in &matrices[1..] {
        assert_eq!(matrix.kinds, combined.kinds, "matrices tabulate different kinds");
        assert_eq!(matrix.k, combined.k, "matrices use different windows");
        for (key, entry) in &matrix.entries {
            let cell = combined.entries.entry(key.clone()).or_default();
            cell.numerator += entry.numerator;
            cell.denominator += entry.denominator;
        }
        for (kind, total) in &matrix.totals {
            *combined.totals.entry(kind.clone()).or_default() += total;
        }
    }
    combined
}
