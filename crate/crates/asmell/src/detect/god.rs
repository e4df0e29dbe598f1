//! God component detection: components far larger (in LOC) than the rest
//! of the system.

use std::collections::BTreeMap;

use crate::diag::{Diagnostic, DiagnosticKind};
use crate::graph::{DependencyGraph, Level};

use super::DetectError;

/// One god-component hit.
#[derive(Debug, Clone, PartialEq)]
pub struct GcFinding {
    /// The component's node index.
    pub component: usize,
    /// Member files, for the Size characteristic.
    pub file_count: usize,
    /// LOC divided by member file count.
    pub loc_density: f64,
}

/// Flags components whose LOC exceeds the Tukey upper fence
/// (Q3 + 1.5 × IQR) of the version's component-LOC distribution.
///
/// Quartiles use linear interpolation between order statistics. With
/// fewer than four components the distribution is too small for
/// quartiles; the detector abstains and says so in a diagnostic.
/// `min_loc` additionally floors detection: smaller components are never
/// flagged no matter how skewed the distribution is.
pub fn detect_god_components(
    graph: &DependencyGraph,
    member_counts: &BTreeMap<String, usize>,
    min_loc: u64,
) -> Result<(Vec<GcFinding>, Option<Diagnostic>), DetectError> {
    if graph.level() != Level::Component {
        return Err(DetectError::LevelMismatch {
            expected: Level::Component,
            actual: graph.level(),
        });
    }
    let n = graph.node_count();
    if n < 4 {
        let diagnostic = Diagnostic::new(
            DiagnosticKind::TooFewComponents,
            format!("god-component detection needs at least 4 components, found {n}"),
        );
        return Ok((Vec::new(), Some(diagnostic)));
    }
    let mut locs: Vec<f64> = graph.nodes().iter().map(|node| node.loc as f64).collect();
    locs.sort_by(f64::total_cmp);
    let q3 = quartile(&locs, 0.75);
    let iqr = q3 - quartile(&locs, 0.25);
    let fence = q3 + 1.5 * iqr;
    let mut findings = Vec::new();
    for component in 0..n {
        let node = graph.node(component);
        if node.loc as f64 <= fence || node.loc < min_loc {
            continue;
        }
        let file_count = *member_counts
            .get(&node.path)
            .ok_or_else(|| DetectError::MissingMemberCount { component: node.path.clone() })?;
        if file_count == 0 {
            return Err(DetectError::EmptyComponent { component: node.path.clone() });
        }
        findings.push(GcFinding {
            component,
            file_count,
            loc_density: node.loc as f64 / file_count as f64,
        });
    }
    Ok((findings, None))
}

/// Linearly interpolated quartile of an already-sorted sample: the value
/// at rank `(n − 1) × q`, blending the two neighbouring order statistics.
fn quartile(sorted: &[f64], q: f64) -> f64 {
    let pos = (sorted.len() - 1) as f64 * q;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}
