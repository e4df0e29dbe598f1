//! Unstable dependency detection: components leaning on dependencies
//! less stable than themselves.

use crate::graph::{DependencyGraph, Level};
use crate::metrics::GraphMetrics;

use super::DetectError;

/// One unstable-dependency hit.
#[derive(Debug, Clone, PartialEq)]
pub struct UdFinding {
    /// The depending component's node index.
    pub centre: usize,
    /// Dependencies strictly less stable than the centre, sorted.
    pub less_stable: Vec<usize>,
    /// Share of dependencies that are less stable, in (0, 1].
    pub strength: f64,
    /// Mean instability of the less-stable set minus the centre's own.
    pub instability_gap: f64,
}

/// Flags components where strictly more than `threshold` of the
/// dependencies have higher instability than the component itself.
///
/// Components without dependencies are never flagged.
pub fn detect_unstable(
    graph: &DependencyGraph,
    metrics: &GraphMetrics,
    threshold: f64,
) -> Result<Vec<UdFinding>, DetectError> {
    if graph.level() != Level::Component {
        return Err(DetectError::LevelMismatch {
            expected: Level::Component,
            actual: graph.level(),
        });
    }
    let mut findings = Vec::new();
    for centre in 0..graph.node_count() {
        let deps = graph.out_neighbors(centre);
        if deps.is_empty() {
            continue;
        }
        let own = metrics.instability[centre];
        let less_stable: Vec<usize> = deps
            .iter()
            .copied()
            .filter(|&d| metrics.instability[d] > own)
            .collect();
        let strength = less_stable.len() as f64 / deps.len() as f64;
        if strength > threshold {
            let mean = less_stable.iter().map(|&d| metrics.instability[d]).sum::<f64>()
                / less_stable.len() as f64;
            findings.push(UdFinding {
                centre,
                less_stable,
                strength,
                instability_gap: mean - own,
            });
        }
    }
    Ok(findings)
}
