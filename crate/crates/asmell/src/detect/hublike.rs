//! Hub-like dependency detection: nodes with unusually many, roughly
//! balanced, incoming and outgoing dependencies.

use crate::graph::{DependencyGraph, Level};
use crate::metrics::GraphMetrics;

use super::DetectError;

/// Finds hub nodes: fan-in and fan-out both strictly above the median
/// (taken over non-isolated nodes), and the two fans differing by less
/// than a quarter of their total.
pub fn detect_hublike(graph: &DependencyGraph, metrics: &GraphMetrics) -> Vec<usize> {
    let active: Vec<usize> = (0..graph.node_count())
        .filter(|&v| metrics.fan_in[v] + metrics.fan_out[v] > 0)
        .collect();
    if active.is_empty() {
        return Vec::new();
    }
    let median_in = median(active.iter().map(|&v| metrics.fan_in[v]));
    let median_out = median(active.iter().map(|&v| metrics.fan_out[v]));
    active
        .into_iter()
        .filter(|&v| {
            let fan_in = metrics.fan_in[v] as f64;
            let fan_out = metrics.fan_out[v] as f64;
            fan_in > median_in
                && fan_out > median_out
                && (fan_in - fan_out).abs() < (fan_in + fan_out) / 4.0
        })
        .collect()
}

fn median(values: impl Iterator<Item = usize>) -> f64 {
    let mut values: Vec<usize> = values.collect();
    values.sort_unstable();
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2] as f64
    } else {
        (values[n / 2 - 1] + values[n / 2]) as f64 / 2.0
    }
}

/// How widely a component-level hub's dependencies spread through its
/// member files. Each ratio is a count of border-crossing files over the
/// centre's file count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HlRatios {
    /// Files with any cross-border edge, in or out.
    pub affected: f64,
    /// Files other components depend on.
    pub afferent: f64,
    /// Files depending on other components.
    pub efferent: f64,
}

/// Computes the affected/afferent/efferent ratios for the component
/// `centre` from the file-level graph.
pub fn compute_hl_ratios(
    centre: &str,
    file_graph: &DependencyGraph,
) -> Result<HlRatios, DetectError> {
    if file_graph.level() != Level::File {
        return Err(DetectError::LevelMismatch {
            expected: Level::File,
            actual: file_graph.level(),
        });
    }
    let members: Vec<usize> = (0..file_graph.node_count())
        .filter(|&v| file_graph.node(v).component.as_deref() == Some(centre))
        .collect();
    if members.is_empty() {
        return Err(DetectError::EmptyComponent { component: centre.to_string() });
    }
    let inside = |v: usize| file_graph.node(v).component.as_deref() == Some(centre);
    let mut afferent = 0usize;
    let mut efferent = 0usize;
    let mut affected = 0usize;
    for &f in &members {
        let receives = file_graph.in_neighbors(f).iter().any(|&s| !inside(s));
        let sends = file_graph.out_neighbors(f).iter().any(|&d| !inside(d));
        afferent += usize::from(receives);
        efferent += usize::from(sends);
        affected += usize::from(receives || sends);
    }
    let total = members.len() as f64;
    Ok(HlRatios {
        affected: affected as f64 / total,
        afferent: afferent as f64 / total,
        efferent: efferent as f64 / total,
    })
}
