//! Serialize analysis results to CSV and JSON and render a static,
//! self-contained HTML report.
//!
//! The [`AnalysisBundle`] is the single unit everything renders from.
//! Chart data is derived here — never inside the renderer — so every
//! number shown in the HTML also exists in a CSV file.

pub(crate) mod csv;
mod html;
mod svg;

pub use csv::{emit_csv, load_instances, load_temporal};
pub use html::render_html;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::detect::{SmellInstance, SmellType};
use crate::evolve::{
    characteristic_series, classify_trend, cooccurrence_matrix, precedence_matrices,
    shape_transitions, survival_by_kind, survival_by_shape, CoocMatrix, PrecedenceMode,
    ShapeTransitionStats, SurvivalCurve, TrendGroup, TrendLabel,
};
use crate::graph::{DependencyGraph, Level};
use crate::track::TemporalInstance;

/// Errors from serializing or loading report artefacts.
#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] ::csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{file}: {message}")]
    Malformed { file: String, message: String },
}

/// One classified characteristic trend.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendRecord {
    pub tid: String,
    pub characteristic: String,
    pub label: TrendLabel,
}

/// Everything the report layer serializes: the raw per-version
/// instances, the tracked chains, and the evolution analyses over them,
/// plus the latest component graph for the architecture charts.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisBundle {
    pub project: String,
    /// One label per analyzed version, oldest first.
    pub version_labels: Vec<String>,
    /// Detected instances, one list per version.
    pub instances: Vec<Vec<SmellInstance>>,
    pub temporal: Vec<TemporalInstance>,
    pub trends: Vec<TrendRecord>,
    /// Survival stratified by smell kind (type.level).
    pub survival_kinds: Vec<SurvivalCurve>,
    /// Cycle survival stratified by birth shape.
    pub survival_shapes: Vec<SurvivalCurve>,
    pub cooc_component: CoocMatrix,
    pub cooc_file: CoocMatrix,
    /// Precedence matrices for k = 1..=k_max.
    pub precedence: Vec<CoocMatrix>,
    pub transitions: ShapeTransitionStats,
    /// Component names in the latest version, canonical order.
    pub components: Vec<String>,
    /// Component dependencies in the latest version (dependant, dependency).
    pub component_edges: Vec<(String, String)>,
}

impl AnalysisBundle {
    /// Runs every evolution analysis over detected and tracked smells
    /// and packs the results. Trends cover chains that lived at least
    /// three versions; the precedence window defaults to the version
    /// count when `k_max` is `None`.
    pub fn assemble(
        project: &str,
        version_labels: Vec<String>,
        instances: Vec<Vec<SmellInstance>>,
        temporal: Vec<TemporalInstance>,
        latest_components: Option<&DependencyGraph>,
        k_max: Option<usize>,
        mode: PrecedenceMode,
    ) -> AnalysisBundle {
        let trends = characteristic_series(&instances, &temporal)
            .into_iter()
            .filter(|s| s.values.len() >= 3)
            .map(|s| TrendRecord {
                label: classify_trend(&s.values).expect("series filtered to length >= 3"),
                tid: s.tid,
                characteristic: s.characteristic,
            })
            .collect();
        let k_max = k_max.unwrap_or(version_labels.len());
        let (components, component_edges) = match latest_components {
            Some(graph) => (
                graph.nodes().iter().map(|n| n.path.clone()).collect(),
                graph
                    .edges()
                    .map(|(a, b)| (graph.node(a).path.clone(), graph.node(b).path.clone()))
                    .collect(),
            ),
            None => (Vec::new(), Vec::new()),
        };
        AnalysisBundle {
            project: project.to_string(),
            survival_kinds: survival_by_kind(&temporal),
            survival_shapes: survival_by_shape(&temporal),
            cooc_component: cooccurrence_matrix(&instances, Level::Component),
            cooc_file: cooccurrence_matrix(&instances, Level::File),
            precedence: precedence_matrices(&instances, &temporal, k_max, mode),
            transitions: shape_transitions(&temporal),
            version_labels,
            instances,
            temporal,
            trends,
            components,
            component_edges,
        }
    }

    /// An empty bundle for a project where nothing was analyzed.
    pub fn empty(project: &str) -> AnalysisBundle {
        AnalysisBundle::assemble(
            project,
            Vec::new(),
            Vec::new(),
            Vec::new(),
            None,
            Some(0),
            PrecedenceMode::Instances,
        )
    }
}

/// The (type, level) combinations detectors emit, in presentation order.
pub fn kind_order() -> [(SmellType, Level); 6] {
    [
        (SmellType::CyclicDependency, Level::File),
        (SmellType::CyclicDependency, Level::Component),
        (SmellType::UnstableDependency, Level::Component),
        (SmellType::HubLikeDependency, Level::File),
        (SmellType::HubLikeDependency, Level::Component),
        (SmellType::GodComponent, Level::Component),
    ]
}

/// Instance counts per version and kind; every kind appears in every
/// version so chart series stay aligned.
pub fn counts_over_time(bundle: &AnalysisBundle) -> Vec<(usize, SmellType, Level, usize)> {
    let mut rows = Vec::new();
    for (v, instances) in bundle.instances.iter().enumerate() {
        for (smell_type, level) in kind_order() {
            let count = instances
                .iter()
                .filter(|i| i.smell_type == smell_type && i.level == level)
                .count();
            rows.push((v, smell_type, level, count));
        }
    }
    rows
}

/// Component × smell-type counts for the latest version: how many
/// component-level instances of each type touch each component. Cell
/// totals therefore sum the instances' affected-set sizes.
pub fn heatmap(bundle: &AnalysisBundle) -> Vec<(String, SmellType, usize)> {
    let latest = match bundle.instances.last() {
        Some(instances) => instances,
        None => return Vec::new(),
    };
    let mut components: BTreeSet<String> = bundle.components.iter().cloned().collect();
    for instance in latest.iter().filter(|i| i.level == Level::Component) {
        components.extend(instance.affected().iter().map(|a| a.to_string()));
    }
    let mut rows = Vec::new();
    for component in components {
        for smell_type in SmellType::ALL {
            let count = latest
                .iter()
                .filter(|i| {
                    i.level == Level::Component
                        && i.smell_type == smell_type
                        && i.affected().contains(component.as_str())
                })
                .count();
            rows.push((component.clone(), smell_type, count));
        }
    }
    rows
}

/// Fan-in and fan-out distributions over the latest version's
/// components: degree → number of components with that degree.
pub fn degree_histogram(
    bundle: &AnalysisBundle,
) -> (BTreeMap<usize, usize>, BTreeMap<usize, usize>) {
    let mut fan_in: BTreeMap<&str, usize> =
        bundle.components.iter().map(|c| (c.as_str(), 0)).collect();
    let mut fan_out = fan_in.clone();
    for (from, to) in &bundle.component_edges {
        *fan_out.entry(from).or_default() += 1;
        *fan_in.entry(to).or_default() += 1;
    }
    let tally = |degrees: BTreeMap<&str, usize>| {
        let mut histogram = BTreeMap::new();
        for degree in degrees.into_values() {
            *histogram.entry(degree).or_default() += 1;
        }
        histogram
    };
    (tally(fan_in), tally(fan_out))
}

/// The latest version's largest instances by affected-artefact count.
pub fn top_smells(bundle: &AnalysisBundle, n: usize) -> Vec<&SmellInstance> {
    let mut latest: Vec<&SmellInstance> =
        bundle.instances.last().map(|v| v.iter().collect()).unwrap_or_default();
    latest.sort_by(|a, b| {
        b.affected().len().cmp(&a.affected().len()).then_with(|| a.id.cmp(&b.id))
    });
    latest.truncate(n);
    latest
}

/// Per-characteristic trend-group tallies with the share within that
/// characteristic's classified series.
pub fn trend_tallies(bundle: &AnalysisBundle) -> Vec<(String, TrendGroup, usize, f64)> {
    let mut per_characteristic: BTreeMap<&str, BTreeMap<TrendGroup, usize>> = BTreeMap::new();
    for record in &bundle.trends {
        *per_characteristic
            .entry(&record.characteristic)
            .or_default()
            .entry(record.label.group)
            .or_default() += 1;
    }
    let mut rows = Vec::new();
    for (characteristic, groups) in per_characteristic {
        let total: usize = groups.values().sum();
        for group in [TrendGroup::Constant, TrendGroup::Increasing, TrendGroup::Decreasing] {
            let count = groups.get(&group).copied().unwrap_or(0);
            let share = 100.0 * count as f64 / total as f64;
            rows.push((characteristic.to_string(), group, count, share));
        }
    }
    rows
}

/// Instance and chain totals per kind.
pub fn totals(bundle: &AnalysisBundle) -> Vec<(SmellType, Level, usize, usize)> {
    kind_order()
        .into_iter()
        .map(|(smell_type, level)| {
            let instances = bundle
                .instances
                .iter()
                .flatten()
                .filter(|i| i.smell_type == smell_type && i.level == level)
                .count();
            let chains = bundle
                .temporal
                .iter()
                .filter(|t| t.smell_type == smell_type && t.level == level)
                .count();
            (smell_type, level, instances, chains)
        })
        .collect()
}

#[derive(Serialize)]
struct SummaryTotal {
    #[serde(rename = "type")]
    smell_type: String,
    level: String,
    instances: usize,
    temporal_instances: usize,
}

#[derive(Serialize)]
struct SummaryShapeChanges {
    total_chains: usize,
    chains_with_change: usize,
    /// Shape → percentage of instances ever holding it that changed away.
    ever_changed_pct: BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct Summary<'a> {
    project: &'a str,
    versions: &'a [String],
    totals: Vec<SummaryTotal>,
    /// Stratum → median survival in versions (null = never below 0.5).
    median_survival: BTreeMap<&'a str, Option<usize>>,
    /// Characteristic → group → percentage of classified series.
    trend_groups: BTreeMap<String, BTreeMap<&'static str, f64>>,
    shape_changes: SummaryShapeChanges,
}

/// The machine-readable `summary.json` contents.
pub fn summary_string(bundle: &AnalysisBundle) -> Result<String, ReportError> {
    let totals = totals(bundle)
        .into_iter()
        .map(|(smell_type, level, instances, temporal_instances)| SummaryTotal {
            smell_type: smell_type.code().to_string(),
            level: level.to_string(),
            instances,
            temporal_instances,
        })
        .collect();
    let median_survival = bundle
        .survival_kinds
        .iter()
        .chain(&bundle.survival_shapes)
        .map(|curve| (curve.stratum.as_str(), curve.median))
        .collect();
    let mut trend_groups: BTreeMap<String, BTreeMap<&'static str, f64>> = BTreeMap::new();
    for (characteristic, group, _, share) in trend_tallies(bundle) {
        trend_groups.entry(characteristic).or_default().insert(group.name(), share);
    }
    let ever_changed_pct = bundle
        .transitions
        .instances_with_shape
        .iter()
        .map(|(shape, &held)| {
            let changed = bundle
                .transitions
                .instances_changed_from
                .get(shape)
                .copied()
                .unwrap_or(0);
            (shape.clone(), 100.0 * changed as f64 / held as f64)
        })
        .collect();
    let summary = Summary {
        project: &bundle.project,
        versions: &bundle.version_labels,
        totals,
        median_survival,
        trend_groups,
        shape_changes: SummaryShapeChanges {
            total_chains: bundle.transitions.total_chains,
            chains_with_change: bundle.transitions.chains_with_change,
            ever_changed_pct,
        },
    };
    Ok(serde_json::to_string_pretty(&summary)?)
}

/// Writes the full report tree: `report.html`, `summary.json`, and all
/// CSV files under `csv/`.
pub fn write_report(bundle: &AnalysisBundle, out_dir: &Path) -> Result<(), ReportError> {
    let csv_dir = out_dir.join("csv");
    std::fs::create_dir_all(&csv_dir)?;
    emit_csv(bundle, &csv_dir)?;
    std::fs::write(out_dir.join("report.html"), render_html(bundle))?;
    std::fs::write(out_dir.join("summary.json"), summary_string(bundle)?)?;
    Ok(())
}
