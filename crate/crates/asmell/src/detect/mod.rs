//! Architectural smell detection: cyclic dependencies, hub-like
//! dependencies, unstable dependencies, and god components.
//!
//! Each detector yields [`SmellInstance`]s — version-scoped findings whose
//! identity is a stable hash of what they affect, so re-running detection
//! on the same graphs reproduces the same ids byte for byte. Instances
//! carry role sets (which artefacts participate and how) and a map of
//! numeric or tag characteristics used by the evolution analyses.

mod cycles;
mod design_level;
mod god;
mod hublike;
mod shape;
mod unstable;

pub use cycles::{find_cycles, CdMode, CycleLimits};
pub use design_level::affected_design_level;
pub use god::detect_god_components;
pub use hublike::{compute_hl_ratios, detect_hublike, HlRatios};
pub use shape::{classify_shape, Shape};
pub use unstable::detect_unstable;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::diag::Diagnostic;
use crate::graph::{ArtefactId, DependencyGraph, GraphError, Level};
use crate::metrics::{compute_metrics, smell_centrality, GraphMetrics, MetricsError, PagerankConfig};

/// The four smells this crate knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SmellType {
    CyclicDependency,
    HubLikeDependency,
    UnstableDependency,
    GodComponent,
}

impl SmellType {
    /// Short code used in CSVs and reports.
    pub fn code(&self) -> &'static str {
        match self {
            SmellType::CyclicDependency => "CD",
            SmellType::HubLikeDependency => "HL",
            SmellType::UnstableDependency => "UD",
            SmellType::GodComponent => "GC",
        }
    }

    pub const ALL: [SmellType; 4] = [
        SmellType::CyclicDependency,
        SmellType::HubLikeDependency,
        SmellType::UnstableDependency,
        SmellType::GodComponent,
    ];
}

impl fmt::Display for SmellType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl std::str::FromStr for SmellType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "CD" => Ok(SmellType::CyclicDependency),
            "HL" => Ok(SmellType::HubLikeDependency),
            "UD" => Ok(SmellType::UnstableDependency),
            "GC" => Ok(SmellType::GodComponent),
            other => Err(format!("unknown smell type `{other}`")),
        }
    }
}

/// How an artefact participates in a smell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    /// Part of a cycle or the affected component itself.
    Member,
    /// The hub of a hub-like dependency or the unstable component.
    Centre,
    /// Dependants of a hub.
    Incoming,
    /// Dependencies of a hub.
    Outgoing,
    /// Dependencies less stable than the centre.
    LessStable,
}

impl Role {
    pub fn name(&self) -> &'static str {
        match self {
            Role::Member => "member",
            Role::Centre => "centre",
            Role::Incoming => "incoming",
            Role::Outgoing => "outgoing",
            Role::LessStable => "less_stable",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "member" => Ok(Role::Member),
            "centre" => Ok(Role::Centre),
            "incoming" => Ok(Role::Incoming),
            "outgoing" => Ok(Role::Outgoing),
            "less_stable" => Ok(Role::LessStable),
            other => Err(format!("unknown role `{other}`")),
        }
    }
}

/// Which abstraction levels a cycle actually disturbs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DesignLevel {
    FileOnly,
    ComponentOnly,
    Both,
}

impl DesignLevel {
    pub fn tag(&self) -> &'static str {
        match self {
            DesignLevel::FileOnly => "file_only",
            DesignLevel::ComponentOnly => "component_only",
            DesignLevel::Both => "both",
        }
    }
}

impl fmt::Display for DesignLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A characteristic value: numeric or categorical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CharValue {
    Num(f64),
    Tag(String),
}

impl CharValue {
    pub fn as_num(&self) -> Option<f64> {
        match self {
            CharValue::Num(v) => Some(*v),
            CharValue::Tag(_) => None,
        }
    }

    pub fn as_tag(&self) -> Option<&str> {
        match self {
            CharValue::Num(_) => None,
            CharValue::Tag(t) => Some(t),
        }
    }
}

impl fmt::Display for CharValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharValue::Num(v) => write!(f, "{v}"),
            CharValue::Tag(t) => f.write_str(t),
        }
    }
}

/// Well-known characteristic names.
pub mod characteristic {
    pub const SIZE: &str = "size";
    pub const NUM_EDGES: &str = "num_edges";
    pub const CENTRALITY: &str = "centrality";
    pub const SHAPE: &str = "shape";
    pub const DESIGN_LEVEL: &str = "design_level";
    pub const STRENGTH: &str = "strength";
    pub const INSTABILITY_GAP: &str = "instability_gap";
    pub const AFFECTED_RATIO: &str = "affected_ratio";
    pub const AFFERENT_RATIO: &str = "afferent_ratio";
    pub const EFFERENT_RATIO: &str = "efferent_ratio";
    pub const LOC_DENSITY: &str = "loc_density";
}

/// One smell found in one version of the system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmellInstance {
    /// Stable id: a hash of `(type, level, affected artefacts, version)`.
    pub id: String,
    pub smell_type: SmellType,
    pub level: Level,
    pub version_index: usize,
    /// Participating artefact paths, grouped by role.
    pub roles: BTreeMap<Role, BTreeSet<String>>,
    pub characteristics: BTreeMap<String, CharValue>,
}

impl SmellInstance {
    /// Builds an instance, deriving its stable id.
    pub fn new(
        smell_type: SmellType,
        level: Level,
        version_index: usize,
        roles: BTreeMap<Role, BTreeSet<String>>,
        characteristics: BTreeMap<String, CharValue>,
    ) -> Self {
        let id = instance_id(smell_type, level, version_index, roles.values().flatten());
        SmellInstance { id, smell_type, level, version_index, roles, characteristics }
    }

    /// Union of all role sets: every artefact the smell touches.
    pub fn affected(&self) -> BTreeSet<&str> {
        self.roles.values().flatten().map(String::as_str).collect()
    }

    /// Affected artefacts as level-qualified ids.
    pub fn affected_artefacts(&self) -> BTreeSet<ArtefactId> {
        self.affected()
            .into_iter()
            .map(|p| ArtefactId::new(self.level, p))
            .collect()
    }

    /// The artefacts filling one role.
    pub fn role(&self, role: Role) -> impl Iterator<Item = &str> {
        self.roles.get(&role).into_iter().flatten().map(String::as_str)
    }

    pub fn characteristic_num(&self, name: &str) -> Option<f64> {
        self.characteristics.get(name).and_then(CharValue::as_num)
    }

    pub fn characteristic_tag(&self, name: &str) -> Option<&str> {
        self.characteristics.get(name).and_then(CharValue::as_tag)
    }
}

/// Stable instance identity: SHA-256 over the defining tuple, truncated to
/// 16 hex characters.
pub fn instance_id<'a>(
    smell_type: SmellType,
    level: Level,
    version_index: usize,
    affected: impl IntoIterator<Item = &'a String>,
) -> String {
    let mut paths: Vec<&str> = affected.into_iter().map(String::as_str).collect();
    paths.sort_unstable();
    paths.dedup();
    let mut hasher = Sha256::new();
    hasher.update(smell_type.code());
    hasher.update(b"|");
    hasher.update(level.to_string());
    hasher.update(b"|");
    hasher.update(version_index.to_string());
    for p in paths {
        hasher.update(b"|");
        hasher.update(p);
    }
    let digest = hasher.finalize();
    let mut id = String::with_capacity(16);
    for byte in digest.iter().take(8) {
        id.push_str(&format!("{byte:02x}"));
    }
    id
}

/// Detector tuning knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorConfig {
    pub cd_mode: CdMode,
    /// Elementary mode: ignore cycles longer than this (0 = no limit).
    pub cd_max_len: usize,
    /// Elementary mode: stop after enumerating this many cycles
    /// (0 = no limit).
    pub cd_max_count: usize,
    /// Minimum share of less-stable dependencies for an unstable
    /// dependency.
    pub ud_threshold: f64,
    /// Components below this LOC are never god components.
    pub gc_min_loc: u64,
    pub pagerank: PagerankConfig,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            cd_mode: CdMode::Scc,
            cd_max_len: 0,
            cd_max_count: 0,
            ud_threshold: 0.3,
            gc_min_loc: 0,
            pagerank: PagerankConfig::default(),
        }
    }
}

/// Errors from the detectors.
#[derive(Debug, Error)]
pub enum DetectError {
    #[error("detector requires a {expected}-level graph, got {actual}")]
    LevelMismatch { expected: Level, actual: Level },
    #[error("component `{component}` has no member files")]
    EmptyComponent { component: String },
    #[error("no member file count for component `{component}`")]
    MissingMemberCount { component: String },
    #[error("shape classification needs a strongly connected subgraph of at least 2 nodes")]
    NotStronglyConnected,
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Everything detection found in one version.
#[derive(Debug, Clone)]
pub struct DetectOutcome {
    /// Instances sorted by (level, type, affected set).
    pub instances: Vec<SmellInstance>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Runs all four detectors over one version's graphs.
///
/// Cycles and hubs are detected at both levels; unstable dependencies and
/// god components exist only at component level. Cycle instances get their
/// `design_level` assigned here, since it needs both graphs.
pub fn detect_version(
    file_graph: &DependencyGraph,
    component_graph: &DependencyGraph,
    cfg: &DetectorConfig,
) -> Result<DetectOutcome, DetectError> {
    if file_graph.level() != Level::File {
        return Err(DetectError::LevelMismatch { expected: Level::File, actual: file_graph.level() });
    }
    if component_graph.level() != Level::Component {
        return Err(DetectError::LevelMismatch {
            expected: Level::Component,
            actual: component_graph.level(),
        });
    }
    let version = file_graph.version_index();
    let mut diagnostics = Vec::new();
    let file_metrics = compute_metrics(file_graph, &cfg.pagerank);
    let component_metrics = compute_metrics(component_graph, &cfg.pagerank);
    for (graph, metrics) in
        [(file_graph, &file_metrics), (component_graph, &component_metrics)]
    {
        if !metrics.pagerank_converged {
            diagnostics.push(Diagnostic::new(
                crate::diag::DiagnosticKind::PagerankNotConverged,
                format!(
                    "PageRank on the {} graph of version {version} hit the iteration cap",
                    graph.level()
                ),
            ));
        }
    }

    let mut instances = Vec::new();

    // Cycles, both levels.
    let limits = CycleLimits { max_len: cfg.cd_max_len, max_count: cfg.cd_max_count };
    let mut file_cycle_members: Vec<BTreeSet<String>> = Vec::new();
    for (graph, metrics) in
        [(file_graph, &file_metrics), (component_graph, &component_metrics)]
    {
        let (cycles, truncation) = find_cycles(graph, cfg.cd_mode, &limits);
        diagnostics.extend(truncation);
        for members in cycles {
            let paths: BTreeSet<String> =
                members.iter().map(|&i| graph.node(i).path.clone()).collect();
            if graph.level() == Level::File {
                file_cycle_members.push(paths.clone());
            }
            // The file graph is handled first, so by the time component
            // cycles are classified the file cycle list is complete.
            let design = affected_design_level(
                &paths,
                graph.level(),
                file_graph,
                component_graph,
                &file_cycle_members,
            );
            let mut chars = cycle_characteristics(graph, &members, metrics)?;
            chars.insert(
                characteristic::DESIGN_LEVEL.into(),
                CharValue::Tag(design.tag().into()),
            );
            instances.push(SmellInstance::new(
                SmellType::CyclicDependency,
                graph.level(),
                version,
                BTreeMap::from([(Role::Member, paths)]),
                chars,
            ));
        }
    }

    // Hub-like dependencies, both levels.
    for (graph, metrics) in
        [(file_graph, &file_metrics), (component_graph, &component_metrics)]
    {
        for centre in detect_hublike(graph, metrics) {
            let centre_path = graph.node(centre).path.clone();
            let incoming: BTreeSet<String> =
                graph.in_neighbors(centre).iter().map(|&i| graph.node(i).path.clone()).collect();
            let outgoing: BTreeSet<String> =
                graph.out_neighbors(centre).iter().map(|&i| graph.node(i).path.clone()).collect();
            let mut roles = BTreeMap::from([
                (Role::Centre, BTreeSet::from([centre_path.clone()])),
                (Role::Incoming, incoming),
                (Role::Outgoing, outgoing),
            ]);
            roles.retain(|_, set| !set.is_empty());
            let affected: BTreeSet<String> = roles.values().flatten().cloned().collect();
            let members: Vec<usize> =
                affected.iter().map(|p| graph.index_of(p).expect("role paths exist")).collect();
            let mut chars = BTreeMap::from([
                (characteristic::SIZE.to_string(), CharValue::Num(affected.len() as f64)),
                (
                    characteristic::NUM_EDGES.to_string(),
                    CharValue::Num(induced_edge_count(graph, &members) as f64),
                ),
                (
                    characteristic::CENTRALITY.to_string(),
                    CharValue::Num(smell_centrality(
                        affected.iter().map(String::as_str),
                        graph,
                        &metrics.pagerank,
                    )?),
                ),
            ]);
            if graph.level() == Level::Component {
                let ratios = compute_hl_ratios(&centre_path, file_graph)?;
                chars.insert(
                    characteristic::AFFECTED_RATIO.into(),
                    CharValue::Num(ratios.affected),
                );
                chars.insert(
                    characteristic::AFFERENT_RATIO.into(),
                    CharValue::Num(ratios.afferent),
                );
                chars.insert(
                    characteristic::EFFERENT_RATIO.into(),
                    CharValue::Num(ratios.efferent),
                );
            }
            instances.push(SmellInstance::new(
                SmellType::HubLikeDependency,
                graph.level(),
                version,
                roles,
                chars,
            ));
        }
    }

    // Unstable dependencies, component level only.
    for finding in detect_unstable(component_graph, &component_metrics, cfg.ud_threshold)? {
        let centre = component_graph.node(finding.centre).path.clone();
        let less_stable: BTreeSet<String> = finding
            .less_stable
            .iter()
            .map(|&i| component_graph.node(i).path.clone())
            .collect();
        let affected: BTreeSet<String> =
            less_stable.iter().cloned().chain([centre.clone()]).collect();
        let members: Vec<usize> = affected
            .iter()
            .map(|p| component_graph.index_of(p).expect("role paths exist"))
            .collect();
        let chars = BTreeMap::from([
            (characteristic::SIZE.to_string(), CharValue::Num(affected.len() as f64)),
            (
                characteristic::NUM_EDGES.to_string(),
                CharValue::Num(induced_edge_count(component_graph, &members) as f64),
            ),
            (
                characteristic::CENTRALITY.to_string(),
                CharValue::Num(smell_centrality(
                    affected.iter().map(String::as_str),
                    component_graph,
                    &component_metrics.pagerank,
                )?),
            ),
            (characteristic::STRENGTH.to_string(), CharValue::Num(finding.strength)),
            (
                characteristic::INSTABILITY_GAP.to_string(),
                CharValue::Num(finding.instability_gap),
            ),
        ]);
        instances.push(SmellInstance::new(
            SmellType::UnstableDependency,
            Level::Component,
            version,
            BTreeMap::from([
                (Role::Centre, BTreeSet::from([centre])),
                (Role::LessStable, less_stable),
            ]),
            chars,
        ));
    }

    // God components.
    let member_counts = component_member_counts(file_graph);
    let (gods, gc_diag) =
        detect_god_components(component_graph, &member_counts, cfg.gc_min_loc)?;
    diagnostics.extend(gc_diag);
    for finding in gods {
        let path = component_graph.node(finding.component).path.clone();
        let chars = BTreeMap::from([
            (characteristic::SIZE.to_string(), CharValue::Num(finding.file_count as f64)),
            (characteristic::NUM_EDGES.to_string(), CharValue::Num(0.0)),
            (characteristic::LOC_DENSITY.to_string(), CharValue::Num(finding.loc_density)),
            (
                characteristic::CENTRALITY.to_string(),
                CharValue::Num(smell_centrality(
                    [path.as_str()],
                    component_graph,
                    &component_metrics.pagerank,
                )?),
            ),
        ]);
        instances.push(SmellInstance::new(
            SmellType::GodComponent,
            Level::Component,
            version,
            BTreeMap::from([(Role::Member, BTreeSet::from([path]))]),
            chars,
        ));
    }

    instances.sort_by(|a, b| {
        (a.level, a.smell_type, a.affected())
            .cmp(&(b.level, b.smell_type, b.affected()))
    });
    Ok(DetectOutcome { instances, diagnostics })
}

/// File counts per component, for god-component sizing.
pub fn component_member_counts(file_graph: &DependencyGraph) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for node in file_graph.nodes() {
        if let Some(c) = &node.component {
            *counts.entry(c.clone()).or_insert(0) += 1;
        }
    }
    counts
}

fn cycle_characteristics(
    graph: &DependencyGraph,
    members: &[usize],
    metrics: &GraphMetrics,
) -> Result<BTreeMap<String, CharValue>, DetectError> {
    let member_set: BTreeSet<usize> = members.iter().copied().collect();
    let edges: BTreeSet<(usize, usize)> = induced_edges(graph, &member_set);
    let shape = classify_shape(members.len(), &relabel(&member_set, &edges))?;
    let paths: Vec<&str> = members.iter().map(|&i| graph.node(i).path.as_str()).collect();
    Ok(BTreeMap::from([
        (characteristic::SIZE.to_string(), CharValue::Num(members.len() as f64)),
        (characteristic::NUM_EDGES.to_string(), CharValue::Num(edges.len() as f64)),
        (characteristic::SHAPE.to_string(), CharValue::Tag(shape.tag().into())),
        (
            characteristic::CENTRALITY.to_string(),
            CharValue::Num(smell_centrality(paths, graph, &metrics.pagerank)?),
        ),
    ]))
}

fn induced_edges(graph: &DependencyGraph, members: &BTreeSet<usize>) -> BTreeSet<(usize, usize)> {
    let mut edges = BTreeSet::new();
    for &m in members {
        for &d in graph.out_neighbors(m) {
            if members.contains(&d) {
                edges.insert((m, d));
            }
        }
    }
    edges
}

fn induced_edge_count(graph: &DependencyGraph, members: &[usize]) -> usize {
    let set: BTreeSet<usize> = members.iter().copied().collect();
    induced_edges(graph, &set).len()
}

/// Relabels member indices to 0..n for the shape classifier.
fn relabel(members: &BTreeSet<usize>, edges: &BTreeSet<(usize, usize)>) -> BTreeSet<(usize, usize)> {
    let order: Vec<usize> = members.iter().copied().collect();
    let index: BTreeMap<usize, usize> =
        order.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    edges.iter().map(|&(s, d)| (index[&s], index[&d])).collect()
}
