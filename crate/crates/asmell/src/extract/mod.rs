//! Dependency-graph extraction from C/C++ snapshot directories.
//!
//! Extraction walks the configured roots of one snapshot, classifies files
//! as implementation or header by extension, counts their non-comment
//! lines, pulls `#include` directives, resolves them against the inventory,
//! and finally *hoists* header dependencies down onto implementation files:
//! every dependency through a header is re-attributed to the files
//! implementing that header, so the resulting graph contains
//! implementation files only. Components are the first directory level
//! under each scan root (overridable via a component map), and the
//! component graph is the projection of the hoisted file graph.

mod config;
mod hoist;
mod lang;
mod resolve;
mod scan;

pub use config::{glob_match, ConfigError, ExtractConfig};
pub use hoist::hoist_header_deps;
pub use lang::{count_loc, extract_includes, mask_comments, IncludeDirective, IncludeForm};
pub use resolve::{resolve_includes, ResolveOutcome};
pub use scan::scan_sources;

use std::path::Path;

use thiserror::Error;

use crate::diag::{Diagnostic, DiagnosticKind};
use crate::graph::{DependencyGraph, GraphError, NodeSpec};

/// How a source file participates in the dependency graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FileKind {
    /// Implementation file (`.c`, `.cpp`, ...): becomes a graph node.
    Impl,
    /// Header (`.h`, `.hpp`, ...): dissolved during hoisting.
    Header,
}

/// One file found while scanning a snapshot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    /// Snapshot-relative path, `/`-separated.
    pub path: String,
    pub kind: FileKind,
    /// Non-blank, non-comment line count.
    pub loc: u64,
    /// Component the file belongs to.
    pub component: String,
}

/// All source files of one snapshot, sorted by path.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SourceInventory {
    files: Vec<SourceFile>,
}

impl SourceInventory {
    /// Builds an inventory; files are sorted by path and must be unique.
    pub fn new(mut files: Vec<SourceFile>) -> Self {
        files.sort_by(|a, b| a.path.cmp(&b.path));
        files.dedup_by(|a, b| a.path == b.path);
        SourceInventory { files }
    }

    pub fn files(&self) -> &[SourceFile] {
        &self.files
    }

    pub fn get(&self, path: &str) -> Option<&SourceFile> {
        self.files
            .binary_search_by(|f| f.path.as_str().cmp(path))
            .ok()
            .map(|i| &self.files[i])
    }

    pub fn contains(&self, path: &str) -> bool {
        self.get(path).is_some()
    }

    pub fn len(&self) -> usize {
        self.files.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }
}

/// An `#include` directive attributed to the file containing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawInclude {
    /// Snapshot-relative path of the including file.
    pub from: String,
    /// Spec text between the delimiters.
    pub spec: String,
    pub form: IncludeForm,
    /// 1-based line in the including file.
    pub line: usize,
}

/// A file-level dependency graph that still contains header files: the
/// input to [`hoist_header_deps`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawFileGraph {
    pub inventory: SourceInventory,
    /// Resolved include edges, dependant first. Endpoints are inventory
    /// paths.
    pub edges: Vec<(String, String)>,
}

/// Errors that abort extraction of a snapshot.
#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("snapshot root `{path}` is not a directory")]
    NotADirectory { path: String },
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Counters describing one extraction, reported alongside the graphs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExtractionStats {
    pub impl_files: usize,
    pub header_files: usize,
    pub include_directives: usize,
    pub resolved_edges: usize,
    pub unresolved_includes: usize,
}

/// Everything extracted from one snapshot.
#[derive(Debug, Clone)]
pub struct ExtractionResult {
    pub file_graph: DependencyGraph,
    pub component_graph: DependencyGraph,
    pub diagnostics: Vec<Diagnostic>,
    /// Includes that matched nothing, for tallying and sampling.
    pub unresolved: Vec<RawInclude>,
    pub stats: ExtractionStats,
}

/// Runs the whole extraction for one snapshot directory: scan, resolve,
/// hoist, inject extra edges, project to components.
pub fn extract_snapshot(
    root: &Path,
    cfg: &ExtractConfig,
    version_index: usize,
    version_label: &str,
) -> Result<ExtractionResult, ExtractError> {
    let collected = scan::collect_sources(root, cfg)?;
    let mut diagnostics = collected.diagnostics;
    let include_count = collected.includes.len();

    let outcome = resolve_includes(&collected.inventory, &collected.includes, &cfg.include_roots);
    diagnostics.extend(outcome.diagnostics);

    let stats = ExtractionStats {
        impl_files: collected
            .inventory
            .files()
            .iter()
            .filter(|f| f.kind == FileKind::Impl)
            .count(),
        header_files: collected
            .inventory
            .files()
            .iter()
            .filter(|f| f.kind == FileKind::Header)
            .count(),
        include_directives: include_count,
        resolved_edges: outcome.edges.len(),
        unresolved_includes: outcome.unresolved.len(),
    };

    let raw = RawFileGraph { inventory: collected.inventory, edges: outcome.edges };
    let (hoisted, hoist_diags) = hoist_header_deps(&raw)?;
    diagnostics.extend(hoist_diags);

    let mut file_graph = if cfg.extra_edges.is_empty() {
        hoisted
    } else {
        inject_extra_edges(&hoisted, &cfg.extra_edges, &mut diagnostics)?
    };
    file_graph.set_version_index(version_index);
    file_graph.set_version_label(version_label);
    let component_graph = file_graph.project_to_components()?;

    Ok(ExtractionResult {
        file_graph,
        component_graph,
        diagnostics,
        unresolved: outcome.unresolved,
        stats,
    })
}

/// Rebuilds `graph` with manually configured edges added. Edges naming
/// files absent from the hoisted graph are skipped with a diagnostic.
fn inject_extra_edges(
    graph: &DependencyGraph,
    extra: &[(String, String)],
    diagnostics: &mut Vec<Diagnostic>,
) -> Result<DependencyGraph, ExtractError> {
    let mut edges: Vec<(String, String)> = graph
        .edges()
        .map(|(s, d)| (graph.node(s).path.clone(), graph.node(d).path.clone()))
        .collect();
    for (src, dst) in extra {
        if graph.index_of(src).is_none() || graph.index_of(dst).is_none() {
            diagnostics.push(Diagnostic::new(
                DiagnosticKind::UnknownEdgeEndpoint,
                format!("extra edge `{src}` -> `{dst}` names a file not in the hoisted graph"),
            ));
            continue;
        }
        edges.push((src.clone(), dst.clone()));
    }
    let nodes = graph
        .nodes()
        .iter()
        .map(|n| NodeSpec {
            path: n.path.clone(),
            loc: n.loc,
            component: n.component.clone(),
        })
        .collect();
    Ok(DependencyGraph::build(
        graph.level(),
        graph.version_index(),
        graph.version_label().to_string(),
        nodes,
        edges,
    )?)
}
