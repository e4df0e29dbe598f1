//! Typed dependency graphs and their line-oriented interchange format.
//!
//! Everything downstream — metrics, smell detection, tracking, evolution
//! analysis — operates on [`DependencyGraph`] values. A graph lives at one
//! [`Level`] (file or component), keeps its nodes in canonical path order,
//! and stores edges as adjacency lists over dense node indices. Edges point
//! from the dependant to its dependency: `a.c → b.c` means `a.c` needs
//! `b.c`.
//!
//! Graphs round-trip through a plain-text format (`V`/`N`/`E` records, one
//! per line) so pipeline stages can be run and inspected independently; see
//! [`DependencyGraph::save`] for the grammar.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The abstraction level a graph (or artefact) lives at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    /// Implementation source files.
    File,
    /// Components: top-level directories grouping files.
    Component,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::File => write!(f, "file"),
            Level::Component => write!(f, "component"),
        }
    }
}

impl std::str::FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "file" => Ok(Level::File),
            "component" => Ok(Level::Component),
            other => Err(format!("unknown level `{other}`")),
        }
    }
}

/// A level-qualified artefact name, used wherever smells reference the
/// artefacts they affect.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ArtefactId {
    pub level: Level,
    pub path: String,
}

impl ArtefactId {
    pub fn new(level: Level, path: impl Into<String>) -> Self {
        ArtefactId { level, path: path.into() }
    }
}

impl fmt::Display for ArtefactId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.level, self.path)
    }
}

/// One node of a dependency graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    /// Project-relative path (`/`-separated) identifying the artefact.
    pub path: String,
    /// Non-blank, non-comment line count. For component nodes this is the
    /// sum over member files.
    pub loc: u64,
    /// Owning component path; set on file-level nodes, `None` on
    /// component-level nodes.
    pub component: Option<String>,
}

/// Input record for [`DependencyGraph::build`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSpec {
    pub path: String,
    pub loc: u64,
    pub component: Option<String>,
}

impl NodeSpec {
    pub fn new(path: impl Into<String>, loc: u64) -> Self {
        NodeSpec { path: path.into(), loc, component: None }
    }

    pub fn with_component(mut self, component: impl Into<String>) -> Self {
        self.component = Some(component.into());
        self
    }
}

/// Errors raised while constructing or transforming graphs.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge references missing node: `{src}` -> `{dst}`")]
    DanglingEdge { src: String, dst: String },
    #[error("operation requires a {expected}-level graph, got {actual}")]
    LevelMismatch { expected: Level, actual: Level },
    #[error("file node `{path}` has no component assigned")]
    MissingComponent { path: String },
    #[error("duplicate node `{path}`")]
    DuplicateNode { path: String },
    #[error("invalid node path `{path}`: {reason}")]
    InvalidPath { path: String, reason: String },
}

/// Error raised while parsing the interchange format.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct FormatError {
    pub line: usize,
    pub msg: String,
}

/// A directed dependency graph at one abstraction level.
///
/// Nodes are held in canonical order (sorted by path) and addressed by dense
/// `usize` indices; adjacency lists are sorted, deduplicated, and free of
/// self-loops. Two graphs built from the same records compare equal and
/// serialize byte-identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependencyGraph {
    level: Level,
    version_index: usize,
    version_label: String,
    nodes: Vec<Node>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
    edge_count: usize,
}

impl DependencyGraph {
    /// Builds a graph from node specs and path-addressed edges.
    ///
    /// Paths are normalized (backslashes to `/`, leading `./` and trailing
    /// `/` stripped). Self-loops are dropped and duplicate edges
    /// deduplicated; an edge mentioning an unknown path is an error, as is a
    /// duplicate or empty node path.
    pub fn build(
        level: Level,
        version_index: usize,
        version_label: impl Into<String>,
        nodes: Vec<NodeSpec>,
        edges: Vec<(String, String)>,
    ) -> Result<Self, GraphError> {
        let mut specs = Vec::with_capacity(nodes.len());
        for spec in nodes {
            let path = normalize_path(&spec.path).ok_or_else(|| GraphError::InvalidPath {
                path: spec.path.clone(),
                reason: "path is empty after normalization".into(),
            })?;
            let component = match spec.component {
                Some(c) => Some(normalize_path(&c).ok_or_else(|| GraphError::InvalidPath {
                    path: c.clone(),
                    reason: "component path is empty after normalization".into(),
                })?),
                None => None,
            };
            specs.push(Node { path, loc: spec.loc, component });
        }
        specs.sort_by(|a, b| a.path.cmp(&b.path));
        for pair in specs.windows(2) {
            if pair[0].path == pair[1].path {
                return Err(GraphError::DuplicateNode { path: pair[0].path.clone() });
            }
        }

        let index_of = |path: &str| specs.binary_search_by(|n| n.path.as_str().cmp(path)).ok();
        let mut edge_set = BTreeSet::new();
        for (src, dst) in &edges {
            let src = normalize_path(src).unwrap_or_default();
            let dst = normalize_path(dst).unwrap_or_default();
            let si = index_of(&src).ok_or_else(|| GraphError::DanglingEdge {
                src: src.clone(),
                dst: dst.clone(),
            })?;
            let di = index_of(&dst).ok_or_else(|| GraphError::DanglingEdge {
                src: src.clone(),
                dst: dst.clone(),
            })?;
            if si != di {
                edge_set.insert((si, di));
            }
        }

        let mut out_edges = vec![Vec::new(); specs.len()];
        let mut in_edges = vec![Vec::new(); specs.len()];
        for &(s, d) in &edge_set {
            out_edges[s].push(d);
            in_edges[d].push(s);
        }
        for list in &mut in_edges {
            list.sort_unstable();
        }

        Ok(DependencyGraph {
            level,
            version_index,
            version_label: version_label.into(),
            nodes: specs,
            out_edges,
            in_edges,
            edge_count: edge_set.len(),
        })
    }

    /// Builds an empty graph (no nodes, no edges) at the given level.
    pub fn empty(level: Level) -> Self {
        DependencyGraph {
            level,
            version_index: 0,
            version_label: String::new(),
            nodes: Vec::new(),
            out_edges: Vec::new(),
            in_edges: Vec::new(),
            edge_count: 0,
        }
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn version_index(&self) -> usize {
        self.version_index
    }

    pub fn set_version_index(&mut self, index: usize) {
        self.version_index = index;
    }

    pub fn version_label(&self) -> &str {
        &self.version_label
    }

    pub fn set_version_label(&mut self, label: impl Into<String>) {
        self.version_label = label.into();
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Nodes in canonical (path-sorted) order; indices into this slice are
    /// the node ids used everywhere else.
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, idx: usize) -> &Node {
        &self.nodes[idx]
    }

    /// Dense id of the node with this path, if present.
    pub fn index_of(&self, path: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.path.as_str().cmp(path)).ok()
    }

    /// Outgoing neighbors (dependencies) of a node, ascending.
    pub fn out_neighbors(&self, idx: usize) -> &[usize] {
        &self.out_edges[idx]
    }

    /// Incoming neighbors (dependants) of a node, ascending.
    pub fn in_neighbors(&self, idx: usize) -> &[usize] {
        &self.in_edges[idx]
    }

    pub fn contains_edge(&self, src: usize, dst: usize) -> bool {
        self.out_edges[src].binary_search(&dst).is_ok()
    }

    /// All edges in canonical `(src, dst)` order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out_edges
            .iter()
            .enumerate()
            .flat_map(|(s, dsts)| dsts.iter().map(move |&d| (s, d)))
    }

    /// The artefact id of a node.
    pub fn artefact(&self, idx: usize) -> ArtefactId {
        ArtefactId::new(self.level, self.nodes[idx].path.clone())
    }

    /// Projects a file-level graph onto its components.
    ///
    /// Component `C1` depends on `C2` when some member file of `C1` depends
    /// on some member file of `C2` and `C1 != C2`; a component's `loc` is
    /// the sum over its member files. Every file node must carry a
    /// component assignment.
    pub fn project_to_components(&self) -> Result<DependencyGraph, GraphError> {
        if self.level != Level::File {
            return Err(GraphError::LevelMismatch { expected: Level::File, actual: self.level });
        }
        let mut loc_by_component: BTreeMap<&str, u64> = BTreeMap::new();
        let mut component_of = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let comp = node.component.as_deref().ok_or_else(|| GraphError::MissingComponent {
                path: node.path.clone(),
            })?;
            *loc_by_component.entry(comp).or_insert(0) += node.loc;
            component_of.push(comp);
        }
        let mut edges = Vec::new();
        for (s, d) in self.edges() {
            let (cs, cd) = (component_of[s], component_of[d]);
            if cs != cd {
                edges.push((cs.to_string(), cd.to_string()));
            }
        }
        let nodes = loc_by_component
            .into_iter()
            .map(|(path, loc)| NodeSpec::new(path, loc))
            .collect();
        DependencyGraph::build(
            Level::Component,
            self.version_index,
            self.version_label.clone(),
            nodes,
            edges,
        )
    }

    /// Writes the graph in the interchange format.
    ///
    /// The format is line oriented; fields are space separated and `%`/space
    /// characters inside paths are escaped as `%25`/`%20`:
    ///
    /// ```text
    /// # comment (ignored), blank lines ignored
    /// V <version-label>
    /// N <level> <path> <loc> [component-path]
    /// E <src-path> <dst-path>
    /// ```
    ///
    /// Output is canonical — nodes sorted by path, edges by `(src, dst)` —
    /// so saving the same graph twice yields identical bytes.
    pub fn save<W: Write>(&self, mut sink: W) -> io::Result<()> {
        if !self.version_label.is_empty() {
            writeln!(sink, "V {}", self.version_label)?;
        }
        for node in &self.nodes {
            match &node.component {
                Some(c) => writeln!(
                    sink,
                    "N {} {} {} {}",
                    self.level,
                    escape_path(&node.path),
                    node.loc,
                    escape_path(c)
                )?,
                None => {
                    writeln!(sink, "N {} {} {}", self.level, escape_path(&node.path), node.loc)?
                }
            }
        }
        for (s, d) in self.edges() {
            writeln!(
                sink,
                "E {} {}",
                escape_path(&self.nodes[s].path),
                escape_path(&self.nodes[d].path)
            )?;
        }
        Ok(())
    }

    /// Renders the interchange format into a string.
    pub fn save_to_string(&self) -> String {
        let mut buf = Vec::new();
        self.save(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("interchange output is UTF-8")
    }

    /// Parses a graph from the interchange format.
    ///
    /// An empty source yields an empty file-level graph. Unknown record
    /// tags, wrong arities, bad numbers, duplicate `V` records, mixed node
    /// levels, and edges naming unknown nodes are all reported as a
    /// [`FormatError`] carrying the offending line number.
    pub fn load<R: BufRead>(source: R) -> Result<DependencyGraph, FormatError> {
        let mut label: Option<(usize, String)> = None;
        let mut level: Option<(usize, Level)> = None;
        let mut nodes: Vec<NodeSpec> = Vec::new();
        let mut edges: Vec<(usize, String, String)> = Vec::new();

        for (lineno, line) in source.lines().enumerate() {
            let lineno = lineno + 1;
            let line = line.map_err(|e| FormatError { line: lineno, msg: e.to_string() })?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let tag = fields.next().expect("non-empty line has a first field");
            match tag {
                "V" => {
                    let rest = line[1..].trim();
                    if rest.is_empty() {
                        return Err(FormatError { line: lineno, msg: "V record needs a label".into() });
                    }
                    if label.is_some() {
                        return Err(FormatError { line: lineno, msg: "duplicate V record".into() });
                    }
                    label = Some((lineno, rest.to_string()));
                }
                "N" => {
                    let lvl: Level = fields
                        .next()
                        .ok_or_else(|| arity(lineno, "N", "level"))?
                        .parse()
                        .map_err(|e| FormatError { line: lineno, msg: e })?;
                    let path = unescape_path(fields.next().ok_or_else(|| arity(lineno, "N", "path"))?);
                    let loc: u64 = fields
                        .next()
                        .ok_or_else(|| arity(lineno, "N", "loc"))?
                        .parse()
                        .map_err(|e| FormatError { line: lineno, msg: format!("bad loc: {e}") })?;
                    let component = fields.next().map(unescape_path);
                    if let Some(extra) = fields.next() {
                        return Err(FormatError {
                            line: lineno,
                            msg: format!("unexpected trailing field `{extra}` in N record"),
                        });
                    }
                    match level {
                        None => level = Some((lineno, lvl)),
                        Some((_, seen)) if seen != lvl => {
                            return Err(FormatError {
                                line: lineno,
                                msg: format!("node level {lvl} conflicts with earlier {seen}"),
                            })
                        }
                        Some(_) => {}
                    }
                    let mut spec = NodeSpec::new(path, loc);
                    spec.component = component;
                    nodes.push(spec);
                }
                "E" => {
                    let src = unescape_path(fields.next().ok_or_else(|| arity(lineno, "E", "src"))?);
                    let dst = unescape_path(fields.next().ok_or_else(|| arity(lineno, "E", "dst"))?);
                    if let Some(extra) = fields.next() {
                        return Err(FormatError {
                            line: lineno,
                            msg: format!("unexpected trailing field `{extra}` in E record"),
                        });
                    }
                    edges.push((lineno, src, dst));
                }
                other => {
                    return Err(FormatError {
                        line: lineno,
                        msg: format!("unknown record tag `{other}`"),
                    })
                }
            }
        }

        let level = level.map(|(_, l)| l).unwrap_or(Level::File);
        let label = label.map(|(_, l)| l).unwrap_or_default();
        let edge_lines: BTreeMap<(String, String), usize> = edges
            .iter()
            .map(|(line, s, d)| ((s.clone(), d.clone()), *line))
            .collect();
        DependencyGraph::build(
            level,
            0,
            label,
            nodes,
            edges.into_iter().map(|(_, s, d)| (s, d)).collect(),
        )
        .map_err(|e| {
            let line = match &e {
                GraphError::DanglingEdge { src, dst } => edge_lines
                    .get(&(src.clone(), dst.clone()))
                    .copied()
                    .unwrap_or(0),
                _ => 0,
            };
            FormatError { line, msg: e.to_string() }
        })
    }
}

fn arity(line: usize, tag: &str, field: &str) -> FormatError {
    FormatError { line, msg: format!("{tag} record is missing the {field} field") }
}

impl DependencyGraph {
    /// Strongly connected components of this graph; see
    /// [`strongly_connected_components`].
    pub fn tarjan_scc(&self) -> Vec<Vec<usize>> {
        strongly_connected_components(&self.out_edges)
    }
}

/// Strongly connected components of an adjacency-list digraph (Tarjan,
/// iterative so deep graphs cannot overflow the stack).
///
/// Every node appears in exactly one component; members are sorted
/// ascending. Components come out in reverse topological order of the
/// condensation: by the time a component is emitted, all components it can
/// reach have been emitted already.
pub fn strongly_connected_components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut components = Vec::new();
    // Explicit call stack of (node, next-edge cursor) frames.
    let mut frames: Vec<(usize, usize)> = Vec::new();

    for start in 0..n {
        if index[start] != UNVISITED {
            continue;
        }
        index[start] = next_index;
        low[start] = next_index;
        next_index += 1;
        stack.push(start);
        on_stack[start] = true;
        frames.push((start, 0));

        while let Some(frame) = frames.last_mut() {
            let (v, cursor) = (frame.0, frame.1);
            if cursor < adj[v].len() {
                frame.1 += 1;
                let w = adj[v][cursor];
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(parent) = frames.last() {
                    let p = parent.0;
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut component = Vec::new();
                    loop {
                        let w = stack.pop().expect("Tarjan stack cannot underflow");
                        on_stack[w] = false;
                        component.push(w);
                        if w == v {
                            break;
                        }
                    }
                    component.sort_unstable();
                    components.push(component);
                }
            }
        }
    }
    components
}

/// Saves `graph` to `sink` in the interchange format.
pub fn save_graph<W: Write>(graph: &DependencyGraph, sink: W) -> io::Result<()> {
    graph.save(sink)
}

/// Loads a graph from an interchange-format source.
pub fn load_graph<R: BufRead>(source: R) -> Result<DependencyGraph, FormatError> {
    DependencyGraph::load(source)
}

/// Normalizes a path: `\` to `/`, strips leading `./` and trailing or
/// repeated `/`. Returns `None` when nothing is left.
pub fn normalize_path(path: &str) -> Option<String> {
    let replaced = path.replace('\\', "/");
    let mut parts: Vec<&str> = replaced.split('/').filter(|p| !p.is_empty()).collect();
    while parts.first() == Some(&".") && parts.len() > 1 {
        parts.remove(0);
    }
    if parts.is_empty() {
        None
    } else {
        Some(parts.join("/"))
    }
}

fn escape_path(path: &str) -> String {
    path.replace('%', "%25").replace(' ', "%20")
}

fn unescape_path(field: &str) -> String {
    field.replace("%20", " ").replace("%25", "%")
}

/// All snapshots of one project, file and component graphs side by side.
#[derive(Debug, Clone)]
pub struct VersionSeries {
    pub project_id: String,
    pub versions: Vec<VersionGraphs>,
}

/// The two graphs extracted from one snapshot.
#[derive(Debug, Clone)]
pub struct VersionGraphs {
    pub file: DependencyGraph,
    pub component: DependencyGraph,
}

impl VersionSeries {
    /// Assembles a series, checking that versions are indexed 0..n at the
    /// expected levels.
    pub fn new(project_id: impl Into<String>, versions: Vec<VersionGraphs>) -> Result<Self, GraphError> {
        for (i, v) in versions.iter().enumerate() {
            if v.file.level() != Level::File {
                return Err(GraphError::LevelMismatch { expected: Level::File, actual: v.file.level() });
            }
            if v.component.level() != Level::Component {
                return Err(GraphError::LevelMismatch {
                    expected: Level::Component,
                    actual: v.component.level(),
                });
            }
            debug_assert_eq!(v.file.version_index(), i, "file graph index out of order");
            debug_assert_eq!(v.component.version_index(), i, "component graph index out of order");
        }
        Ok(VersionSeries { project_id: project_id.into(), versions })
    }

    pub fn len(&self) -> usize {
        self.versions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.versions.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn graph(
        level: Level,
        nodes: &[(&str, u64, Option<&str>)],
        edges: &[(&str, &str)],
    ) -> DependencyGraph {
        let nodes = nodes
            .iter()
            .map(|(p, loc, c)| NodeSpec {
                path: p.to_string(),
                loc: *loc,
                component: c.map(str::to_string),
            })
            .collect();
        let edges = edges.iter().map(|(s, d)| (s.to_string(), d.to_string())).collect();
        DependencyGraph::build(level, 0, "", nodes, edges).unwrap()
    }

    #[test]
    fn build_drops_self_loops_and_duplicate_edges() {
        let g = graph(
            Level::File,
            &[("a.c", 1, None), ("b.c", 1, None)],
            &[("a.c", "b.c"), ("a.c", "b.c"), ("a.c", "a.c")],
        );
        assert_eq!(g.edge_count(), 1);
        let (a, b) = (g.index_of("a.c").unwrap(), g.index_of("b.c").unwrap());
        assert!(g.contains_edge(a, b));
        assert!(!g.contains_edge(a, a));
    }

    #[test]
    fn build_rejects_dangling_edges() {
        let err = DependencyGraph::build(
            Level::File,
            0,
            "",
            vec![NodeSpec::new("a.c", 1)],
            vec![("a.c".into(), "ghost.c".into())],
        )
        .unwrap_err();
        assert_eq!(err, GraphError::DanglingEdge { src: "a.c".into(), dst: "ghost.c".into() });
    }

    #[test]
    fn build_rejects_duplicate_nodes() {
        let err = DependencyGraph::build(
            Level::File,
            0,
            "",
            vec![NodeSpec::new("a.c", 1), NodeSpec::new("./a.c", 2)],
            vec![],
        )
        .unwrap_err();
        assert_eq!(err, GraphError::DuplicateNode { path: "a.c".into() });
    }

    #[test]
    fn nodes_are_sorted_by_path() {
        let g = graph(Level::File, &[("z.c", 1, None), ("a.c", 1, None), ("m.c", 1, None)], &[]);
        let paths: Vec<&str> = g.nodes().iter().map(|n| n.path.as_str()).collect();
        assert_eq!(paths, ["a.c", "m.c", "z.c"]);
    }

    #[test]
    fn projection_merges_edges_and_sums_loc() {
        // x.c (C1) -> y.c (C2), z.c (C2) -> y.c (C2): one cross edge, no
        // self-dependency for C2.
        let g = graph(
            Level::File,
            &[("x.c", 10, Some("C1")), ("y.c", 20, Some("C2")), ("z.c", 5, Some("C2"))],
            &[("x.c", "y.c"), ("z.c", "y.c")],
        );
        let c = g.project_to_components().unwrap();
        assert_eq!(c.level(), Level::Component);
        assert_eq!(c.node_count(), 2);
        assert_eq!(c.edge_count(), 1);
        let c1 = c.index_of("C1").unwrap();
        let c2 = c.index_of("C2").unwrap();
        assert!(c.contains_edge(c1, c2));
        assert_eq!(c.node(c1).loc, 10);
        assert_eq!(c.node(c2).loc, 25);
    }

    #[test]
    fn projection_requires_components_everywhere() {
        let g = graph(Level::File, &[("x.c", 1, Some("C1")), ("y.c", 1, None)], &[]);
        assert_eq!(
            g.project_to_components().unwrap_err(),
            GraphError::MissingComponent { path: "y.c".into() }
        );
    }

    #[test]
    fn projection_rejects_component_graphs() {
        let g = graph(Level::Component, &[("C1", 1, None)], &[]);
        assert_eq!(
            g.project_to_components().unwrap_err(),
            GraphError::LevelMismatch { expected: Level::File, actual: Level::Component }
        );
    }

    #[test]
    fn save_load_round_trips() {
        let g = DependencyGraph::build(
            Level::File,
            0,
            "v1.2",
            vec![
                NodeSpec::new("src/a.c", 10).with_component("src"),
                NodeSpec::new("src/b.c", 20).with_component("src"),
                NodeSpec::new("lib/c file.c", 3).with_component("lib"),
            ],
            vec![
                ("src/a.c".into(), "src/b.c".into()),
                ("src/b.c".into(), "lib/c file.c".into()),
            ],
        )
        .unwrap();
        let text = g.save_to_string();
        let loaded = DependencyGraph::load(text.as_bytes()).unwrap();
        assert_eq!(loaded, g);
        assert_eq!(loaded.save_to_string(), text);
        assert_eq!(loaded.version_label(), "v1.2");
    }

    #[test]
    fn load_of_empty_source_is_empty_file_graph() {
        let g = DependencyGraph::load("".as_bytes()).unwrap();
        assert_eq!(g.level(), Level::File);
        assert_eq!(g.node_count(), 0);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn load_skips_comments_and_blanks() {
        let text = "# comment\n\nN file a.c 1\n  \n# more\n";
        let g = DependencyGraph::load(text.as_bytes()).unwrap();
        assert_eq!(g.node_count(), 1);
    }

    #[test]
    fn load_reports_line_numbers() {
        let text = "N file a.c 1\nX what\n";
        let err = DependencyGraph::load(text.as_bytes()).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.msg.contains("unknown record tag"));

        let text = "N file a.c\n";
        let err = DependencyGraph::load(text.as_bytes()).unwrap_err();
        assert_eq!(err.line, 1);

        let text = "N file a.c ten\n";
        let err = DependencyGraph::load(text.as_bytes()).unwrap_err();
        assert!(err.msg.contains("bad loc"));

        let text = "N file a.c 1\nE a.c ghost.c\n";
        let err = DependencyGraph::load(text.as_bytes()).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.msg.contains("missing node"));
    }

    #[test]
    fn load_rejects_duplicate_version_records() {
        let err = DependencyGraph::load("V one\nV two\n".as_bytes()).unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn load_rejects_mixed_levels() {
        let err = DependencyGraph::load("N file a.c 1\nN component C1 1\n".as_bytes()).unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn version_labels_may_contain_spaces() {
        let g = DependencyGraph::load("V release 1.0 beta\n".as_bytes()).unwrap();
        assert_eq!(g.version_label(), "release 1.0 beta");
    }

    #[test]
    fn normalize_path_examples() {
        assert_eq!(normalize_path("./src//a.c").as_deref(), Some("src/a.c"));
        assert_eq!(normalize_path("src\\win.c").as_deref(), Some("src/win.c"));
        assert_eq!(normalize_path("src/"), Some("src".into()));
        assert_eq!(normalize_path("."), Some(".".into()));
        assert_eq!(normalize_path(""), None);
        assert_eq!(normalize_path("//"), None);
    }

    /// Strategy: a small file-level graph with components, arbitrary edges.
    fn arb_file_graph() -> impl Strategy<Value = DependencyGraph> {
        (2usize..10).prop_flat_map(|n| {
            let nodes: Vec<usize> = (0..n).collect();
            let comps = proptest::collection::vec(0usize..4, n);
            let edges = proptest::collection::vec((0..n, 0..n), 0..n * 3);
            (comps, edges).prop_map(move |(comps, edges)| {
                let specs = nodes
                    .iter()
                    .map(|&i| {
                        NodeSpec::new(format!("f{i}.c"), (i as u64 + 1) * 3)
                            .with_component(format!("c{}", comps[i]))
                    })
                    .collect();
                let edges = edges
                    .into_iter()
                    .map(|(s, d)| (format!("f{s}.c"), format!("f{d}.c")))
                    .collect();
                DependencyGraph::build(Level::File, 0, "t", specs, edges).unwrap()
            })
        })
    }

    #[test]
    fn tarjan_finds_the_textbook_components() {
        // 0 -> 1 -> 2 -> 0 is one component; 3 -> 4 are singletons.
        let adj = vec![vec![1], vec![2], vec![0], vec![4], vec![]];
        let comps = strongly_connected_components(&adj);
        assert!(comps.contains(&vec![0, 1, 2]));
        assert!(comps.contains(&vec![3]));
        assert!(comps.contains(&vec![4]));
        assert_eq!(comps.len(), 3);
    }

    #[test]
    fn tarjan_emits_components_in_reverse_topological_order() {
        // 0 -> 1, both singletons: 1 must be emitted before 0.
        let comps = strongly_connected_components(&[vec![1], vec![]]);
        assert_eq!(comps, vec![vec![1], vec![0]]);
    }

    #[test]
    fn tarjan_survives_a_deep_path_graph() {
        // A recursive Tarjan would blow the stack here.
        let n = 200_000;
        let adj: Vec<Vec<usize>> = (0..n).map(|i| if i + 1 < n { vec![i + 1] } else { vec![] }).collect();
        assert_eq!(strongly_connected_components(&adj).len(), n);
    }

    /// Brute-force reachability closure for cross-checking Tarjan.
    fn reachability(adj: &[Vec<usize>]) -> Vec<Vec<bool>> {
        let n = adj.len();
        let mut reach = vec![vec![false; n]; n];
        for (v, row) in reach.iter_mut().enumerate() {
            row[v] = true;
        }
        for (v, dsts) in adj.iter().enumerate() {
            for &d in dsts {
                reach[v][d] = true;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if reach[i][k] && reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
        reach
    }

    proptest! {
        #[test]
        fn tarjan_agrees_with_mutual_reachability(
            n in 1usize..8,
            edges in proptest::collection::vec((0usize..8, 0usize..8), 0..24),
        ) {
            let mut adj = vec![Vec::new(); n];
            for (s, d) in edges {
                if s < n && d < n && s != d {
                    adj[s].push(d);
                }
            }
            let reach = reachability(&adj);
            let comps = strongly_connected_components(&adj);
            // Partition: every node in exactly one component.
            let mut seen = vec![0usize; n];
            for comp in &comps {
                for &v in comp {
                    seen[v] += 1;
                }
            }
            prop_assert!(seen.iter().all(|&c| c == 1));
            // Same component iff mutually reachable.
            let comp_of = {
                let mut c = vec![0usize; n];
                for (i, comp) in comps.iter().enumerate() {
                    for &v in comp {
                        c[v] = i;
                    }
                }
                c
            };
            for a in 0..n {
                for b in 0..n {
                    let mutual = reach[a][b] && reach[b][a];
                    prop_assert_eq!(comp_of[a] == comp_of[b], mutual);
                }
            }
        }

        #[test]
        fn projection_never_multiplies_edges(g in arb_file_graph()) {
            let c = g.project_to_components().unwrap();
            prop_assert!(c.edge_count() <= g.edge_count());
        }

        #[test]
        fn every_component_edge_has_a_witness(g in arb_file_graph()) {
            let c = g.project_to_components().unwrap();
            for (cs, cd) in c.edges() {
                let cs = &c.node(cs).path;
                let cd = &c.node(cd).path;
                let witness = g.edges().any(|(fs, fd)| {
                    g.node(fs).component.as_deref() == Some(cs)
                        && g.node(fd).component.as_deref() == Some(cd)
                });
                prop_assert!(witness, "edge {cs} -> {cd} lacks a file-level witness");
            }
        }

        #[test]
        fn round_trip_is_identity(g in arb_file_graph()) {
            let text = g.save_to_string();
            let loaded = DependencyGraph::load(text.as_bytes()).unwrap();
            prop_assert_eq!(&loaded, &g);
            prop_assert_eq!(loaded.save_to_string(), text);
        }

        #[test]
        fn save_is_deterministic(g in arb_file_graph()) {
            prop_assert_eq!(g.save_to_string(), g.save_to_string());
        }
    }
}
