//! Cyclic-dependency enumeration: strongly connected components or
//! elementary cycles.

use std::collections::BTreeSet;
use std::fmt;

use crate::diag::{Diagnostic, DiagnosticKind};
use crate::graph::DependencyGraph;

/// How cyclic dependencies are grouped into instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdMode {
    /// One instance per strongly connected component with ≥ 2 nodes.
    Scc,
    /// One instance per elementary cycle (Johnson-style enumeration).
    /// Exponential in the worst case; see [`CycleLimits`].
    Elementary,
}

impl fmt::Display for CdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CdMode::Scc => "scc",
            CdMode::Elementary => "elementary",
        })
    }
}

impl std::str::FromStr for CdMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "scc" => Ok(CdMode::Scc),
            "elementary" => Ok(CdMode::Elementary),
            other => Err(format!("unknown cycle mode `{other}` (expected scc or elementary)")),
        }
    }
}

/// Caps for elementary-cycle enumeration; `0` means unlimited.
///
/// `max_len` filters which cycles are *recorded* (longer ones are walked
/// but dropped); `max_count` aborts the walk itself once that many cycles
/// have been enumerated, which bounds runtime on cycle-dense graphs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CycleLimits {
    pub max_len: usize,
    pub max_count: usize,
}

/// Finds cyclic-dependency member sets in one graph.
///
/// Returns each cycle as a sorted vector of node indices, ordered and
/// deduplicated by member set (two traversal orders of the same vertices
/// are the same dependency problem). The diagnostic is present when
/// elementary enumeration hit `max_count` and stopped early.
pub fn find_cycles(
    graph: &DependencyGraph,
    mode: CdMode,
    limits: &CycleLimits,
) -> (Vec<Vec<usize>>, Option<Diagnostic>) {
    match mode {
        CdMode::Scc => {
            let mut sccs: Vec<Vec<usize>> = graph
                .tarjan_scc()
                .into_iter()
                .filter(|scc| scc.len() >= 2)
                .collect();
            sccs.sort();
            (sccs, None)
        }
        CdMode::Elementary => enumerate_elementary(graph, limits),
    }
}

fn enumerate_elementary(
    graph: &DependencyGraph,
    limits: &CycleLimits,
) -> (Vec<Vec<usize>>, Option<Diagnostic>) {
    let n = graph.node_count();
    let mut recorded: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut walk = Walk {
        graph,
        allowed: vec![false; n],
        blocked: vec![false; n],
        b_lists: vec![BTreeSet::new(); n],
        path: Vec::new(),
        start: 0,
        enumerated: 0,
        limits: *limits,
        truncated: false,
    };
    // Every elementary cycle lives inside one SCC and contains a unique
    // least vertex; rooting the search at that vertex within the subgraph
    // of not-yet-used SCC members enumerates each cycle exactly once.
    'sccs: for scc in graph.tarjan_scc() {
        if scc.len() < 2 {
            continue;
        }
        for (i, &start) in scc.iter().enumerate() {
            for flag in &mut walk.allowed {
                *flag = false;
            }
            for &v in &scc[i..] {
                walk.allowed[v] = true;
            }
            for &v in &scc[i..] {
                walk.blocked[v] = false;
                walk.b_lists[v].clear();
            }
            walk.start = start;
            walk.circuit(start, &mut recorded);
            if walk.truncated {
                break 'sccs;
            }
        }
    }
    let diagnostic = walk.truncated.then(|| {
        Diagnostic::new(
            DiagnosticKind::CycleEnumerationTruncated,
            format!(
                "elementary cycle enumeration on the {} graph stopped after {} cycles; \
                 results are incomplete",
                graph.level(),
                limits.max_count
            ),
        )
    });
    (recorded.into_iter().collect(), diagnostic)
}

/// Johnson's circuit search state for one graph.
struct Walk<'a> {
    graph: &'a DependencyGraph,
    allowed: Vec<bool>,
    blocked: Vec<bool>,
    b_lists: Vec<BTreeSet<usize>>,
    path: Vec<usize>,
    start: usize,
    enumerated: usize,
    limits: CycleLimits,
    truncated: bool,
}

impl Walk<'_> {
    fn circuit(&mut self, v: usize, recorded: &mut BTreeSet<Vec<usize>>) -> bool {
        let mut found = false;
        self.path.push(v);
        self.blocked[v] = true;
        for i in 0..self.graph.out_neighbors(v).len() {
            let w = self.graph.out_neighbors(v)[i];
            if !self.allowed[w] {
                continue;
            }
            if w == self.start {
                found = true;
                self.enumerated += 1;
                if self.limits.max_len == 0 || self.path.len() <= self.limits.max_len {
                    let mut members = self.path.clone();
                    members.sort_unstable();
                    recorded.insert(members);
                }
                if self.limits.max_count != 0 && self.enumerated >= self.limits.max_count {
                    self.truncated = true;
                    break;
                }
            } else if !self.blocked[w] {
                if self.circuit(w, recorded) {
                    found = true;
                }
                if self.truncated {
                    break;
                }
            }
        }
        if found {
            self.unblock(v);
        } else {
            for i in 0..self.graph.out_neighbors(v).len() {
                let w = self.graph.out_neighbors(v)[i];
                if self.allowed[w] {
                    self.b_lists[w].insert(v);
                }
            }
        }
        self.path.pop();
        found
    }

    fn unblock(&mut self, v: usize) {
        self.blocked[v] = false;
        let waiting = std::mem::take(&mut self.b_lists[v]);
        for w in waiting {
            if self.blocked[w] {
                self.unblock(w);
            }
        }
    }
}
