//! Header hoisting: re-attributing header dependencies to the files that
//! implement them.
//!
//! Headers declare interfaces; the dependencies that matter architecturally
//! are between implementations. Hoisting therefore dissolves every header
//! node: a dependency *on* a header becomes a dependency on the files
//! implementing it, a dependency *of* a header is carried over to those
//! same implementers, and headers nobody implements act as pure glue whose
//! inbound edges are rewired to the header's own targets, transitively
//! across header-only chains.

use std::collections::{BTreeMap, BTreeSet};

use crate::diag::{Diagnostic, DiagnosticKind};
use crate::extract::{ExtractError, FileKind, RawFileGraph};
use crate::graph::{strongly_connected_components, DependencyGraph, Level, NodeSpec};

/// Dissolves the header nodes of a raw file graph.
///
/// The rules, applied simultaneously over all edges:
///
/// * `implementers(H)` = implementation files with the same basename stem
///   in the same component as `H`; when there are none, the same directory
///   is tried instead.
/// * `X -> H` becomes `X -> I` for every implementer `I`.
/// * `H -> Y` becomes `I -> Y` for every implementer `I`.
/// * A header without implementers forwards: inbound edges are rewired to
///   the header's own outbound targets, transitively across chains of such
///   headers. Cycles among headers collapse as a unit and are reported
///   with a `CycleInHeaderChain` diagnostic.
///
/// The result contains implementation files only; self-loops arising from
/// a file depending on its own header disappear.
pub fn hoist_header_deps(
    raw: &RawFileGraph,
) -> Result<(DependencyGraph, Vec<Diagnostic>), ExtractError> {
    let files = raw.inventory.files();
    let index_of: BTreeMap<&str, usize> =
        files.iter().enumerate().map(|(i, f)| (f.path.as_str(), i)).collect();
    let out_edges: Vec<Vec<usize>> = {
        let mut out = vec![BTreeSet::new(); files.len()];
        for (src, dst) in &raw.edges {
            let (Some(&s), Some(&d)) = (index_of.get(src.as_str()), index_of.get(dst.as_str()))
            else {
                // Resolution only produces inventory paths; tolerate
                // hand-built inputs by ignoring unknown endpoints.
                continue;
            };
            if s != d {
                out[s].insert(d);
            }
        }
        out.into_iter().map(|set| set.into_iter().collect()).collect()
    };

    let implementers = find_implementers(raw);
    let diagnostics = diagnose_header_cycles(files, &out_edges);

    // Headers without implementers forward their inbound edges onward.
    // Resolve where each such header ultimately lands by processing the
    // strongly connected components of the forwarding subgraph in reverse
    // topological order (cycles collapse into one unit).
    let forwarding: Vec<usize> = (0..files.len())
        .filter(|&i| files[i].kind == FileKind::Header && implementers[i].is_empty())
        .collect();
    let fwd_index: BTreeMap<usize, usize> =
        forwarding.iter().enumerate().map(|(fi, &node)| (node, fi)).collect();
    let fwd_adj: Vec<Vec<usize>> = forwarding
        .iter()
        .map(|&node| {
            out_edges[node]
                .iter()
                .filter_map(|dst| fwd_index.get(dst).copied())
                .collect()
        })
        .collect();

    // dst(node): the implementation files an edge pointing at `node`
    // finally lands on.
    let terminal_dst = |node: usize| -> BTreeSet<usize> {
        match files[node].kind {
            FileKind::Impl => BTreeSet::from([node]),
            FileKind::Header => implementers[node].iter().copied().collect(),
        }
    };
    let mut fwd_dst: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); forwarding.len()];
    let mut comp_of: Vec<usize> = vec![usize::MAX; forwarding.len()];
    let components = strongly_connected_components(&fwd_adj);
    let mut comp_dst: Vec<BTreeSet<usize>> = Vec::with_capacity(components.len());
    for (ci, comp) in components.iter().enumerate() {
        for &fi in comp {
            comp_of[fi] = ci;
        }
        let mut dst = BTreeSet::new();
        for &fi in comp {
            let node = forwarding[fi];
            for &target in &out_edges[node] {
                match fwd_index.get(&target) {
                    Some(&ti) if comp_of[ti] == ci => {} // stays inside the cycle
                    Some(&ti) => dst.extend(comp_dst[comp_of[ti]].iter().copied()),
                    None => dst.extend(terminal_dst(target)),
                }
            }
        }
        comp_dst.push(dst);
    }
    for (fi, &ci) in comp_of.iter().enumerate() {
        fwd_dst[fi] = comp_dst[ci].clone();
    }

    let dst = |node: usize| -> BTreeSet<usize> {
        match fwd_index.get(&node) {
            Some(&fi) => fwd_dst[fi].clone(),
            None => terminal_dst(node),
        }
    };
    // srcs(node): who an edge leaving `node` is attributed to.
    let srcs = |node: usize| -> BTreeSet<usize> {
        match files[node].kind {
            FileKind::Impl => BTreeSet::from([node]),
            FileKind::Header => implementers[node].iter().copied().collect(),
        }
    };

    let mut hoisted: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (u, targets) in out_edges.iter().enumerate() {
        let sources = srcs(u);
        if sources.is_empty() {
            continue; // unimplemented header: handled via forwarding
        }
        for &v in targets {
            for &d in &dst(v) {
                for &s in &sources {
                    if s != d {
                        hoisted.insert((s, d));
                    }
                }
            }
        }
    }

    let nodes: Vec<NodeSpec> = files
        .iter()
        .filter(|f| f.kind == FileKind::Impl)
        .map(|f| NodeSpec::new(f.path.clone(), f.loc).with_component(f.component.clone()))
        .collect();
    let edges: Vec<(String, String)> = hoisted
        .into_iter()
        .map(|(s, d)| (files[s].path.clone(), files[d].path.clone()))
        .collect();
    let graph = DependencyGraph::build(Level::File, 0, "", nodes, edges)?;
    Ok((graph, diagnostics))
}

/// For each file index, the implementation files implementing it (empty
/// for implementation files themselves).
fn find_implementers(raw: &RawFileGraph) -> Vec<Vec<usize>> {
    let files = raw.inventory.files();
    let mut by_component: BTreeMap<(&str, &str), Vec<usize>> = BTreeMap::new();
    let mut by_directory: BTreeMap<(&str, &str), Vec<usize>> = BTreeMap::new();
    for (i, f) in files.iter().enumerate() {
        if f.kind != FileKind::Impl {
            continue;
        }
        let s = stem(&f.path);
        by_component.entry((s, f.component.as_str())).or_default().push(i);
        by_directory.entry((s, dir(&f.path))).or_default().push(i);
    }
    files
        .iter()
        .map(|f| {
            if f.kind != FileKind::Header {
                return Vec::new();
            }
            let s = stem(&f.path);
            by_component
                .get(&(s, f.component.as_str()))
                .or_else(|| by_directory.get(&(s, dir(&f.path))))
                .cloned()
                .unwrap_or_default()
        })
        .collect()
}

/// Basename without its last extension: `src/a.tpp.h` has stem `a.tpp`.
fn stem(path: &str) -> &str {
    let base = path.rsplit('/').next().unwrap_or(path);
    match base.rfind('.') {
        Some(i) if i > 0 => &base[..i],
        _ => base,
    }
}

fn dir(path: &str) -> &str {
    match path.rfind('/') {
        Some(i) => &path[..i],
        None => "",
    }
}

/// Reports each cycle among header files once, with sorted members.
fn diagnose_header_cycles(
    files: &[crate::extract::SourceFile],
    out_edges: &[Vec<usize>],
) -> Vec<Diagnostic> {
    let headers: Vec<usize> =
        (0..files.len()).filter(|&i| files[i].kind == FileKind::Header).collect();
    let hdr_index: BTreeMap<usize, usize> =
        headers.iter().enumerate().map(|(hi, &node)| (node, hi)).collect();
    let adj: Vec<Vec<usize>> = headers
        .iter()
        .map(|&node| {
            out_edges[node].iter().filter_map(|dst| hdr_index.get(dst).copied()).collect()
        })
        .collect();
    strongly_connected_components(&adj)
        .into_iter()
        .filter(|comp| comp.len() >= 2)
        .map(|comp| {
            let members: Vec<&str> =
                comp.iter().map(|&hi| files[headers[hi]].path.as_str()).collect();
            Diagnostic::new(
                DiagnosticKind::CycleInHeaderChain,
                format!("headers include each other: {}", members.join(" -> ")),
            )
        })
        .collect()
}
