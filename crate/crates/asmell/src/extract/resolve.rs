//! Resolution of include specs against the scanned inventory.

use std::collections::BTreeSet;

use crate::diag::{Diagnostic, DiagnosticKind};
use crate::extract::{IncludeForm, RawInclude, SourceInventory};

/// What resolution produced: dependency edges plus the leftovers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResolveOutcome {
    /// `(including file, included file)` pairs, in include order.
    pub edges: Vec<(String, String)>,
    /// Includes that matched nothing; dropped from the graph but reported.
    pub unresolved: Vec<RawInclude>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Resolves include directives to inventory files.
///
/// Quoted specs try the including file's directory first, then the include
/// roots; angled specs only the include roots. The include roots form one
/// precedence tier: when a spec matches files under several roots, the
/// lexicographically smallest resolved path wins and an `AmbiguousInclude`
/// diagnostic records the alternatives. Specs matching nothing are dropped
/// and tallied.
pub fn resolve_includes(
    inventory: &SourceInventory,
    includes: &[RawInclude],
    include_roots: &[String],
) -> ResolveOutcome {
    let mut outcome = ResolveOutcome::default();
    for include in includes {
        match resolve_one(inventory, include, include_roots, &mut outcome.diagnostics) {
            Some(target) => outcome.edges.push((include.from.clone(), target)),
            None => outcome.unresolved.push(include.clone()),
        }
    }
    outcome
}

fn resolve_one(
    inventory: &SourceInventory,
    include: &RawInclude,
    include_roots: &[String],
    diagnostics: &mut Vec<Diagnostic>,
) -> Option<String> {
    // Tier 1: quoted includes look next to the including file.
    if include.form == IncludeForm::Quoted {
        let dir = parent_dir(&include.from);
        if let Some(candidate) = lexical_join(dir, &include.spec) {
            if inventory.contains(&candidate) {
                return Some(candidate);
            }
        }
    }
    // Tier 2: all include roots together.
    let mut matches: BTreeSet<String> = BTreeSet::new();
    for root in include_roots {
        let base = if root == "." { "" } else { root.as_str() };
        if let Some(candidate) = lexical_join(base, &include.spec) {
            if inventory.contains(&candidate) {
                matches.insert(candidate);
            }
        }
    }
    let mut iter = matches.iter();
    let first = iter.next().cloned()?;
    if matches.len() > 1 {
        let rest: Vec<&str> = iter.map(String::as_str).collect();
        diagnostics.push(Diagnostic::new(
            DiagnosticKind::AmbiguousInclude,
            format!(
                "`{}` from `{}` also matches {}; taking `{first}`",
                include.spec,
                include.from,
                rest.join(", ")
            ),
        ));
    }
    Some(first)
}

fn parent_dir(path: &str) -> &str {
    match path.rfind('/') {
        Some(i) => &path[..i],
        None => "",
    }
}

/// Joins a directory and a relative spec lexically, resolving `.` and `..`
/// segments. Returns `None` when `..` would climb above the snapshot root.
fn lexical_join(base: &str, rel: &str) -> Option<String> {
    let mut segments: Vec<&str> = base.split('/').filter(|s| !s.is_empty() && *s != ".").collect();
    let rel = rel.replace('\\', "/");
    for seg in rel.split('/') {
        match seg {
            "" | "." => {}
            ".." => {
                segments.pop()?;
            }
            other => segments.push(other),
        }
    }
    if segments.is_empty() {
        None
    } else {
        Some(segments.join("/"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::{FileKind, SourceFile};

    fn inventory(paths: &[&str]) -> SourceInventory {
        SourceInventory::new(
            paths
                .iter()
                .map(|p| SourceFile {
                    path: p.to_string(),
                    kind: if p.ends_with(".c") { FileKind::Impl } else { FileKind::Header },
                    loc: 1,
                    component: p.split('/').next().unwrap().to_string(),
                })
                .collect(),
        )
    }

    fn quoted(from: &str, spec: &str) -> RawInclude {
        RawInclude { from: from.into(), spec: spec.into(), form: IncludeForm::Quoted, line: 1 }
    }

    fn angled(from: &str, spec: &str) -> RawInclude {
        RawInclude { from: from.into(), spec: spec.into(), form: IncludeForm::Angled, line: 1 }
    }

    #[test]
    fn quoted_prefers_the_including_directory() {
        // Same-named header next to the file and under an include root:
        // the sibling wins for quoted form.
        let inv = inventory(&["src/a.c", "src/u.h", "include/u.h"]);
        let out = resolve_includes(&inv, &[quoted("src/a.c", "u.h")], &["include".into()]);
        assert_eq!(out.edges, vec![("src/a.c".to_string(), "src/u.h".to_string())]);
        assert!(out.diagnostics.is_empty());
    }

    #[test]
    fn angled_ignores_the_including_directory() {
        let inv = inventory(&["src/a.c", "src/u.h", "include/u.h"]);
        let out = resolve_includes(&inv, &[angled("src/a.c", "u.h")], &["include".into()]);
        assert_eq!(out.edges, vec![("src/a.c".to_string(), "include/u.h".to_string())]);
    }

    #[test]
    fn ambiguity_across_roots_takes_lexicographically_first() {
        let inv = inventory(&["src/a.c", "first/u.h", "second/u.h"]);
        let out = resolve_includes(
            &inv,
            &[angled("src/a.c", "u.h")],
            &["second".into(), "first".into()],
        );
        assert_eq!(out.edges, vec![("src/a.c".to_string(), "first/u.h".to_string())]);
        assert_eq!(out.diagnostics.len(), 1);
        assert_eq!(out.diagnostics[0].kind, DiagnosticKind::AmbiguousInclude);
        assert!(out.diagnostics[0].message.contains("second/u.h"));
    }

    #[test]
    fn unresolved_specs_are_dropped_and_tallied() {
        let inv = inventory(&["src/a.c"]);
        let out = resolve_includes(&inv, &[angled("src/a.c", "stdio.h")], &[".".into()]);
        assert!(out.edges.is_empty());
        assert_eq!(out.unresolved.len(), 1);
        assert_eq!(out.unresolved[0].spec, "stdio.h");
    }

    #[test]
    fn dot_dot_segments_resolve_lexically() {
        let inv = inventory(&["src/sub/a.c", "src/u.h"]);
        let out = resolve_includes(&inv, &[quoted("src/sub/a.c", "../u.h")], &[]);
        assert_eq!(out.edges, vec![("src/sub/a.c".to_string(), "src/u.h".to_string())]);

        // Climbing above the snapshot root resolves to nothing.
        let out = resolve_includes(&inv, &[quoted("src/sub/a.c", "../../../u.h")], &[]);
        assert!(out.edges.is_empty());
        assert_eq!(out.unresolved.len(), 1);
    }

    #[test]
    fn include_roots_resolve_subdirectory_specs() {
        let inv = inventory(&["app/main.c", "include/net/tcp.h"]);
        let out =
            resolve_includes(&inv, &[angled("app/main.c", "net/tcp.h")], &["include".into()]);
        assert_eq!(
            out.edges,
            vec![("app/main.c".to_string(), "include/net/tcp.h".to_string())]
        );
    }
}
