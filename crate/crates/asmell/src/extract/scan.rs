//! Snapshot walking: find source files, count lines, collect includes,
//! assign components.

use std::path::Path;

use walkdir::WalkDir;

use crate::diag::{Diagnostic, DiagnosticKind};
use crate::extract::config::ExtractConfig;
use crate::extract::lang;
use crate::extract::{ExtractError, FileKind, RawInclude, SourceFile, SourceInventory};
use crate::graph::normalize_path;

/// Scan output: the inventory plus everything read along the way.
pub(crate) struct CollectedSource {
    pub inventory: SourceInventory,
    pub includes: Vec<RawInclude>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Walks the configured roots of a snapshot and classifies source files.
///
/// Equivalent to the scanning phase of [`crate::extract::extract_snapshot`]
/// but without include handling; useful for inspecting what a config picks
/// up.
pub fn scan_sources(
    root: &Path,
    cfg: &ExtractConfig,
) -> Result<(SourceInventory, Vec<Diagnostic>), ExtractError> {
    let collected = collect_sources(root, cfg)?;
    Ok((collected.inventory, collected.diagnostics))
}

/// Single-pass walk shared by scanning and extraction: reads every source
/// file once, computing LOC and extracting include directives together.
pub(crate) fn collect_sources(
    root: &Path,
    cfg: &ExtractConfig,
) -> Result<CollectedSource, ExtractError> {
    if !root.is_dir() {
        return Err(ExtractError::NotADirectory { path: root.display().to_string() });
    }
    let mut files: Vec<SourceFile> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    let mut includes: Vec<RawInclude> = Vec::new();
    let mut diagnostics: Vec<Diagnostic> = Vec::new();

    for scan_root in &cfg.roots {
        let scan_root = normalize_path(scan_root).unwrap_or_else(|| ".".into());
        let dir = if scan_root == "." { root.to_path_buf() } else { root.join(&scan_root) };
        if !dir.is_dir() {
            diagnostics.push(Diagnostic::new(
                DiagnosticKind::MissingRoot,
                format!("scan root `{scan_root}` does not exist in this snapshot"),
            ));
            continue;
        }
        let walker = WalkDir::new(&dir).sort_by_file_name();
        for entry in walker {
            let entry = entry.map_err(|e| ExtractError::Io {
                path: e
                    .path()
                    .map(|p| p.display().to_string())
                    .unwrap_or_else(|| dir.display().to_string()),
                source: e
                    .into_io_error()
                    .unwrap_or_else(|| std::io::Error::other("walk error")),
            })?;
            if !entry.file_type().is_file() {
                continue;
            }
            let rel = entry
                .path()
                .strip_prefix(root)
                .expect("walked entries live under the snapshot root");
            let Some(rel) = normalize_path(&rel.to_string_lossy()) else {
                continue;
            };
            if cfg.is_excluded(&rel) {
                continue;
            }
            let Some(kind) = classify(&rel, cfg) else {
                continue;
            };
            if !seen.insert(rel.clone()) {
                // Overlapping scan roots can visit a file twice.
                continue;
            }
            let bytes = std::fs::read(entry.path()).map_err(|source| ExtractError::Io {
                path: rel.clone(),
                source,
            })?;
            let text = String::from_utf8_lossy(&bytes);
            let loc = lang::count_loc(&text);
            let (directives, mut lang_diags) = lang::extract_includes(&text);
            for d in &mut lang_diags {
                d.message = format!("{rel}: {}", d.message);
            }
            diagnostics.append(&mut lang_diags);
            includes.extend(directives.into_iter().map(|d| RawInclude {
                from: rel.clone(),
                spec: d.spec,
                form: d.form,
                line: d.line,
            }));
            let component = assign_component(&rel, &scan_root, &cfg.component_overrides);
            files.push(SourceFile { path: rel, kind, loc, component });
        }
    }

    files.sort_by(|a, b| a.path.cmp(&b.path));
    includes.sort_by(|a, b| a.from.cmp(&b.from).then(a.line.cmp(&b.line)));
    Ok(CollectedSource { inventory: SourceInventory::new(files), includes, diagnostics })
}

fn classify(path: &str, cfg: &ExtractConfig) -> Option<FileKind> {
    let base = path.rsplit('/').next()?;
    let dot = base.rfind('.')?;
    let ext = &base[dot..];
    if cfg.is_impl_ext(ext) {
        Some(FileKind::Impl)
    } else if cfg.is_header_ext(ext) {
        Some(FileKind::Header)
    } else {
        None
    }
}

/// Component of a file: the longest matching override prefix if any,
/// otherwise the first directory level under the scan root. Files directly
/// under the root belong to the root itself (`.` for the snapshot root).
pub(crate) fn assign_component(
    path: &str,
    scan_root: &str,
    overrides: &[(String, String)],
) -> String {
    // Overrides are sorted longest-prefix-first by the config parser.
    for (prefix, component) in overrides {
        if path == prefix || path.starts_with(&format!("{prefix}/")) {
            return component.clone();
        }
    }
    let rel = if scan_root == "." {
        path
    } else {
        path.strip_prefix(&format!("{scan_root}/")).unwrap_or(path)
    };
    match rel.split_once('/') {
        Some((first, rest)) if !rest.is_empty() => {
            if scan_root == "." {
                first.to_string()
            } else {
                format!("{scan_root}/{first}")
            }
        }
        _ => scan_root.to_string(),
    }
}
