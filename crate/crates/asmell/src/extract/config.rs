//! Extractor configuration: the key-value config file and glob matching.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::graph::normalize_path;

/// Settings steering snapshot extraction.
///
/// Parsed from a plain key-value file (`key = value`, `#` comments, values
/// are space-separated lists):
///
/// ```text
/// # where to look for sources, relative to the snapshot root
/// roots = src lib
/// exclude = build/** third_party/** *.gen.c
/// impl-ext = .c .cc .cpp .cxx
/// header-ext = .h .hh .hpp .hxx
/// include-roots = src include
/// component-map = components.tsv
/// extra-edges-file = extra.edges
/// ```
///
/// `component-map` names a TSV file of `path-prefix<TAB>component-name`
/// overrides (longest prefix wins); `extra-edges-file` names a file of `E
/// <src> <dst>` records injected after header hoisting. Both paths are
/// resolved relative to the config file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractConfig {
    /// Directories to scan, relative to the snapshot root.
    pub roots: Vec<String>,
    /// Glob patterns for paths to skip (`*`, `?`, `**`; patterns without a
    /// `/` match basenames).
    pub exclude: Vec<String>,
    /// Extensions marking implementation files.
    pub impl_ext: Vec<String>,
    /// Extensions marking header files.
    pub header_ext: Vec<String>,
    /// Directories include specs are resolved against, relative to the
    /// snapshot root. Defaults to `roots`.
    pub include_roots: Vec<String>,
    /// Component overrides: `(path prefix, component name)`, longest prefix
    /// wins over the first-directory-under-root default.
    pub component_overrides: Vec<(String, String)>,
    /// Dependency edges to inject after hoisting (implementation files).
    pub extra_edges: Vec<(String, String)>,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig {
            roots: vec![".".into()],
            exclude: Vec::new(),
            impl_ext: strings(&[".c", ".cc", ".cpp", ".cxx"]),
            header_ext: strings(&[".h", ".hh", ".hpp", ".hxx"]),
            include_roots: vec![".".into()],
            component_overrides: Vec::new(),
            extra_edges: Vec::new(),
        }
    }
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// Error raised while reading or parsing an extractor config.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl ExtractConfig {
    /// Reads and parses a config file, loading any referenced component map
    /// and extra-edges file relative to it.
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    /// Parses config text; `base` anchors referenced files.
    pub fn parse(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let mut cfg = ExtractConfig::default();
        let mut include_roots_set = false;
        for (lineno, raw) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Parse {
                line: lineno,
                msg: "expected `key = value`".into(),
            })?;
            let key = key.trim();
            let values: Vec<String> =
                value.split_whitespace().map(str::to_string).collect();
            let require_values = |field: &str| {
                if values.is_empty() {
                    Err(ConfigError::Parse {
                        line: lineno,
                        msg: format!("`{field}` needs at least one value"),
                    })
                } else {
                    Ok(())
                }
            };
            match key {
                "roots" => {
                    require_values("roots")?;
                    cfg.roots = values;
                }
                "exclude" => cfg.exclude = values,
                "impl-ext" => {
                    require_values("impl-ext")?;
                    cfg.impl_ext = values;
                }
                "header-ext" => {
                    require_values("header-ext")?;
                    cfg.header_ext = values;
                }
                "include-roots" => {
                    require_values("include-roots")?;
                    cfg.include_roots = values;
                    include_roots_set = true;
                }
                "component-map" => {
                    require_values("component-map")?;
                    let path = base.join(&values[0]);
                    cfg.component_overrides = parse_component_map(&path)?;
                }
                "extra-edges-file" => {
                    require_values("extra-edges-file")?;
                    let path = base.join(&values[0]);
                    cfg.extra_edges = parse_extra_edges(&path)?;
                }
                other => {
                    return Err(ConfigError::Parse {
                        line: lineno,
                        msg: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        if !include_roots_set {
            cfg.include_roots = cfg.roots.clone();
        }
        Ok(cfg)
    }

    /// True when `ext` (with leading dot) marks an implementation file.
    pub fn is_impl_ext(&self, ext: &str) -> bool {
        self.impl_ext.iter().any(|e| e == ext)
    }

    /// True when `ext` (with leading dot) marks a header file.
    pub fn is_header_ext(&self, ext: &str) -> bool {
        self.header_ext.iter().any(|e| e == ext)
    }

    /// True when the snapshot-relative `path` matches an exclude pattern.
    pub fn is_excluded(&self, path: &str) -> bool {
        self.exclude.iter().any(|pat| {
            if pat.contains('/') {
                glob_match(pat, path)
            } else {
                path.rsplit('/').next().is_some_and(|base| glob_match(pat, base))
            }
        })
    }
}

fn parse_component_map(path: &Path) -> Result<Vec<(String, String)>, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut map = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (prefix, name) = line.split_once('\t').ok_or_else(|| ConfigError::Parse {
            line: lineno + 1,
            msg: "component map lines are `prefix<TAB>component`".into(),
        })?;
        let prefix = normalize_path(prefix.trim()).ok_or_else(|| ConfigError::Parse {
            line: lineno + 1,
            msg: "empty path prefix".into(),
        })?;
        let name = normalize_path(name.trim()).ok_or_else(|| ConfigError::Parse {
            line: lineno + 1,
            msg: "empty component name".into(),
        })?;
        map.push((prefix, name));
    }
    // Longest prefix first so lookup can take the first hit.
    map.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
    Ok(map)
}

fn parse_extra_edges(path: &Path) -> Result<Vec<(String, String)>, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut edges = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        match (fields.next(), fields.next(), fields.next(), fields.next()) {
            (Some("E"), Some(src), Some(dst), None) => {
                edges.push((src.to_string(), dst.to_string()));
            }
            _ => {
                return Err(ConfigError::Parse {
                    line: lineno + 1,
                    msg: "extra-edges lines are `E <src> <dst>`".into(),
                })
            }
        }
    }
    Ok(edges)
}

/// Matches `path` against a glob pattern supporting `*` (within a segment),
/// `?` (one character), and `**` (any number of whole segments).
pub fn glob_match(pattern: &str, path: &str) -> bool {
    let pat_segs: Vec<&str> = pattern.split('/').collect();
    let path_segs: Vec<&str> = path.split('/').collect();
    match_segments(&pat_segs, &path_segs)
}

fn match_segments(pat: &[&str], path: &[&str]) -> bool {
    match pat.first() {
        None => path.is_empty(),
        Some(&"**") => {
            // `**` swallows zero or more whole segments.
            (0..=path.len()).any(|skip| match_segments(&pat[1..], &path[skip..]))
        }
        Some(seg) => match path.first() {
            Some(first) if match_one(seg.as_bytes(), first.as_bytes()) => {
                match_segments(&pat[1..], &path[1..])
            }
            _ => false,
        },
    }
}

fn match_one(pat: &[u8], text: &[u8]) -> bool {
    match pat.first() {
        None => text.is_empty(),
        Some(b'*') => {
            (0..=text.len()).any(|skip| match_one(&pat[1..], &text[skip..]))
        }
        Some(b'?') => !text.is_empty() && match_one(&pat[1..], &text[1..]),
        Some(&c) => text.first() == Some(&c) && match_one(&pat[1..], &text[1..]),
    }
}
