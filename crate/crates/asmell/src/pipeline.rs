//! Pipeline orchestration: extract → detect → track → evolve → render
//! over an ordered series of snapshot directories.
//!
//! [`run_pipeline`] does everything in one pass; the `stage_*`
//! functions run one stage each, chained through the documented files
//! in the output directory so graph-only workflows (interchange files
//! in, analyses out) work without C/C++ sources:
//!
//! ```text
//! out/
//!   graphs/versions.csv, v0000.fgraph, v0000.cgraph, ...   (extract)
//!   csv/versions.csv, smells.csv, characteristics.csv       (detect)
//!   csv/temporal.csv                                        (track)
//!   csv/*.csv, summary.json                                 (evolve)
//!   report.html                                             (render)
//!   diagnostics.log        (rewritten by whichever command ran last)
//! ```
//!
//! A snapshot that fails to extract is skipped: the survivors are
//! re-indexed into a contiguous version sequence and the failure is
//! recorded in `diagnostics.log`. Extraction results are cached by
//! snapshot content hash, so re-running over a grown series only pays
//! for the new snapshots.

use std::collections::BTreeMap;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::detect::{detect_version, DetectError, DetectorConfig, SmellInstance};
use crate::diag::{Diagnostic, DiagnosticKind};
use crate::evolve::PrecedenceMode;
use crate::extract::{extract_snapshot, ConfigError, ExtractConfig};
use crate::graph::{load_graph, DependencyGraph, FormatError};
use crate::report::csv::{
    emit_instances_csv, emit_temporal_csv, emit_versions_csv, load_versions_csv,
};
use crate::report::{
    emit_csv, load_instances, load_temporal, render_html, summary_string, write_report,
    AnalysisBundle, ReportError,
};
use crate::track::{build_temporal_instances, TrackError};

/// Everything a pipeline run needs to know.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub project: String,
    /// Snapshot directories, oldest first. Labels are the basenames.
    pub snapshots: Vec<PathBuf>,
    /// Extractor config file; `None` uses [`ExtractConfig::default`].
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub detector: DetectorConfig,
    /// Jaccard similarity two instances need to be matched across
    /// versions; 1.0 requires identical affected sets.
    pub track_threshold: f64,
    /// Largest precedence window; `None` means the version count.
    pub k_max: Option<usize>,
    pub precedence_mode: PrecedenceMode,
    /// Worker threads for the per-snapshot stages; 0 picks one per core.
    pub jobs: usize,
    /// Seed for sampling over-long diagnostic groups in the log.
    pub seed: u64,
    /// Extraction cache; `None` disables caching.
    pub cache_dir: Option<PathBuf>,
}

impl RunConfig {
    /// A config with defaults: the project is named after the first
    /// snapshot's parent directory and the cache honours
    /// `ASMELL_CACHE_DIR`.
    pub fn new(snapshots: Vec<PathBuf>, out: impl Into<PathBuf>) -> RunConfig {
        let project = snapshots
            .first()
            .and_then(|s| s.parent())
            .and_then(|p| p.file_name())
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "project".to_string());
        RunConfig {
            project,
            snapshots,
            config: None,
            out: out.into(),
            detector: DetectorConfig::default(),
            track_threshold: 0.5,
            k_max: None,
            precedence_mode: PrecedenceMode::Instances,
            jobs: 0,
            seed: 0,
            cache_dir: std::env::var_os("ASMELL_CACHE_DIR").map(PathBuf::from),
        }
    }
}

/// Fatal pipeline failures. Per-snapshot extraction failures are not
/// here — they are isolated, logged, and reflected in the exit code.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("at least one snapshot directory is required")]
    NoSnapshots,
    #[error("every snapshot failed to extract; see diagnostics.log")]
    AllSnapshotsFailed,
    #[error("stage input `{file}` is missing; run the earlier stages first")]
    MissingStageInput { file: String },
    #[error("cannot build worker pool: {0}")]
    ThreadPool(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Detect(#[from] DetectError),
    #[error(transparent)]
    Track(#[from] TrackError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    GraphFormat(#[from] FormatError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io { path: path.display().to_string(), source }
}

/// What a pipeline command accomplished.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunOutcome {
    pub versions_analyzed: usize,
    /// `(snapshot path, error)` for every skipped snapshot.
    pub skipped: Vec<(String, String)>,
    /// Lines written to `diagnostics.log`.
    pub diagnostics_logged: usize,
}

impl RunOutcome {
    /// 0 = full success, 2 = partial (some snapshots were skipped).
    /// Fatal errors never reach a `RunOutcome`; callers map them to 1.
    pub fn exit_code(&self) -> i32 {
        if self.skipped.is_empty() {
            0
        } else {
            2
        }
    }
}

/// Runs the whole pipeline and writes the report tree.
pub fn run_pipeline(cfg: &RunConfig) -> Result<RunOutcome, PipelineError> {
    let series = extract_series(cfg)?;
    write_graph_stage(cfg, &series)?;

    let (instances, detect_diags) = detect_series(cfg, &series.graphs)?;
    let csv_dir = cfg.out.join("csv");
    fs::create_dir_all(&csv_dir).map_err(io_err(&csv_dir))?;
    emit_instances_csv(&series.labels, &instances, &csv_dir)?;

    let temporal = build_temporal_instances(&instances, cfg.track_threshold)?;
    emit_temporal_csv(&temporal, &csv_dir.join("temporal.csv"))?;

    let latest_components = series.graphs.last().map(|(_, c)| c);
    let bundle = AnalysisBundle::assemble(
        &cfg.project,
        series.labels.clone(),
        instances,
        temporal,
        latest_components,
        cfg.k_max,
        cfg.precedence_mode,
    );
    write_report(&bundle, &cfg.out)?;

    let mut groups = series.diagnostics;
    groups.extend(detect_diags);
    let logged = write_log(cfg, groups)?;
    Ok(RunOutcome {
        versions_analyzed: series.labels.len(),
        skipped: series.skipped,
        diagnostics_logged: logged,
    })
}

/// A successfully extracted, re-indexed snapshot series.
struct ExtractedSeries {
    labels: Vec<String>,
    /// `(file graph, component graph)` per surviving version.
    graphs: Vec<(DependencyGraph, DependencyGraph)>,
    /// Log groups in output order: run-scoped failures, then versions.
    diagnostics: Vec<(String, Vec<Diagnostic>)>,
    skipped: Vec<(String, String)>,
}

fn worker_pool(jobs: usize) -> Result<rayon::ThreadPool, PipelineError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| PipelineError::ThreadPool(e.to_string()))
}

fn snapshot_label(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Extracts every snapshot in a worker pool, isolating failures, and
/// re-indexes the survivors into a contiguous version sequence.
fn extract_series(cfg: &RunConfig) -> Result<ExtractedSeries, PipelineError> {
    if cfg.snapshots.is_empty() {
        return Err(PipelineError::NoSnapshots);
    }
    let extract_cfg = match &cfg.config {
        Some(path) => ExtractConfig::from_file(path)?,
        None => ExtractConfig::default(),
    };
    let pool = worker_pool(cfg.jobs)?;
    type SnapshotOutput = Result<(DependencyGraph, DependencyGraph, Vec<Diagnostic>), String>;
    let results: Vec<SnapshotOutput> = pool.install(|| {
        use rayon::prelude::*;
        cfg.snapshots
            .par_iter()
            .enumerate()
            .map(|(i, snapshot)| {
                extract_one(snapshot, &extract_cfg, i, cfg.cache_dir.as_deref())
                    .map_err(|e| e.to_string())
            })
            .collect()
    });

    let mut series = ExtractedSeries {
        labels: Vec::new(),
        graphs: Vec::new(),
        diagnostics: Vec::new(),
        skipped: Vec::new(),
    };
    let mut failures = Vec::new();
    let mut versions = Vec::new();
    for (snapshot, result) in cfg.snapshots.iter().zip(results) {
        match result {
            Ok(entry) => versions.push(entry),
            Err(message) => {
                let path = snapshot.display().to_string();
                failures.push(Diagnostic::new(
                    DiagnosticKind::SnapshotFailed,
                    format!("snapshot `{path}` skipped: {message}"),
                ));
                series.skipped.push((path, message));
            }
        }
    }
    if versions.is_empty() {
        return Err(PipelineError::AllSnapshotsFailed);
    }
    if !failures.is_empty() {
        series.diagnostics.push(("run".to_string(), failures));
    }
    for (index, (mut file_graph, mut component_graph, diags)) in
        versions.into_iter().enumerate()
    {
        file_graph.set_version_index(index);
        component_graph.set_version_index(index);
        let label = file_graph.version_label().to_string();
        if !diags.is_empty() {
            series.diagnostics.push((format!("v{index} {label}"), diags));
        }
        series.labels.push(label);
        series.graphs.push((file_graph, component_graph));
    }
    Ok(series)
}

/// Extracts one snapshot, going through the content-hash cache when one
/// is configured.
fn extract_one(
    snapshot: &Path,
    extract_cfg: &ExtractConfig,
    provisional_index: usize,
    cache_dir: Option<&Path>,
) -> Result<(DependencyGraph, DependencyGraph, Vec<Diagnostic>), String> {
    let label = snapshot_label(snapshot);
    let fingerprint = cache_dir
        .and_then(|dir| snapshot_fingerprint(snapshot, extract_cfg).map(|f| (dir, f)));
    if let Some((dir, hash)) = &fingerprint {
        if let Some(mut cached) = load_cached(dir, hash) {
            cached.0.set_version_index(provisional_index);
            cached.0.set_version_label(&label);
            cached.1.set_version_index(provisional_index);
            cached.1.set_version_label(&label);
            return Ok(cached);
        }
    }
    let result = extract_snapshot(snapshot, extract_cfg, provisional_index, &label)
        .map_err(|e| e.to_string())?;
    if let Some((dir, hash)) = &fingerprint {
        // Caching is best-effort: a full cache disk must not fail the run.
        let _ = store_cached(dir, hash, &result.file_graph, &result.component_graph, &result.diagnostics);
    }
    Ok((result.file_graph, result.component_graph, result.diagnostics))
}

/// Content hash over every file in the snapshot plus the extractor
/// settings. `None` (rather than an error) when the tree cannot be
/// read — extraction will surface the real problem.
fn snapshot_fingerprint(root: &Path, cfg: &ExtractConfig) -> Option<String> {
    let mut hasher = Sha256::new();
    hasher.update(format!("{cfg:?}\0"));
    let mut files = Vec::new();
    for entry in walkdir::WalkDir::new(root).sort_by_file_name() {
        let entry = entry.ok()?;
        if entry.file_type().is_file() {
            let rel = entry.path().strip_prefix(root).ok()?.to_string_lossy().into_owned();
            files.push((rel, entry.path().to_path_buf()));
        }
    }
    for (rel, path) in files {
        let bytes = fs::read(&path).ok()?;
        hasher.update(rel.as_bytes());
        hasher.update([0]);
        hasher.update((bytes.len() as u64).to_le_bytes());
        hasher.update(&bytes);
    }
    Some(format!("{:x}", hasher.finalize()))
}

fn cache_paths(dir: &Path, hash: &str) -> (PathBuf, PathBuf, PathBuf) {
    (
        dir.join(format!("{hash}.fgraph")),
        dir.join(format!("{hash}.cgraph")),
        dir.join(format!("{hash}.diag.json")),
    )
}

fn load_cached(
    dir: &Path,
    hash: &str,
) -> Option<(DependencyGraph, DependencyGraph, Vec<Diagnostic>)> {
    let (fpath, cpath, dpath) = cache_paths(dir, hash);
    let file_graph = load_graph(BufReader::new(fs::File::open(fpath).ok()?)).ok()?;
    let component_graph = load_graph(BufReader::new(fs::File::open(cpath).ok()?)).ok()?;
    let diagnostics = serde_json::from_str(&fs::read_to_string(dpath).ok()?).ok()?;
    Some((file_graph, component_graph, diagnostics))
}

fn store_cached(
    dir: &Path,
    hash: &str,
    file_graph: &DependencyGraph,
    component_graph: &DependencyGraph,
    diagnostics: &[Diagnostic],
) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let (fpath, cpath, dpath) = cache_paths(dir, hash);
    let json = serde_json::to_string(diagnostics).expect("diagnostics serialize");
    for (path, content) in [
        (fpath, file_graph.save_to_string()),
        (cpath, component_graph.save_to_string()),
        (dpath, json),
    ] {
        // Write-then-rename so concurrent runs never see torn files.
        let tmp = path.with_extension(format!("tmp-{}", std::process::id()));
        fs::write(&tmp, content)?;
        fs::rename(&tmp, &path)?;
    }
    Ok(())
}

fn graph_paths(dir: &Path, index: usize) -> (PathBuf, PathBuf) {
    (dir.join(format!("v{index:04}.fgraph")), dir.join(format!("v{index:04}.cgraph")))
}

fn write_graph_stage(cfg: &RunConfig, series: &ExtractedSeries) -> Result<(), PipelineError> {
    let dir = cfg.out.join("graphs");
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    emit_versions_csv(&series.labels, &dir.join("versions.csv"))?;
    for (index, (file_graph, component_graph)) in series.graphs.iter().enumerate() {
        let (fpath, cpath) = graph_paths(&dir, index);
        fs::write(&fpath, file_graph.save_to_string()).map_err(io_err(&fpath))?;
        fs::write(&cpath, component_graph.save_to_string()).map_err(io_err(&cpath))?;
    }
    Ok(())
}

/// Runs the detectors over every version in a worker pool.
fn detect_series(
    cfg: &RunConfig,
    graphs: &[(DependencyGraph, DependencyGraph)],
) -> Result<(Vec<Vec<SmellInstance>>, Vec<(String, Vec<Diagnostic>)>), PipelineError> {
    let pool = worker_pool(cfg.jobs)?;
    let outcomes: Vec<Result<_, DetectError>> = pool.install(|| {
        use rayon::prelude::*;
        graphs
            .par_iter()
            .map(|(file_graph, component_graph)| {
                detect_version(file_graph, component_graph, &cfg.detector)
            })
            .collect()
    });
    let mut instances = Vec::with_capacity(outcomes.len());
    let mut groups = Vec::new();
    for (index, outcome) in outcomes.into_iter().enumerate() {
        let outcome = outcome?;
        if !outcome.diagnostics.is_empty() {
            let label = graphs[index].0.version_label().to_string();
            groups.push((format!("v{index} {label}"), outcome.diagnostics));
        }
        instances.push(outcome.instances);
    }
    Ok((instances, groups))
}

/// Diagnostics of one kind beyond this many per scope are sampled.
const DIAG_CAP_PER_KIND: usize = 8;

/// Renders diagnostic groups into `diagnostics.log`, deterministically
/// sampling over-long kind groups with the seeded generator. Returns
/// the number of lines written.
fn write_log(
    cfg: &RunConfig,
    groups: Vec<(String, Vec<Diagnostic>)>,
) -> Result<usize, PipelineError> {
    let mut lines = Vec::new();
    for (scope_index, (scope, diags)) in groups.iter().enumerate() {
        let mut by_kind: BTreeMap<DiagnosticKind, Vec<&Diagnostic>> = BTreeMap::new();
        for diag in diags {
            by_kind.entry(diag.kind).or_default().push(diag);
        }
        for (kind, group) in by_kind {
            if group.len() <= DIAG_CAP_PER_KIND {
                for diag in group {
                    lines.push(format!("{scope} {diag}"));
                }
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ scope_index as u64);
                let mut keep: Vec<usize> =
                    rand::seq::index::sample(&mut rng, group.len(), DIAG_CAP_PER_KIND)
                        .into_vec();
                keep.sort_unstable();
                for i in keep {
                    lines.push(format!("{scope} {}", group[i]));
                }
                lines.push(format!(
                    "{scope} [{kind}] {} more of this kind suppressed (sampled with seed {})",
                    group.len() - DIAG_CAP_PER_KIND,
                    cfg.seed
                ));
            }
        }
    }
    let path = cfg.out.join("diagnostics.log");
    let mut content = lines.join("\n");
    if !content.is_empty() {
        content.push('\n');
    }
    fs::write(&path, content).map_err(io_err(&path))?;
    Ok(lines.len())
}

/// Errors with [`PipelineError::MissingStageInput`] naming `path`
/// relative to the output directory when it does not exist.
fn require_stage_input(out: &Path, path: &Path) -> Result<(), PipelineError> {
    if path.exists() {
        return Ok(());
    }
    let file = path
        .strip_prefix(out)
        .unwrap_or(path)
        .to_string_lossy()
        .into_owned();
    Err(PipelineError::MissingStageInput { file })
}

/// Extract stage: snapshots → `graphs/` interchange files.
pub fn stage_extract(cfg: &RunConfig) -> Result<RunOutcome, PipelineError> {
    fs::create_dir_all(&cfg.out).map_err(io_err(&cfg.out))?;
    let series = extract_series(cfg)?;
    write_graph_stage(cfg, &series)?;
    let versions_analyzed = series.labels.len();
    let skipped = series.skipped.clone();
    let logged = write_log(cfg, series.diagnostics)?;
    Ok(RunOutcome { versions_analyzed, skipped, diagnostics_logged: logged })
}

/// Loads the extract stage's graphs back, re-stamping version indices.
fn load_graph_stage(
    cfg: &RunConfig,
) -> Result<(Vec<String>, Vec<(DependencyGraph, DependencyGraph)>), PipelineError> {
    let dir = cfg.out.join("graphs");
    let manifest = dir.join("versions.csv");
    require_stage_input(&cfg.out, &manifest)?;
    let labels = load_versions_csv(&manifest)?;
    let mut graphs = Vec::with_capacity(labels.len());
    for index in 0..labels.len() {
        let (fpath, cpath) = graph_paths(&dir, index);
        require_stage_input(&cfg.out, &fpath)?;
        require_stage_input(&cfg.out, &cpath)?;
        let mut file_graph =
            load_graph(BufReader::new(fs::File::open(&fpath).map_err(io_err(&fpath))?))?;
        let mut component_graph =
            load_graph(BufReader::new(fs::File::open(&cpath).map_err(io_err(&cpath))?))?;
        file_graph.set_version_index(index);
        component_graph.set_version_index(index);
        graphs.push((file_graph, component_graph));
    }
    Ok((labels, graphs))
}

/// Detect stage: `graphs/` → `csv/{versions,smells,characteristics}.csv`.
pub fn stage_detect(cfg: &RunConfig) -> Result<RunOutcome, PipelineError> {
    let (labels, graphs) = load_graph_stage(cfg)?;
    let (instances, diagnostics) = detect_series(cfg, &graphs)?;
    let csv_dir = cfg.out.join("csv");
    fs::create_dir_all(&csv_dir).map_err(io_err(&csv_dir))?;
    emit_instances_csv(&labels, &instances, &csv_dir)?;
    let logged = write_log(cfg, diagnostics)?;
    Ok(RunOutcome {
        versions_analyzed: labels.len(),
        skipped: Vec::new(),
        diagnostics_logged: logged,
    })
}

fn load_instance_stage(
    cfg: &RunConfig,
) -> Result<(Vec<String>, Vec<Vec<SmellInstance>>), PipelineError> {
    let csv_dir = cfg.out.join("csv");
    for file in ["versions.csv", "smells.csv", "characteristics.csv"] {
        require_stage_input(&cfg.out, &csv_dir.join(file))?;
    }
    Ok(load_instances(&csv_dir)?)
}

/// Track stage: instance CSVs → `csv/temporal.csv`.
pub fn stage_track(cfg: &RunConfig) -> Result<RunOutcome, PipelineError> {
    let (labels, instances) = load_instance_stage(cfg)?;
    let temporal = build_temporal_instances(&instances, cfg.track_threshold)?;
    emit_temporal_csv(&temporal, &cfg.out.join("csv").join("temporal.csv"))?;
    Ok(RunOutcome { versions_analyzed: labels.len(), ..RunOutcome::default() })
}

/// Loads instances and temporal chains and reassembles the bundle,
/// picking up the latest component graph when the extract stage's
/// files are around.
fn load_bundle(cfg: &RunConfig) -> Result<AnalysisBundle, PipelineError> {
    let (labels, instances) = load_instance_stage(cfg)?;
    let csv_dir = cfg.out.join("csv");
    require_stage_input(&cfg.out, &csv_dir.join("temporal.csv"))?;
    let temporal = load_temporal(&csv_dir, &instances)?;
    let latest = if labels.is_empty() {
        None
    } else {
        let (_, cpath) = graph_paths(&cfg.out.join("graphs"), labels.len() - 1);
        match fs::File::open(&cpath) {
            Ok(file) => Some(load_graph(BufReader::new(file))?),
            Err(_) => None,
        }
    };
    Ok(AnalysisBundle::assemble(
        &cfg.project,
        labels,
        instances,
        temporal,
        latest.as_ref(),
        cfg.k_max,
        cfg.precedence_mode,
    ))
}

/// Evolve stage: instance + temporal CSVs → full CSV set and
/// `summary.json`.
pub fn stage_evolve(cfg: &RunConfig) -> Result<RunOutcome, PipelineError> {
    let bundle = load_bundle(cfg)?;
    emit_csv(&bundle, &cfg.out.join("csv"))?;
    let summary_path = cfg.out.join("summary.json");
    fs::write(&summary_path, summary_string(&bundle)?).map_err(io_err(&summary_path))?;
    Ok(RunOutcome {
        versions_analyzed: bundle.version_labels.len(),
        ..RunOutcome::default()
    })
}

/// Render stage: instance + temporal CSVs → `report.html`.
pub fn stage_render(cfg: &RunConfig) -> Result<RunOutcome, PipelineError> {
    let bundle = load_bundle(cfg)?;
    let path = cfg.out.join("report.html");
    fs::write(&path, render_html(&bundle)).map_err(io_err(&path))?;
    Ok(RunOutcome {
        versions_analyzed: bundle.version_labels.len(),
        ..RunOutcome::default()
    })
}
