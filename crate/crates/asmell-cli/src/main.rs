//! The `asmell` command: architectural smell detection and evolution
//! analysis over snapshot series of C/C++ projects.
//!
//! `asmell run` drives the whole pipeline; the stage subcommands
//! (`extract`, `detect`, `track`, `evolve`, `render`) run one step at a
//! time, chained through files in the output directory, so saved
//! dependency graphs can be analyzed without the original sources.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use asmell::detect::CdMode;
use asmell::evolve::PrecedenceMode;
use asmell::pipeline::{
    run_pipeline, stage_detect, stage_evolve, stage_extract, stage_render, stage_track,
    RunConfig, RunOutcome,
};

#[derive(Parser)]
#[command(
    name = "asmell",
    version,
    about = "Detects architectural smells in C/C++ dependency graphs and follows them across versions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the whole pipeline: extract, detect, track, evolve, render.
    Run(StageArgs),
    /// Extract dependency graphs from snapshots into `<out>/graphs/`.
    Extract(StageArgs),
    /// Detect smells on previously extracted graphs.
    Detect(StageArgs),
    /// Match detected instances across versions into temporal chains.
    Track(StageArgs),
    /// Run the trend, survival, co-occurrence, and precedence analyses.
    Evolve(StageArgs),
    /// Render `report.html` from the analysis CSVs.
    Render(StageArgs),
}

#[derive(Copy, Clone, ValueEnum)]
enum CdModeArg {
    /// One instance per strongly connected component.
    Scc,
    /// One instance per elementary cycle (bounded by the cd-max flags).
    Elementary,
}

#[derive(Args)]
struct StageArgs {
    /// Snapshot directories, oldest first — or a single file listing
    /// one directory per line. Later stages run without snapshots.
    #[arg(long, value_name = "DIR|FILE", num_args = 1..)]
    snapshots: Vec<PathBuf>,
    /// Extractor config file (roots, excludes, component map, ...).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory receiving all pipeline artefacts.
    #[arg(long, value_name = "DIR", default_value = "asmell-out")]
    out: PathBuf,
    /// Project name shown in the report. Defaults to the first
    /// snapshot's parent directory name.
    #[arg(long)]
    project: Option<String>,
    /// Cycle detection algorithm.
    #[arg(long, value_enum, default_value_t = CdModeArg::Scc)]
    cd_mode: CdModeArg,
    /// Elementary mode: ignore cycles longer than this (0 = no limit).
    #[arg(long, value_name = "N", default_value_t = 0)]
    cd_max_len: usize,
    /// Elementary mode: stop after this many cycles (0 = no limit).
    #[arg(long, value_name = "N", default_value_t = 0)]
    cd_max_count: usize,
    /// Jaccard similarity of affected sets needed to match instances
    /// across versions.
    #[arg(long, value_name = "0..1", default_value_t = 0.5)]
    track_threshold: f64,
    /// Match instances only when their affected sets are identical.
    #[arg(long)]
    track_exact: bool,
    /// Components below this LOC are never god components.
    #[arg(long, value_name = "LOC", default_value_t = 0)]
    gc_min_loc: u64,
    /// Minimum share of less-stable dependencies for an unstable
    /// dependency.
    #[arg(long, value_name = "0..1", default_value_t = 0.3)]
    ud_threshold: f64,
    /// Largest precedence window in versions (default: version count).
    #[arg(long, value_name = "K")]
    k_max: Option<usize>,
    /// Precedence matrices count ordered pairs instead of instances.
    #[arg(long)]
    precedence_pairs: bool,
    /// Worker threads for per-snapshot stages (0 = one per core).
    #[arg(long, value_name = "N", default_value_t = 0)]
    jobs: usize,
    /// Seed for sampled diagnostics in diagnostics.log.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Expands `--snapshots`: a single regular file is a manifest listing
/// one snapshot directory per line (relative to the manifest).
fn resolve_snapshots(args: &[PathBuf]) -> Result<Vec<PathBuf>> {
    if args.len() == 1 && args[0].is_file() {
        let manifest = &args[0];
        let text = fs::read_to_string(manifest)
            .with_context(|| format!("cannot read snapshot manifest `{}`", manifest.display()))?;
        let base = manifest.parent().unwrap_or_else(|| std::path::Path::new("."));
        let snapshots: Vec<PathBuf> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                let path = PathBuf::from(l);
                if path.is_absolute() {
                    path
                } else {
                    base.join(path)
                }
            })
            .collect();
        if snapshots.is_empty() {
            bail!("snapshot manifest `{}` lists no snapshots", manifest.display());
        }
        return Ok(snapshots);
    }
    Ok(args.to_vec())
}

fn to_run_config(args: StageArgs) -> Result<RunConfig> {
    let snapshots = resolve_snapshots(&args.snapshots)?;
    let mut cfg = RunConfig::new(snapshots, &args.out);
    if let Some(project) = args.project {
        cfg.project = project;
    }
    cfg.config = args.config;
    cfg.detector.cd_mode = match args.cd_mode {
        CdModeArg::Scc => CdMode::Scc,
        CdModeArg::Elementary => CdMode::Elementary,
    };
    cfg.detector.cd_max_len = args.cd_max_len;
    cfg.detector.cd_max_count = args.cd_max_count;
    cfg.detector.gc_min_loc = args.gc_min_loc;
    cfg.detector.ud_threshold = args.ud_threshold;
    cfg.track_threshold = if args.track_exact { 1.0 } else { args.track_threshold };
    cfg.k_max = args.k_max;
    cfg.precedence_mode = if args.precedence_pairs {
        PrecedenceMode::Pairs
    } else {
        PrecedenceMode::Instances
    };
    cfg.jobs = args.jobs;
    cfg.seed = args.seed;
    Ok(cfg)
}

fn report_outcome(verb: &str, cfg: &RunConfig, outcome: &RunOutcome) {
    println!("{verb} {} version(s) into {}", outcome.versions_analyzed, cfg.out.display());
    for (path, error) in &outcome.skipped {
        eprintln!("warning: snapshot `{path}` skipped: {error}");
    }
    if !outcome.skipped.is_empty() {
        eprintln!(
            "warning: {} snapshot(s) skipped; survivors were re-indexed (see {})",
            outcome.skipped.len(),
            cfg.out.join("diagnostics.log").display()
        );
    }
}

fn execute(command: Command) -> Result<RunOutcome> {
    let (verb, cfg, stage): (_, _, fn(&RunConfig) -> _) = match command {
        Command::Run(args) => ("analyzed", to_run_config(args)?, run_pipeline),
        Command::Extract(args) => ("extracted", to_run_config(args)?, stage_extract),
        Command::Detect(args) => ("detected smells in", to_run_config(args)?, stage_detect),
        Command::Track(args) => ("tracked", to_run_config(args)?, stage_track),
        Command::Evolve(args) => ("ran evolution analyses over", to_run_config(args)?, stage_evolve),
        Command::Render(args) => ("rendered the report for", to_run_config(args)?, stage_render),
    };
    let outcome = stage(&cfg)?;
    report_outcome(verb, &cfg, &outcome);
    Ok(outcome)
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::FAILURE
        }
    }
}
