//! Architectural smell detection and evolution analysis for C/C++ codebases.
//!
//! `asmell` extracts dependency graphs from successive snapshots of a C/C++
//! project, detects four architectural smells on them — cyclic dependencies,
//! hub-like dependencies, unstable dependencies, and god components — and
//! follows each smell instance across versions to answer how smells are
//! born, grow, and die:
//!
//! * how smell characteristics trend over an instance's life (dynamic time
//!   warping against shape templates),
//! * how long instances survive (Kaplan-Meier estimation with censoring),
//! * which smells co-occur on the same artefacts and which tend to arrive
//!   first (co-occurrence and precedence matrices).
//!
//! The crate is organized as a pipeline; each stage is usable on its own:
//!
//! 1. [`extract`] — scan snapshot directories, resolve `#include`s, hoist
//!    header dependencies onto implementation files, and emit file- and
//!    component-level [`graph::DependencyGraph`]s.
//! 2. [`metrics`] — fan-in/out, instability, PageRank centrality.
//! 3. [`detect`] — the four smell detectors plus shape and design-level
//!    classification for cycles.
//! 4. [`track`] — match instances across consecutive versions into temporal
//!    instances with birth, death, and age.
//! 5. [`evolve`] — trends, survival curves, co-occurrence and precedence.
//! 6. [`report`] — deterministic CSV exports plus a self-contained HTML
//!    report with inline SVG charts.
//! 7. [`pipeline`] — orchestration, stage caching, and the `asmell` CLI's
//!    entry points.

pub mod detect;
pub mod diag;
pub mod evolve;
pub mod extract;
pub mod graph;
pub mod metrics;
pub mod pipeline;
pub mod report;
pub mod track;

// The book's code samples double as documentation tests so the guide cannot
// drift from the library. Chapters without runnable Rust are omitted.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $file:literal) => {
            #[doc = include_str!(concat!("../../../book/src/", $file))]
            mod $name {}
        };
    }

    chapter!(graphs, "graphs.md");
    chapter!(extraction, "extraction.md");
    chapter!(metrics, "metrics.md");
    chapter!(smells, "smells.md");
    chapter!(tracking, "tracking.md");
    chapter!(trends, "trends.md");
    chapter!(survival, "survival.md");
    chapter!(overlap, "overlap.md");
    chapter!(reporting, "reporting.md");
}
