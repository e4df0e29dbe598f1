//! Non-fatal diagnostics shared across pipeline stages.
//!
//! Stages report recoverable oddities — an include that resolved to two
//! files, a header cycle, a detector that abstained — as [`Diagnostic`]
//! values instead of failing. The pipeline collects them into
//! `diagnostics.log`; library callers get them back alongside results.

use std::fmt;

use serde::{Deserialize, Serialize};

/// What kind of oddity a diagnostic reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DiagnosticKind {
    /// An include spec matched several files at the same precedence tier.
    AmbiguousInclude,
    /// An include spec matched nothing and was dropped.
    UnresolvedInclude,
    /// An `#include` line that could not be parsed (macro argument,
    /// unterminated spec, ...).
    MalformedInclude,
    /// Header files include each other in a cycle; the cycle was collapsed
    /// as a unit during hoisting.
    CycleInHeaderChain,
    /// A configured scan or include root does not exist in the snapshot.
    MissingRoot,
    /// An injected extra edge names a file absent from the hoisted graph.
    UnknownEdgeEndpoint,
    /// God-component detection abstained: fewer than four components.
    TooFewComponents,
    /// Elementary-cycle enumeration hit its configured cap.
    CycleEnumerationTruncated,
    /// PageRank stopped at the iteration cap before reaching tolerance.
    PagerankNotConverged,
    /// A snapshot failed to extract and was skipped.
    SnapshotFailed,
}

impl DiagnosticKind {
    /// Stable kebab-case tag used in `diagnostics.log`.
    pub fn tag(&self) -> &'static str {
        match self {
            DiagnosticKind::AmbiguousInclude => "ambiguous-include",
            DiagnosticKind::UnresolvedInclude => "unresolved-include",
            DiagnosticKind::MalformedInclude => "malformed-include",
            DiagnosticKind::CycleInHeaderChain => "cycle-in-header-chain",
            DiagnosticKind::MissingRoot => "missing-root",
            DiagnosticKind::UnknownEdgeEndpoint => "unknown-edge-endpoint",
            DiagnosticKind::TooFewComponents => "too-few-components",
            DiagnosticKind::CycleEnumerationTruncated => "cycle-enumeration-truncated",
            DiagnosticKind::PagerankNotConverged => "pagerank-not-converged",
            DiagnosticKind::SnapshotFailed => "snapshot-failed",
        }
    }
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// One non-fatal finding, ready to be logged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
}

impl Diagnostic {
    pub fn new(kind: DiagnosticKind, message: impl Into<String>) -> Self {
        Diagnostic { kind, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.kind, self.message)
    }
}
