//! Node metrics: fan-in/out, instability, and PageRank centrality.
//!
//! All metrics are computed per graph and indexed by the graph's dense node
//! ids, so a metrics vector lines up with [`DependencyGraph::nodes`].

use thiserror::Error;

use crate::graph::DependencyGraph;

/// Errors from metric computation or lookup.
#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("PageRank needs at least one node")]
    EmptyGraph,
    #[error("no metric recorded for `{path}`")]
    MissingMetric { path: String },
}

/// Distinct dependants and dependencies of every node: `(fan_in, fan_out)`
/// aligned with the graph's node order.
pub fn compute_fan(graph: &DependencyGraph) -> Vec<(usize, usize)> {
    (0..graph.node_count())
        .map(|i| (graph.in_neighbors(i).len(), graph.out_neighbors(i).len()))
        .collect()
}

/// Instability `I = fan_out / (fan_in + fan_out)`; an isolated node is
/// defined as perfectly stable (0).
pub fn instability(fan_in: usize, fan_out: usize) -> f64 {
    if fan_in + fan_out == 0 {
        0.0
    } else {
        fan_out as f64 / (fan_in + fan_out) as f64
    }
}

/// PageRank parameters. The defaults are the conventional ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PagerankConfig {
    /// Damping factor `d`: probability of following an edge rather than
    /// teleporting.
    pub damping: f64,
    /// Convergence threshold on the L1 change between iterations.
    pub eps: f64,
    /// Iteration cap; hitting it flags the result as unconverged.
    pub max_iter: usize,
}

impl Default for PagerankConfig {
    fn default() -> Self {
        PagerankConfig { damping: 0.85, eps: 1e-10, max_iter: 200 }
    }
}

/// PageRank scores plus how the iteration ended.
#[derive(Debug, Clone, PartialEq)]
pub struct PagerankResult {
    /// Scores aligned with the graph's node order; they sum to 1.
    pub scores: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Power-iteration PageRank with uniform teleport; the rank of dangling
/// nodes is redistributed uniformly each step.
pub fn pagerank(graph: &DependencyGraph, config: &PagerankConfig) -> Result<PagerankResult, MetricsError> {
    let n = graph.node_count();
    if n == 0 {
        return Err(MetricsError::EmptyGraph);
    }
    let nf = n as f64;
    let d = config.damping;
    let mut scores = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    for iteration in 1..=config.max_iter {
        let dangling: f64 = (0..n)
            .filter(|&i| graph.out_neighbors(i).is_empty())
            .map(|i| scores[i])
            .sum();
        let base = (1.0 - d) / nf + d * dangling / nf;
        next.iter_mut().for_each(|x| *x = base);
        for (src, dst) in graph.edges() {
            next[dst] += d * scores[src] / graph.out_neighbors(src).len() as f64;
        }
        let delta: f64 = scores.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut scores, &mut next);
        if delta < config.eps {
            return Ok(PagerankResult { scores, converged: true, iterations: iteration });
        }
    }
    Ok(PagerankResult { scores, converged: false, iterations: config.max_iter })
}

/// All node metrics of one graph, ready for the detectors.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphMetrics {
    pub fan_in: Vec<usize>,
    pub fan_out: Vec<usize>,
    pub instability: Vec<f64>,
    pub pagerank: Vec<f64>,
    pub pagerank_converged: bool,
}

/// Computes every node metric in one go. An empty graph yields empty
/// metrics rather than an error.
pub fn compute_metrics(graph: &DependencyGraph, config: &PagerankConfig) -> GraphMetrics {
    if graph.node_count() == 0 {
        return GraphMetrics {
            fan_in: Vec::new(),
            fan_out: Vec::new(),
            instability: Vec::new(),
            pagerank: Vec::new(),
            pagerank_converged: true,
        };
    }
    let fan = compute_fan(graph);
    let inst = fan.iter().map(|&(fi, fo)| instability(fi, fo)).collect();
    let pr = pagerank(graph, config).expect("non-empty graph");
    GraphMetrics {
        fan_in: fan.iter().map(|&(fi, _)| fi).collect(),
        fan_out: fan.iter().map(|&(_, fo)| fo).collect(),
        instability: inst,
        pagerank: pr.scores,
        pagerank_converged: pr.converged,
    }
}

/// Centrality of a smell: the maximum PageRank over the affected artefacts,
/// normalized by the number of artefacts in the graph (multiplied by the
/// node count, so a uniform graph scores 1).
///
/// `affected` holds node paths of the same level as `graph`; an unknown
/// path is a [`MetricsError::MissingMetric`].
pub fn smell_centrality<'a>(
    affected: impl IntoIterator<Item = &'a str>,
    graph: &DependencyGraph,
    scores: &[f64],
) -> Result<f64, MetricsError> {
    let mut max: Option<f64> = None;
    for path in affected {
        let idx = graph
            .index_of(path)
            .ok_or_else(|| MetricsError::MissingMetric { path: path.to_string() })?;
        let score = scores[idx];
        max = Some(match max {
            Some(m) if m >= score => m,
            _ => score,
        });
    }
    Ok(max.unwrap_or(0.0) * graph.node_count() as f64)
}
