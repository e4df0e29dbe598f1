//! Evolution analyses over tracked smells: trend classification of
//! characteristic series (dynamic time warping against reference
//! templates), Kaplan-Meier survival estimation, and co-occurrence /
//! precedence matrices.

mod cooc;
mod dtw;
mod precedence;
mod survival;
mod transitions;
mod trend;

pub use cooc::{
    combine_weighted, cooccurrence_matrix, cooc_kinds, sets_intersect, CoocEntry, CoocMatrix,
};
pub use dtw::dtw_distance;
pub use precedence::{
    precedence_kind, precedence_kinds, precedence_matrices, precedence_matrix, PrecedenceMode,
};
pub use survival::{
    km_estimator, survival_by_kind, survival_by_shape, Lifetime, SurvivalCurve, SurvivalPoint,
};
pub use transitions::{shape_transitions, ShapeTransitionStats};
pub use trend::{
    characteristic_series, classify_trend, trend_templates, CharacteristicSeries, TrendGroup,
    TrendLabel, TrendTemplate,
};

use thiserror::Error;

/// Errors from the evolution analyses.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvolveError {
    #[error("sequence of length {len} is shorter than the required {min}")]
    TooShort { len: usize, min: usize },
    #[error("survival estimation needs at least one lifetime")]
    EmptyInput,
}
