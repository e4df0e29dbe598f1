//! Kaplan-Meier survival estimation over tracked smell lifetimes.
//!
//! Instances still alive in the last analysed version have a lifetime
//! that is right-censored: we know they lived *at least* that long. The
//! product-limit estimator uses them correctly, shrinking the risk set
//! without counting a death.

use serde::{Deserialize, Serialize};

use super::EvolveError;
use crate::track::TemporalInstance;

/// One observed lifetime in versions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lifetime {
    pub age: usize,
    /// True when the instance was still alive at the end of the history.
    pub censored: bool,
}

/// One step of a survival curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalPoint {
    /// Age in versions at which deaths occurred.
    pub t: usize,
    /// Number of lifetimes with age >= t.
    pub at_risk: usize,
    /// Number of uncensored lifetimes ending exactly at t.
    pub deaths: usize,
    /// Estimated probability of surviving beyond t.
    pub survival: f64,
}

/// A survival curve for one stratum of lifetimes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub stratum: String,
    /// Points at t = 0 and at each distinct event time, in order.
    pub points: Vec<SurvivalPoint>,
    /// Smallest age where survival drops to 0.5 or below, if it does.
    pub median: Option<usize>,
}

/// Product-limit estimate of the survival function for `lifetimes`.
///
/// Event times are the distinct ages of uncensored lifetimes. At each, the
/// estimate multiplies by `1 - deaths/at_risk`. The curve always starts
/// with a `t = 0` anchor at survival 1.
pub fn km_estimator(stratum: &str, lifetimes: &[Lifetime]) -> Result<SurvivalCurve, EvolveError> {
    if lifetimes.is_empty() {
        return Err(EvolveError::EmptyInput);
    }
    let mut event_times: Vec<usize> =
        lifetimes.iter().filter(|l| !l.censored).map(|l| l.age).collect();
    event_times.sort_unstable();
    event_times.dedup();

    let mut points = vec![SurvivalPoint {
        t: 0,
        at_risk: lifetimes.len(),
        deaths: 0,
        survival: 1.0,
    }];
    let mut survival = 1.0;
    let mut median = None;
    for t in event_times {
        let at_risk = lifetimes.iter().filter(|l| l.age >= t).count();
        let deaths = lifetimes.iter().filter(|l| !l.censored && l.age == t).count();
        survival *= 1.0 - deaths as f64 / at_risk as f64;
        points.push(SurvivalPoint { t, at_risk, deaths, survival });
        if median.is_none() && survival <= 0.5 {
            median = Some(t);
        }
    }
    Ok(SurvivalCurve { stratum: stratum.to_string(), points, median })
}

fn lifetime(t: &TemporalInstance) -> Lifetime {
    Lifetime { age: t.age, censored: t.is_censored() }
}

/// Survival curves stratified by smell kind, e.g. `CD.file`.
///
/// Kinds with no tracked instances produce no curve.
pub fn survival_by_kind(temporal: &[TemporalInstance]) -> Vec<SurvivalCurve> {
    let mut kinds: Vec<String> = temporal
        .iter()
        .map(|t| format!("{}.{}", t.smell_type.code(), t.level))
        .collect();
    kinds.sort();
    kinds.dedup();
    kinds
        .iter()
        .map(|kind| {
            let lifetimes: Vec<Lifetime> = temporal
                .iter()
                .filter(|t| format!("{}.{}", t.smell_type.code(), t.level) == *kind)
                .map(lifetime)
                .collect();
            km_estimator(kind, &lifetimes).expect("kinds are drawn from the instances")
        })
        .collect()
}

/// Survival curves for cyclic dependencies, pooled over both levels and
/// stratified by the shape the cycle was born with.
pub fn survival_by_shape(temporal: &[TemporalInstance]) -> Vec<SurvivalCurve> {
    let cycles: Vec<(&str, Lifetime)> = temporal
        .iter()
        .filter(|t| t.smell_type == crate::detect::SmellType::CyclicDependency)
        .filter_map(|t| match t.shapes.first() {
            Some(shape) if !shape.is_empty() => Some((shape.as_str(), lifetime(t))),
            _ => None,
        })
        .collect();
    let mut shapes: Vec<&str> = cycles.iter().map(|(shape, _)| *shape).collect();
    shapes.sort_unstable();
    shapes.dedup();
    shapes
        .iter()
        .map(|shape| {
            let lifetimes: Vec<Lifetime> = cycles
                .iter()
                .filter(|(s, _)| s == shape)
                .map(|(_, l)| *l)
                .collect();
            km_estimator(shape, &lifetimes).expect("shapes are drawn from the instances")
        })
        .collect()
}
