//! Trend classification: match each characteristic series against seven
//! reference templates and group the winner into constant, increasing, or
//! decreasing.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{dtw_distance, EvolveError};
use crate::detect::{CharValue, SmellInstance};
use crate::track::TemporalInstance;

/// The seven reference templates. Each is four points built from the
/// signal's own extremes `l`/`h` and midpoint `m`: a flat line at `m`, a
/// gradual rise, an early/late sudden rise, and their three mirrored
/// falls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TrendTemplate {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl TrendTemplate {
    pub const ALL: [TrendTemplate; 7] = [
        TrendTemplate::A,
        TrendTemplate::B,
        TrendTemplate::C,
        TrendTemplate::D,
        TrendTemplate::E,
        TrendTemplate::F,
        TrendTemplate::G,
    ];

    pub fn letter(&self) -> &'static str {
        match self {
            TrendTemplate::A => "a",
            TrendTemplate::B => "b",
            TrendTemplate::C => "c",
            TrendTemplate::D => "d",
            TrendTemplate::E => "e",
            TrendTemplate::F => "f",
            TrendTemplate::G => "g",
        }
    }

    pub fn group(&self) -> TrendGroup {
        match self {
            TrendTemplate::A => TrendGroup::Constant,
            TrendTemplate::B | TrendTemplate::C | TrendTemplate::D => TrendGroup::Increasing,
            TrendTemplate::E | TrendTemplate::F | TrendTemplate::G => TrendGroup::Decreasing,
        }
    }
}

impl fmt::Display for TrendTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.letter())
    }
}

/// Template groups, the unit the share-of-trends statistics report on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TrendGroup {
    Constant,
    Increasing,
    Decreasing,
}

impl TrendGroup {
    pub fn name(&self) -> &'static str {
        match self {
            TrendGroup::Constant => "constant",
            TrendGroup::Increasing => "increasing",
            TrendGroup::Decreasing => "decreasing",
        }
    }
}

impl fmt::Display for TrendGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A classification outcome: the winning template and its group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrendLabel {
    pub template: TrendTemplate,
    pub group: TrendGroup,
}

impl From<TrendTemplate> for TrendLabel {
    fn from(template: TrendTemplate) -> Self {
        TrendLabel { template, group: template.group() }
    }
}

/// The seven 4-point templates for a signal with extremes `l` and `h`.
pub fn trend_templates(l: f64, h: f64) -> [(TrendTemplate, [f64; 4]); 7] {
    let m = (h + l) / 2.0;
    let step = (h - l) / 3.0;
    [
        (TrendTemplate::A, [m, m, m, m]),
        (TrendTemplate::B, [l, l + step, l + 2.0 * step, h]),
        (TrendTemplate::C, [l, l, h, h]),
        (TrendTemplate::D, [l, l, l, h]),
        (TrendTemplate::E, [h, h - step, h - 2.0 * step, l]),
        (TrendTemplate::F, [h, h, l, l]),
        (TrendTemplate::G, [h, h, h, l]),
    ]
}

/// Classifies a characteristic series by its closest template under
/// [`dtw_distance`], ties broken by template order `a` < … < `g`.
///
/// Template extremes are recomputed from each series. A flat series
/// (`h = l`) is constant by definition: every template collapses to the
/// same points, so template `a` is returned outright. Series must have at
/// least three values.
///
/// Time warping cannot tell *when* a step happens, so the late-step
/// templates `d` and `g` are warping-equivalent to the sudden steps `c`
/// and `f`; the tie rule makes `c` and `f` the canonical labels for step
/// series. Groups are unaffected: both members of each pair increase or
/// decrease together.
pub fn classify_trend(series: &[f64]) -> Result<TrendLabel, EvolveError> {
    if series.len() < 3 {
        return Err(EvolveError::TooShort { len: series.len(), min: 3 });
    }
    let l = series.iter().copied().fold(f64::INFINITY, f64::min);
    let h = series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if l == h {
        return Ok(TrendTemplate::A.into());
    }
    let mut best: Option<(f64, TrendTemplate)> = None;
    for (template, points) in trend_templates(l, h) {
        let distance = dtw_distance(series, &points).expect("lengths checked above");
        if best.is_none_or(|(lowest, _)| distance < lowest) {
            best = Some((distance, template));
        }
    }
    Ok(best.expect("seven templates evaluated").1.into())
}

/// One characteristic followed along one temporal instance's chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicSeries {
    pub tid: String,
    pub characteristic: String,
    /// One value per chain version, in version order.
    pub values: Vec<f64>,
}

/// Extracts every numeric characteristic series from the tracked chains.
///
/// A characteristic yields a series only when every chain member carries
/// it as a number, so series length always equals the instance's age.
/// Chain members are resolved against `versions`, which must contain the
/// instances tracking ran on.
pub fn characteristic_series(
    versions: &[Vec<SmellInstance>],
    temporal: &[TemporalInstance],
) -> Vec<CharacteristicSeries> {
    let by_id: BTreeMap<&str, &SmellInstance> =
        versions.iter().flatten().map(|i| (i.id.as_str(), i)).collect();
    let mut series = Vec::new();
    for t in temporal {
        let members: Vec<&SmellInstance> = t
            .chain
            .iter()
            .map(|link| {
                *by_id
                    .get(link.instance_id.as_str())
                    .expect("chain member missing from the version lists")
            })
            .collect();
        let mut names: BTreeSet<&str> = members[0]
            .characteristics
            .iter()
            .filter(|(_, v)| matches!(v, CharValue::Num(_)))
            .map(|(name, _)| name.as_str())
            .collect();
        for member in &members[1..] {
            names.retain(|name| member.characteristic_num(name).is_some());
        }
        for name in names {
            series.push(CharacteristicSeries {
                tid: t.tid.clone(),
                characteristic: name.to_string(),
                values: members
                    .iter()
                    .map(|m| m.characteristic_num(name).expect("name retained above"))
                    .collect(),
            });
        }
    }
    series.sort_by(|a, b| (&a.tid, &a.characteristic).cmp(&(&b.tid, &b.characteristic)));
    series
}
