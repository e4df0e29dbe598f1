//! CSV serialization of the analysis bundle, plus the loaders that let
//! pipeline stages consume each other's files.
//!
//! Columns are fixed, rows are emitted in a deterministic order, and
//! quoting follows RFC 4180 (fields are quoted only when they contain
//! separators, quotes, or line breaks), so re-running a stage produces
//! byte-identical files.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use csv::{Reader, Writer};

use super::{
    counts_over_time, degree_histogram, heatmap, totals, trend_tallies, AnalysisBundle,
    ReportError,
};
use crate::detect::{characteristic, CharValue, Role, SmellInstance, SmellType};
use crate::evolve::CoocMatrix;
use crate::graph::Level;
use crate::track::{ChainLink, TemporalInstance};

/// Writes every CSV file into `dir`.
pub fn emit_csv(bundle: &AnalysisBundle, dir: &Path) -> Result<(), ReportError> {
    emit_instances_csv(&bundle.version_labels, &bundle.instances, dir)?;
    emit_temporal_csv(&bundle.temporal, &dir.join("temporal.csv"))?;
    write_trends(bundle, &dir.join("trends.csv"))?;
    write_trend_tallies(bundle, &dir.join("trend_tallies.csv"))?;
    write_survival(bundle, &dir.join("survival.csv"))?;
    write_survival_medians(bundle, &dir.join("survival_medians.csv"))?;
    write_cooc(&bundle.cooc_component, &dir.join("cooc_component.csv"))?;
    write_cooc(&bundle.cooc_file, &dir.join("cooc_file.csv"))?;
    write_precedence(bundle, &dir.join("precedence_k.csv"))?;
    write_transitions(bundle, &dir.join("shape_transitions.csv"))?;
    write_counts(bundle, &dir.join("counts_over_time.csv"))?;
    write_heatmap(bundle, &dir.join("heatmap.csv"))?;
    write_degrees(bundle, &dir.join("degree_histogram.csv"))?;
    write_totals(bundle, &dir.join("totals.csv"))?;
    Ok(())
}

/// Writes the detect-stage file trio: the version manifest plus smell
/// and characteristic rows. The manifest lists every analyzed version,
/// including versions where nothing was detected.
pub(crate) fn emit_instances_csv(
    labels: &[String],
    instances: &[Vec<SmellInstance>],
    dir: &Path,
) -> Result<(), ReportError> {
    emit_versions_csv(labels, &dir.join("versions.csv"))?;
    write_smells(labels, instances, &dir.join("smells.csv"))?;
    write_characteristics(instances, &dir.join("characteristics.csv"))?;
    Ok(())
}

pub(crate) fn emit_versions_csv(labels: &[String], path: &Path) -> Result<(), ReportError> {
    let mut w = Writer::from_path(path)?;
    w.write_record(["version_index", "version_label"])?;
    for (v, label) in labels.iter().enumerate() {
        w.write_record([v.to_string().as_str(), label])?;
    }
    Ok(w.flush()?)
}

/// One row per (instance, role, artefact).
fn write_smells(
    labels: &[String],
    versions: &[Vec<SmellInstance>],
    path: &Path,
) -> Result<(), ReportError> {
    let mut w = Writer::from_path(path)?;
    w.write_record(["version_index", "version_label", "type", "level", "id", "role", "artefact"])?;
    for (v, instances) in versions.iter().enumerate() {
        let label = labels.get(v).map(String::as_str).unwrap_or("");
        for instance in instances {
            for (role, artefacts) in &instance.roles {
                for artefact in artefacts {
                    w.write_record([
                        v.to_string().as_str(),
                        label,
                        instance.smell_type.code(),
                        &instance.level.to_string(),
                        &instance.id,
                        role.name(),
                        artefact,
                    ])?;
                }
            }
        }
    }
    Ok(w.flush()?)
}

fn write_characteristics(
    versions: &[Vec<SmellInstance>],
    path: &Path,
) -> Result<(), ReportError> {
    let mut w = Writer::from_path(path)?;
    w.write_record(["id", "name", "value"])?;
    for instance in versions.iter().flatten() {
        for (name, value) in &instance.characteristics {
            let value = match value {
                CharValue::Num(n) => n.to_string(),
                CharValue::Tag(t) => t.clone(),
            };
            w.write_record([instance.id.as_str(), name, &value])?;
        }
    }
    Ok(w.flush()?)
}

pub(crate) fn emit_temporal_csv(
    temporal: &[TemporalInstance],
    path: &Path,
) -> Result<(), ReportError> {
    let mut w = Writer::from_path(path)?;
    w.write_record(["tid", "type", "level", "birth", "death_or_C", "age", "member_instance_ids"])?;
    for t in temporal {
        let death = match t.death_version {
            Some(d) => d.to_string(),
            None => "C".to_string(),
        };
        let members: Vec<&str> = t.chain.iter().map(|l| l.instance_id.as_str()).collect();
        w.write_record([
            t.tid.as_str(),
            t.smell_type.code(),
            &t.level.to_string(),
            &t.birth_version.to_string(),
            &death,
            &t.age.to_string(),
            &members.join(";"),
        ])?;
    }
    Ok(w.flush()?)
}

fn write_trends(bundle: &AnalysisBundle, path: &Path) -> Result<(), ReportError> {
    let mut w = Writer::from_path(path)?;
    w.write_record(["tid", "characteristic", "template", "group"])?;
    for record in &bundle.trends {
        w.write_record([
            record.tid.as_str(),
            &record.characteristic,
            record.label.template.letter(),
            record.label.group.name(),
        ])?;
    }
    Ok(w.flush()?)
}

fn write_trend_tallies(bundle: &AnalysisBundle, path: &Path) -> Result<(), ReportError> {
    let mut w = Writer::from_path(path)?;
    w.write_record(["characteristic", "group", "count", "share_pct"])?;
    for (characteristic, group, count, share) in trend_tallies(bundle) {
        w.write_record([
            characteristic.as_str(),
            group.name(),
            &count.to_string(),
            &share.to_string(),
        ])?;
    }
    Ok(w.flush()?)
}

fn write_survival(bundle: &AnalysisBundle, path: &Path) -> Result<(), ReportError> {
    let mut w = Writer::from_path(path)?;
    w.write_record(["stratum", "t", "n", "d", "S"])?;
    for curve in bundle.survival_kinds.iter().chain(&bundle.survival_shapes) {
        for point in &curve.points {
            w.write_record([
                curve.stratum.as_str(),
                &point.t.to_string(),
                &point.at_risk.to_string(),
                &point.deaths.to_string(),
                &point.survival.to_string(),
            ])?;
        }
    }
    Ok(w.flush()?)
}

fn write_survival_medians(bundle: &AnalysisBundle, path: &Path) -> Result<(), ReportError> {
    let mut w = Writer::from_path(path)?;
    w.write_record(["stratum", "median"])?;
    for curve in bundle.survival_kinds.iter().chain(&bundle.survival_shapes) {
        let median = curve.median.map(|m| m.to_string()).unwrap_or_default();
        w.write_record([curve.stratum.as_str(), &median])?;
    }
    Ok(w.flush()?)
}

fn write_cooc(matrix: &CoocMatrix, path: &Path) -> Result<(), ReportError> {
    let mut w = Writer::from_path(path)?;
    w.write_record(["row", "col", "overlapping", "total", "pct"])?;
    for row in &matrix.kinds {
        for col in &matrix.kinds {
            if row == col {
                continue;
            }
            let entry = matrix.entries[&(row.clone(), col.clone())];
            let pct = entry.percentage().map(|p| p.to_string()).unwrap_or_default();
            w.write_record([
                row.as_str(),
                col,
                &entry.numerator.to_string(),
                &entry.denominator.to_string(),
                &pct,
            ])?;
        }
    }
    Ok(w.flush()?)
}

/// Long format over every window: one row per (k, row kind, col kind).
fn write_precedence(bundle: &AnalysisBundle, path: &Path) -> Result<(), ReportError> {
    let mut w = Writer::from_path(path)?;
    w.write_record(["k", "row", "col", "pct"])?;
    for matrix in &bundle.precedence {
        let k = matrix.k.expect("precedence matrices always carry k").to_string();
        for row in &matrix.kinds {
            for col in &matrix.kinds {
                if row == col {
                    continue;
                }
                let entry = matrix.entries[&(row.clone(), col.clone())];
                let pct = entry.percentage().map(|p| p.to_string()).unwrap_or_default();
                w.write_record([k.as_str(), row, col, &pct])?;
            }
        }
    }
    Ok(w.flush()?)
}

fn write_transitions(bundle: &AnalysisBundle, path: &Path) -> Result<(), ReportError> {
    let mut w = Writer::from_path(path)?;
    w.write_record(["from", "to", "transitions", "instances"])?;
    for ((from, to), count) in &bundle.transitions.transition_counts {
        let instances = bundle.transitions.transition_instances[&(from.clone(), to.clone())];
        w.write_record([
            from.as_str(),
            to,
            &count.to_string(),
            &instances.to_string(),
        ])?;
    }
    Ok(w.flush()?)
}

fn write_counts(bundle: &AnalysisBundle, path: &Path) -> Result<(), ReportError> {
    let mut w = Writer::from_path(path)?;
    w.write_record(["version_index", "version_label", "type", "level", "count"])?;
    for (v, smell_type, level, count) in counts_over_time(bundle) {
        let label = bundle.version_labels.get(v).map(String::as_str).unwrap_or("");
        w.write_record([
            v.to_string().as_str(),
            label,
            smell_type.code(),
            &level.to_string(),
            &count.to_string(),
        ])?;
    }
    Ok(w.flush()?)
}

fn write_heatmap(bundle: &AnalysisBundle, path: &Path) -> Result<(), ReportError> {
    let mut w = Writer::from_path(path)?;
    w.write_record(["component", "type", "count"])?;
    for (component, smell_type, count) in heatmap(bundle) {
        w.write_record([component.as_str(), smell_type.code(), &count.to_string()])?;
    }
    Ok(w.flush()?)
}

fn write_degrees(bundle: &AnalysisBundle, path: &Path) -> Result<(), ReportError> {
    let mut w = Writer::from_path(path)?;
    w.write_record(["direction", "degree", "count"])?;
    let (fan_in, fan_out) = degree_histogram(bundle);
    for (direction, histogram) in [("in", fan_in), ("out", fan_out)] {
        for (degree, count) in histogram {
            w.write_record([direction, &degree.to_string(), &count.to_string()])?;
        }
    }
    Ok(w.flush()?)
}

fn write_totals(bundle: &AnalysisBundle, path: &Path) -> Result<(), ReportError> {
    let mut w = Writer::from_path(path)?;
    w.write_record(["type", "level", "instances", "temporal_instances"])?;
    for (smell_type, level, instances, chains) in totals(bundle) {
        w.write_record([
            smell_type.code(),
            &level.to_string(),
            &instances.to_string(),
            &chains.to_string(),
        ])?;
    }
    Ok(w.flush()?)
}

fn malformed(path: &Path, message: impl Into<String>) -> ReportError {
    ReportError::Malformed { file: path.display().to_string(), message: message.into() }
}

/// Reads a version manifest: ordered labels, indices checked.
pub(crate) fn load_versions_csv(path: &Path) -> Result<Vec<String>, ReportError> {
    let mut labels = Vec::new();
    let mut reader = Reader::from_path(path)?;
    for record in reader.records() {
        let record = record?;
        let v: usize = record
            .get(0)
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| malformed(path, "bad version_index"))?;
        if v != labels.len() {
            return Err(malformed(path, format!("version {v} out of order")));
        }
        labels.push(record.get(1).unwrap_or("").to_string());
    }
    Ok(labels)
}

/// Reads `versions.csv`, `smells.csv`, and `characteristics.csv` from
/// `dir` back into per-version instance lists.
///
/// Characteristic values that parse as numbers are numbers; everything
/// else is a tag (tags like shape names are never numeric).
pub fn load_instances(
    dir: &Path,
) -> Result<(Vec<String>, Vec<Vec<SmellInstance>>), ReportError> {
    let labels = load_versions_csv(&dir.join("versions.csv"))?;

    let characteristics_path = dir.join("characteristics.csv");
    let mut characteristics: BTreeMap<String, BTreeMap<String, CharValue>> = BTreeMap::new();
    let mut reader = Reader::from_path(&characteristics_path)?;
    for record in reader.records() {
        let record = record?;
        let (id, name, value) = (
            record.get(0).unwrap_or(""),
            record.get(1).unwrap_or(""),
            record.get(2).unwrap_or(""),
        );
        let value = match value.parse::<f64>() {
            Ok(n) => CharValue::Num(n),
            Err(_) => CharValue::Tag(value.to_string()),
        };
        characteristics.entry(id.to_string()).or_default().insert(name.to_string(), value);
    }

    let smells_path = dir.join("smells.csv");
    let mut order: Vec<String> = Vec::new();
    struct Partial {
        smell_type: SmellType,
        level: Level,
        version: usize,
        roles: BTreeMap<Role, BTreeSet<String>>,
    }
    let mut partials: BTreeMap<String, Partial> = BTreeMap::new();
    let mut reader = Reader::from_path(&smells_path)?;
    for record in reader.records() {
        let record = record?;
        let field = |i: usize| record.get(i).unwrap_or("");
        let version: usize = field(0)
            .parse()
            .map_err(|_| malformed(&smells_path, "bad version_index"))?;
        let smell_type: SmellType = field(2)
            .parse()
            .map_err(|_| malformed(&smells_path, format!("unknown type {:?}", field(2))))?;
        let level: Level = field(3)
            .parse()
            .map_err(|_| malformed(&smells_path, format!("unknown level {:?}", field(3))))?;
        let id = field(4).to_string();
        let role: Role = field(5)
            .parse()
            .map_err(|_| malformed(&smells_path, format!("unknown role {:?}", field(5))))?;
        let partial = partials.entry(id.clone()).or_insert_with(|| {
            order.push(id.clone());
            Partial { smell_type, level, version, roles: BTreeMap::new() }
        });
        partial.roles.entry(role).or_default().insert(field(6).to_string());
    }

    let version_count = labels
        .len()
        .max(partials.values().map(|p| p.version + 1).max().unwrap_or(0));
    let mut instances = vec![Vec::new(); version_count];
    for id in order {
        let partial = partials.remove(&id).expect("ordered ids come from the map");
        let mut instance = SmellInstance::new(
            partial.smell_type,
            partial.level,
            partial.version,
            partial.roles,
            characteristics.remove(&id).unwrap_or_default(),
        );
        instance.id = id;
        instances[partial.version].push(instance);
    }
    Ok((labels, instances))
}

/// Reads `temporal.csv` back, resolving chain members and cycle shapes
/// against already-loaded instances.
pub fn load_temporal(
    dir: &Path,
    instances: &[Vec<SmellInstance>],
) -> Result<Vec<TemporalInstance>, ReportError> {
    let by_id: BTreeMap<&str, &SmellInstance> =
        instances.iter().flatten().map(|i| (i.id.as_str(), i)).collect();
    let path = dir.join("temporal.csv");
    let mut temporal = Vec::new();
    let mut reader = Reader::from_path(&path)?;
    for record in reader.records() {
        let record = record?;
        let field = |i: usize| record.get(i).unwrap_or("");
        let smell_type: SmellType = field(1)
            .parse()
            .map_err(|_| malformed(&path, format!("unknown type {:?}", field(1))))?;
        let level: Level = field(2)
            .parse()
            .map_err(|_| malformed(&path, format!("unknown level {:?}", field(2))))?;
        let birth_version: usize =
            field(3).parse().map_err(|_| malformed(&path, "bad birth"))?;
        let death_version = match field(4) {
            "C" => None,
            d => Some(d.parse().map_err(|_| malformed(&path, "bad death version"))?),
        };
        let age: usize = field(5).parse().map_err(|_| malformed(&path, "bad age"))?;
        let mut chain = Vec::new();
        let mut shapes = Vec::new();
        for member in field(6).split(';').filter(|m| !m.is_empty()) {
            let instance = by_id
                .get(member)
                .ok_or_else(|| malformed(&path, format!("unknown member id {member:?}")))?;
            chain.push(ChainLink {
                version_index: instance.version_index,
                instance_id: member.to_string(),
            });
            if smell_type == SmellType::CyclicDependency {
                shapes.push(
                    instance
                        .characteristic_tag(characteristic::SHAPE)
                        .unwrap_or_default()
                        .to_string(),
                );
            }
        }
        if chain.len() != age {
            return Err(malformed(&path, format!("age {age} != {} members", chain.len())));
        }
        temporal.push(TemporalInstance {
            tid: field(0).to_string(),
            smell_type,
            level,
            chain,
            birth_version,
            death_version,
            age,
            shapes,
        });
    }
    Ok(temporal)
}
