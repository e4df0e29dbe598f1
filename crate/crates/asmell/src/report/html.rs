//! Renders the analysis bundle as one self-contained HTML page.
//!
//! The page inlines all CSS and SVG and references nothing external.
//! The renderer only formats data that [`super`]'s derivation helpers
//! (and therefore the CSV files) already expose — it computes layout,
//! never new numbers.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::svg::{self, escape, fmt, Scale};
use super::{
    counts_over_time, degree_histogram, heatmap, kind_order, top_smells, totals,
    trend_tallies, AnalysisBundle,
};
use crate::detect::SmellType;
use crate::evolve::{CoocMatrix, SurvivalCurve};
use crate::graph::strongly_connected_components;

const PALETTE: [&str; 8] = [
    "#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2", "#9d755d", "#eeca3b", "#b279a2",
];

const CHART_W: f64 = 640.0;
const CHART_H: f64 = 260.0;
const MARGIN_L: f64 = 48.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 16.0;
const MARGIN_B: f64 = 40.0;

/// Renders the full report page.
pub fn render_html(bundle: &AnalysisBundle) -> String {
    let mut page = String::new();
    page.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    let _ = writeln!(page, "<title>{} — architectural smells</title>", escape(&bundle.project));
    page.push_str("<style>\n");
    page.push_str(STYLE);
    style_palette(&mut page);
    page.push_str("</style>\n</head>\n<body>\n");
    header_section(bundle, &mut page);
    overview_section(bundle, &mut page);
    heatmap_section(bundle, &mut page);
    counts_section(bundle, &mut page);
    degrees_section(bundle, &mut page);
    survival_section(bundle, &mut page);
    top_smells_section(bundle, &mut page);
    trends_section(bundle, &mut page);
    cooc_section("Component-level co-occurrence", &bundle.cooc_component, &mut page);
    cooc_section("File-level co-occurrence", &bundle.cooc_file, &mut page);
    precedence_section(bundle, &mut page);
    transitions_section(bundle, &mut page);
    page.push_str("</body>\n</html>\n");
    page
}

const STYLE: &str = "\
body { font-family: system-ui, sans-serif; margin: 2rem auto; max-width: 72rem; \
padding: 0 1rem; color: #1a1a2e; }
h1 { font-size: 1.6rem; } h2 { font-size: 1.2rem; margin-top: 2rem; }
table { border-collapse: collapse; margin: 0.75rem 0; }
th, td { border: 1px solid #d0d4dc; padding: 0.3rem 0.6rem; font-size: 0.9rem; text-align: left; }
th { background: #f0f2f7; }
td.num { text-align: right; font-variant-numeric: tabular-nums; }
td.heat { text-align: center; min-width: 2.5rem; }
svg { background: #fbfbfd; border: 1px solid #e3e6ec; max-width: 100%; height: auto; }
svg text { font-size: 11px; fill: #333; font-family: system-ui, sans-serif; }
.axis { stroke: #888; }
.grid { stroke: #e3e6ec; }
.guide { stroke: #c0392b; stroke-dasharray: 5 4; }
.median-label { fill: #c0392b; font-weight: 600; }
polyline { fill: none; stroke-width: 2; }
path.curve { stroke-width: 2; }
.node rect { fill: #eef2f9; stroke: #7b91b8; }
.node.cycle rect { fill: #fbe3e0; stroke: #c0392b; }
.edge { stroke: #aab4c4; }
.legend { font-size: 0.85rem; margin: 0.25rem 0 1rem; }
.legend .swatch { display: inline-block; width: 0.8em; height: 0.8em; margin: 0 0.3em 0 1em; }
.empty { color: #777; font-style: italic; }
";

fn style_palette(page: &mut String) {
    for (i, color) in PALETTE.iter().enumerate() {
        let _ = writeln!(page, ".c{i} {{ stroke: {color}; fill: {color}; }}");
        let _ = writeln!(page, ".sw{i} {{ background: {color}; }}");
    }
}

fn header_section(bundle: &AnalysisBundle, page: &mut String) {
    let _ = writeln!(page, "<h1>{}</h1>", escape(&bundle.project));
    if bundle.version_labels.is_empty() {
        page.push_str("<p class=\"empty\">No versions analyzed.</p>\n");
    } else {
        let labels: Vec<String> =
            bundle.version_labels.iter().map(|l| escape(l)).collect();
        let _ = writeln!(page, "<p>Versions analyzed: {}</p>", labels.join(", "));
    }
    let rows = totals(bundle);
    if rows.iter().all(|(_, _, instances, _)| *instances == 0) {
        page.push_str("<p class=\"empty\">No smells detected.</p>\n");
        return;
    }
    page.push_str(
        "<table><tr><th>Type</th><th>Level</th><th>Instances</th>\
         <th>Temporal instances</th></tr>\n",
    );
    for (smell_type, level, instances, chains) in rows {
        let _ = writeln!(
            page,
            "<tr><td>{}</td><td>{level}</td><td class=\"num\">{instances}</td>\
             <td class=\"num\">{chains}</td></tr>",
            smell_type.code()
        );
    }
    page.push_str("</table>\n");
}

/// The latest component graph condensed to strongly connected
/// components and layered by longest path: a box's dependencies always
/// sit on a lower row, and cyclic groups are accented.
fn overview_section(bundle: &AnalysisBundle, page: &mut String) {
    page.push_str("<h2>Component overview</h2>\n");
    if bundle.components.is_empty() {
        page.push_str("<p class=\"empty\">No component graph available.</p>\n");
        return;
    }
    let index: BTreeMap<&str, usize> =
        bundle.components.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let mut adj = vec![Vec::new(); bundle.components.len()];
    for (from, to) in &bundle.component_edges {
        if let (Some(&f), Some(&t)) = (index.get(from.as_str()), index.get(to.as_str())) {
            adj[f].push(t);
        }
    }
    let sccs = strongly_connected_components(&adj);
    let mut scc_of = vec![0usize; bundle.components.len()];
    for (s, members) in sccs.iter().enumerate() {
        for &m in members {
            scc_of[m] = s;
        }
    }
    // Components come out dependencies-first, so a pass in emission
    // order sees every successor's layer before it is needed.
    let mut layer = vec![0usize; sccs.len()];
    for (s, members) in sccs.iter().enumerate() {
        for &m in members {
            for &to in &adj[m] {
                if scc_of[to] != s {
                    layer[s] = layer[s].max(layer[scc_of[to]] + 1);
                }
            }
        }
    }
    let max_layer = layer.iter().copied().max().unwrap_or(0);
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); max_layer + 1];
    for (s, &l) in layer.iter().enumerate() {
        rows[max_layer - l].push(s);
    }
    let (box_w, box_h, gap_x, gap_y) = (150.0, 30.0, 16.0, 26.0);
    let widest = rows.iter().map(Vec::len).max().unwrap_or(1) as f64;
    let width = (widest * (box_w + gap_x) + gap_x).max(320.0);
    let height = rows.len() as f64 * (box_h + gap_y) + gap_y;
    let _ = writeln!(
        page,
        "<svg viewBox=\"0 0 {} {}\" width=\"{}\" height=\"{}\" role=\"img\">",
        fmt(width),
        fmt(height),
        fmt(width),
        fmt(height)
    );
    for (r, row) in rows.iter().enumerate() {
        let row_w = row.len() as f64 * (box_w + gap_x) - gap_x;
        let x0 = (width - row_w) / 2.0;
        let y = gap_y + r as f64 * (box_h + gap_y);
        for (i, &s) in row.iter().enumerate() {
            let x = x0 + i as f64 * (box_w + gap_x);
            let members: Vec<&str> =
                sccs[s].iter().map(|&m| bundle.components[m].as_str()).collect();
            let cyclic = members.len() > 1;
            let label = truncate(&members.join(", "), 20);
            let class = if cyclic { "node cycle" } else { "node" };
            let _ = writeln!(page, "<g class=\"{class}\"><title>{}</title>", escape(&members.join(", ")));
            page.push_str(&svg::rect(x, y, box_w, box_h, "box"));
            page.push_str(&svg::text(x + box_w / 2.0, y + box_h / 2.0 + 4.0, "label", "middle", &label));
            page.push_str("</g>\n");
        }
    }
    page.push_str("</svg>\n");
    page.push_str(
        "<p class=\"legend\">Boxes on a row depend only on rows below; \
         red boxes are strongly connected groups.</p>\n",
    );
}

fn truncate(label: &str, max: usize) -> String {
    if label.chars().count() <= max {
        label.to_string()
    } else {
        let prefix: String = label.chars().take(max - 1).collect();
        format!("{prefix}…")
    }
}

fn heat_color(smell_type: SmellType) -> (u8, u8, u8) {
    match smell_type {
        SmellType::CyclicDependency => (228, 87, 86),
        SmellType::HubLikeDependency => (245, 133, 24),
        SmellType::UnstableDependency => (76, 120, 168),
        SmellType::GodComponent => (178, 121, 162),
    }
}

/// Component × type heatmap over the latest version's instances.
fn heatmap_section(bundle: &AnalysisBundle, page: &mut String) {
    page.push_str("<h2>Smell heatmap (latest version)</h2>\n");
    let cells = heatmap(bundle);
    if cells.is_empty() || cells.iter().all(|(_, _, n)| *n == 0) {
        page.push_str("<p class=\"empty\">No smells detected.</p>\n");
        return;
    }
    let max = cells.iter().map(|(_, _, n)| *n).max().unwrap_or(1).max(1) as f64;
    page.push_str("<table><tr><th>Component</th>");
    for smell_type in SmellType::ALL {
        let _ = write!(page, "<th>{}</th>", smell_type.code());
    }
    page.push_str("</tr>\n");
    // Cells arrive grouped per component, one entry per type in order.
    for group in cells.chunks(SmellType::ALL.len()) {
        let _ = write!(page, "<tr><td>{}</td>", escape(&group[0].0));
        for (_, smell_type, count) in group {
            if *count == 0 {
                let _ = write!(page, "<td class=\"heat\" data-type=\"{}\"></td>", smell_type.code());
            } else {
                let (r, g, b) = heat_color(*smell_type);
                let alpha = 0.2 + 0.8 * *count as f64 / max;
                let _ = write!(
                    page,
                    "<td class=\"heat\" data-type=\"{}\" \
                     style=\"background: rgba({r},{g},{b},{})\">{count}</td>",
                    smell_type.code(),
                    fmt(alpha)
                );
            }
        }
        page.push_str("</tr>\n");
    }
    page.push_str("</table>\n");
}

/// Axis lines along the left and bottom plot edges.
fn axes(page: &mut String) {
    let bottom = CHART_H - MARGIN_B;
    page.push_str(&svg::line(MARGIN_L, MARGIN_T, MARGIN_L, bottom, "axis"));
    page.push_str(&svg::line(MARGIN_L, bottom, CHART_W - MARGIN_R, bottom, "axis"));
}

fn open_chart(page: &mut String) {
    let _ = writeln!(
        page,
        "<svg viewBox=\"0 0 {} {}\" width=\"{}\" height=\"{}\" role=\"img\">",
        fmt(CHART_W),
        fmt(CHART_H),
        fmt(CHART_W),
        fmt(CHART_H)
    );
}

/// Integer ticks for a count axis: at most six, always including 0.
fn count_ticks(max: usize) -> Vec<usize> {
    let step = (max / 5).max(1);
    (0..=max).step_by(step).collect()
}

fn counts_section(bundle: &AnalysisBundle, page: &mut String) {
    page.push_str("<h2>Counts over time</h2>\n");
    let rows = counts_over_time(bundle);
    if rows.is_empty() || rows.iter().all(|(_, _, _, n)| *n == 0) {
        page.push_str("<p class=\"empty\">No smells detected.</p>\n");
        return;
    }
    let kinds = kind_order();
    let versions = bundle.version_labels.len();
    let mut series = vec![vec![0usize; versions]; kinds.len()];
    for (v, smell_type, level, count) in rows {
        let k = kinds
            .iter()
            .position(|&(t, l)| t == smell_type && l == level)
            .expect("counts cover exactly the known kinds");
        series[k][v] = count;
    }
    let max = series.iter().flatten().copied().max().unwrap_or(1).max(1);
    let x = Scale::new((0.0, (versions - 1) as f64), (MARGIN_L, CHART_W - MARGIN_R));
    let y = Scale::new((0.0, max as f64), (CHART_H - MARGIN_B, MARGIN_T));
    open_chart(page);
    axes(page);
    for tick in count_ticks(max) {
        let ty = y.apply(tick as f64);
        page.push_str(&svg::line(MARGIN_L, ty, CHART_W - MARGIN_R, ty, "grid"));
        page.push_str(&svg::text(MARGIN_L - 6.0, ty + 4.0, "tick", "end", &tick.to_string()));
    }
    let label_step = (versions / 8).max(1);
    for (v, label) in bundle.version_labels.iter().enumerate() {
        if v % label_step != 0 && v != versions - 1 {
            continue;
        }
        let tx = x.apply(v as f64);
        page.push_str(&svg::text(
            tx,
            CHART_H - MARGIN_B + 16.0,
            "tick",
            "middle",
            &truncate(label, 10),
        ));
    }
    for (k, counts) in series.iter().enumerate() {
        if counts.iter().all(|&n| n == 0) {
            continue;
        }
        let points: Vec<(f64, f64)> = counts
            .iter()
            .enumerate()
            .map(|(v, &n)| (x.apply(v as f64), y.apply(n as f64)))
            .collect();
        page.push_str(&svg::polyline(&points, &format!("c{}", k % PALETTE.len())));
        for &(px, py) in &points {
            page.push_str(&svg::circle(px, py, 2.5, &format!("c{}", k % PALETTE.len())));
        }
    }
    page.push_str("</svg>\n<p class=\"legend\">");
    for (k, (smell_type, level)) in kinds.iter().enumerate() {
        let _ = write!(
            page,
            "<span class=\"swatch sw{}\"></span>{}.{level}",
            k % PALETTE.len(),
            smell_type.code()
        );
    }
    page.push_str("</p>\n");
}

fn degrees_section(bundle: &AnalysisBundle, page: &mut String) {
    page.push_str("<h2>Component degree distribution</h2>\n");
    let (fan_in, fan_out) = degree_histogram(bundle);
    if fan_in.is_empty() && fan_out.is_empty() {
        page.push_str("<p class=\"empty\">No component graph available.</p>\n");
        return;
    }
    let degrees: Vec<usize> = fan_in.keys().chain(fan_out.keys()).copied().collect();
    let mut degrees: Vec<usize> = degrees;
    degrees.sort_unstable();
    degrees.dedup();
    let max = fan_in
        .values()
        .chain(fan_out.values())
        .copied()
        .max()
        .unwrap_or(1)
        .max(1);
    let y = Scale::new((0.0, max as f64), (CHART_H - MARGIN_B, MARGIN_T));
    let plot_w = CHART_W - MARGIN_L - MARGIN_R;
    let group_w = plot_w / degrees.len() as f64;
    let bar_w = (group_w * 0.35).min(40.0);
    open_chart(page);
    axes(page);
    for tick in count_ticks(max) {
        let ty = y.apply(tick as f64);
        page.push_str(&svg::line(MARGIN_L, ty, CHART_W - MARGIN_R, ty, "grid"));
        page.push_str(&svg::text(MARGIN_L - 6.0, ty + 4.0, "tick", "end", &tick.to_string()));
    }
    let bottom = CHART_H - MARGIN_B;
    for (i, &degree) in degrees.iter().enumerate() {
        let centre = MARGIN_L + (i as f64 + 0.5) * group_w;
        for (offset, histogram, class) in
            [(-bar_w, &fan_in, "c0"), (0.0, &fan_out, "c1")]
        {
            let count = histogram.get(&degree).copied().unwrap_or(0);
            if count > 0 {
                let top = y.apply(count as f64);
                page.push_str(&svg::rect(centre + offset, top, bar_w, bottom - top, class));
            }
        }
        page.push_str(&svg::text(centre, bottom + 16.0, "tick", "middle", &degree.to_string()));
    }
    page.push_str("</svg>\n");
    page.push_str(
        "<p class=\"legend\"><span class=\"swatch sw0\"></span>fan-in\
         <span class=\"swatch sw1\"></span>fan-out</p>\n",
    );
}

/// One chart per curve family, with the 0.5 guide line and a median
/// annotation per stratum that reaches it.
fn survival_section(bundle: &AnalysisBundle, page: &mut String) {
    page.push_str("<h2>Survival</h2>\n");
    if bundle.survival_kinds.is_empty() {
        page.push_str("<p class=\"empty\">No temporal instances.</p>\n");
        return;
    }
    survival_chart(&bundle.survival_kinds, page);
    if !bundle.survival_shapes.is_empty() {
        page.push_str("<h2>Cycle survival by birth shape</h2>\n");
        survival_chart(&bundle.survival_shapes, page);
    }
}

fn survival_chart(curves: &[SurvivalCurve], page: &mut String) {
    let max_t = curves
        .iter()
        .flat_map(|c| c.points.last())
        .map(|p| p.t)
        .max()
        .unwrap_or(0);
    let x = Scale::new((0.0, max_t as f64), (MARGIN_L, CHART_W - MARGIN_R));
    let y = Scale::new((0.0, 1.0), (CHART_H - MARGIN_B, MARGIN_T));
    open_chart(page);
    axes(page);
    for tick in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let ty = y.apply(tick);
        page.push_str(&svg::line(MARGIN_L, ty, CHART_W - MARGIN_R, ty, "grid"));
        page.push_str(&svg::text(MARGIN_L - 6.0, ty + 4.0, "tick", "end", &fmt(tick)));
    }
    let step = (max_t / 8).max(1);
    for t in (0..=max_t).step_by(step) {
        let tx = x.apply(t as f64);
        page.push_str(&svg::text(tx, CHART_H - MARGIN_B + 16.0, "tick", "middle", &t.to_string()));
    }
    page.push_str(&svg::line(
        MARGIN_L,
        y.apply(0.5),
        CHART_W - MARGIN_R,
        y.apply(0.5),
        "guide",
    ));
    for (i, curve) in curves.iter().enumerate() {
        let mut points: Vec<(f64, f64)> = curve
            .points
            .iter()
            .map(|p| (x.apply(p.t as f64), y.apply(p.survival)))
            .collect();
        // Extend the last level to the right edge so censored tails show.
        if let Some(&(_, last_y)) = points.last() {
            points.push((x.apply(max_t as f64), last_y));
        }
        let class = format!("curve c{}", i % PALETTE.len());
        page.push_str(&svg::step_path(&points, &class));
        if let Some(median) = curve.median {
            page.push_str(&svg::text(
                x.apply(median as f64),
                y.apply(0.5) - 8.0 - 14.0 * (i % 4) as f64,
                "median-label",
                "middle",
                &format!("{} t = {median}", curve.stratum),
            ));
        }
    }
    page.push_str("</svg>\n<p class=\"legend\">");
    for (i, curve) in curves.iter().enumerate() {
        let _ = write!(
            page,
            "<span class=\"swatch sw{}\"></span>{}",
            i % PALETTE.len(),
            escape(&curve.stratum)
        );
    }
    page.push_str("</p>\n");
}

fn top_smells_section(bundle: &AnalysisBundle, page: &mut String) {
    page.push_str("<h2>Top smells (latest version)</h2>\n");
    let top = top_smells(bundle, 10);
    if top.is_empty() {
        page.push_str("<p class=\"empty\">No smells detected.</p>\n");
        return;
    }
    page.push_str(
        "<table><tr><th>Id</th><th>Type</th><th>Level</th><th>Affected artefacts</th></tr>\n",
    );
    for instance in top {
        let affected: Vec<&str> = instance.affected().into_iter().collect();
        let mut shown: Vec<String> =
            affected.iter().take(12).map(|a| escape(a)).collect();
        if affected.len() > shown.len() {
            shown.push("…".to_string());
        }
        let _ = writeln!(
            page,
            "<tr><td>{}</td><td>{}</td><td>{}</td><td>{}</td></tr>",
            escape(&instance.id),
            instance.smell_type.code(),
            instance.level,
            shown.join(", ")
        );
    }
    page.push_str("</table>\n");
}

fn trends_section(bundle: &AnalysisBundle, page: &mut String) {
    page.push_str("<h2>Characteristic trends</h2>\n");
    let rows = trend_tallies(bundle);
    if rows.is_empty() {
        page.push_str("<p class=\"empty\">No chains lived long enough to classify.</p>\n");
        return;
    }
    page.push_str(
        "<table><tr><th>Characteristic</th><th>Group</th><th>Chains</th><th>Share</th></tr>\n",
    );
    for (characteristic, group, count, share) in rows {
        let _ = writeln!(
            page,
            "<tr><td>{}</td><td>{}</td><td class=\"num\">{count}</td>\
             <td class=\"num\">{}%</td></tr>",
            escape(&characteristic),
            group.name(),
            fmt(share)
        );
    }
    page.push_str("</table>\n");
}

/// A kind × kind matrix table; cells show the percentage with the
/// underlying counts, or a dash when the row kind never occurred.
fn matrix_table(matrix: &CoocMatrix, with_counts: bool, page: &mut String) {
    page.push_str("<table><tr><th></th>");
    for kind in &matrix.kinds {
        let _ = write!(page, "<th>{}</th>", escape(kind));
    }
    page.push_str("</tr>\n");
    for row in &matrix.kinds {
        let _ = write!(page, "<tr><th>{}</th>", escape(row));
        for col in &matrix.kinds {
            if row == col {
                page.push_str("<td class=\"num\">—</td>");
                continue;
            }
            let entry = matrix.entries[&(row.clone(), col.clone())];
            match entry.percentage() {
                None => page.push_str("<td class=\"num\">–</td>"),
                Some(pct) if with_counts => {
                    let _ = write!(
                        page,
                        "<td class=\"num\">{}% ({}/{})</td>",
                        fmt(pct),
                        entry.numerator,
                        entry.denominator
                    );
                }
                Some(pct) => {
                    let _ = write!(page, "<td class=\"num\">{}%</td>", fmt(pct));
                }
            }
        }
        page.push_str("</tr>\n");
    }
    page.push_str("</table>\n");
}

fn cooc_section(title: &str, matrix: &CoocMatrix, page: &mut String) {
    let _ = writeln!(page, "<h2>{title}</h2>");
    if matrix.totals.values().all(|&n| n == 0) {
        page.push_str("<p class=\"empty\">No smells detected.</p>\n");
        return;
    }
    matrix_table(matrix, true, page);
}

fn precedence_section(bundle: &AnalysisBundle, page: &mut String) {
    page.push_str("<h2>Precedence</h2>\n");
    let Some(matrix) = bundle.precedence.last() else {
        page.push_str("<p class=\"empty\">No temporal instances.</p>\n");
        return;
    };
    let k = matrix.k.expect("precedence matrices always carry k");
    let _ = writeln!(
        page,
        "<p>Share of row-kind instances with a within-{k}-version neighbour \
         that the row kind preceded (window k = {k}).</p>"
    );
    matrix_table(matrix, false, page);
}

fn transitions_section(bundle: &AnalysisBundle, page: &mut String) {
    page.push_str("<h2>Shape transitions</h2>\n");
    if bundle.transitions.transition_counts.is_empty() {
        page.push_str("<p class=\"empty\">No shape changes observed.</p>\n");
        return;
    }
    page.push_str(
        "<table><tr><th>From</th><th>To</th><th>Transitions</th><th>Instances</th></tr>\n",
    );
    for ((from, to), count) in &bundle.transitions.transition_counts {
        let instances =
            bundle.transitions.transition_instances[&(from.clone(), to.clone())];
        let _ = writeln!(
            page,
            "<tr><td>{}</td><td>{}</td><td class=\"num\">{count}</td>\
             <td class=\"num\">{instances}</td></tr>",
            escape(from),
            escape(to)
        );
    }
    page.push_str("</table>\n");
}
