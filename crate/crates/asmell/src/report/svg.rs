//! String-assembly primitives for the report's inline SVG charts.
//!
//! Every coordinate goes through [`fmt`], which rounds to two decimals
//! and trims trailing zeros, so renders are byte-identical across runs.

/// Formats a chart coordinate or label number: at most two decimals,
/// trailing zeros trimmed, `-0` normalized.
pub fn fmt(v: f64) -> String {
    let mut s = format!("{:.2}", (v * 100.0).round() / 100.0);
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.pop();
    }
    if s == "-0" {
        "0".to_string()
    } else {
        s
    }
}

/// Escapes text for use in markup content or attribute values.
pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

/// Linear map from a data domain onto a pixel range. A degenerate
/// domain (single value) maps everything to the middle of the range.
pub struct Scale {
    domain: (f64, f64),
    range: (f64, f64),
}

impl Scale {
    pub fn new(domain: (f64, f64), range: (f64, f64)) -> Scale {
        Scale { domain, range }
    }

    pub fn apply(&self, v: f64) -> f64 {
        let span = self.domain.1 - self.domain.0;
        if span == 0.0 {
            return (self.range.0 + self.range.1) / 2.0;
        }
        self.range.0 + (v - self.domain.0) / span * (self.range.1 - self.range.0)
    }
}

pub fn line(x1: f64, y1: f64, x2: f64, y2: f64, class: &str) -> String {
    format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" class=\"{class}\"/>",
        fmt(x1),
        fmt(y1),
        fmt(x2),
        fmt(y2)
    )
}

pub fn rect(x: f64, y: f64, width: f64, height: f64, class: &str) -> String {
    format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" class=\"{class}\"/>",
        fmt(x),
        fmt(y),
        fmt(width),
        fmt(height)
    )
}

/// A text element; `anchor` is the SVG `text-anchor` value.
pub fn text(x: f64, y: f64, class: &str, anchor: &str, content: &str) -> String {
    format!(
        "<text x=\"{}\" y=\"{}\" class=\"{class}\" text-anchor=\"{anchor}\">{}</text>",
        fmt(x),
        fmt(y),
        escape(content)
    )
}

pub fn polyline(points: &[(f64, f64)], class: &str) -> String {
    let coords: Vec<String> =
        points.iter().map(|(x, y)| format!("{},{}", fmt(*x), fmt(*y))).collect();
    format!("<polyline points=\"{}\" class=\"{class}\"/>", coords.join(" "))
}

pub fn circle(cx: f64, cy: f64, r: f64, class: &str) -> String {
    format!(
        "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" class=\"{class}\"/>",
        fmt(cx),
        fmt(cy),
        fmt(r)
    )
}

/// A step path through `points`: horizontal to each next x, then
/// vertical to its y — the survival-curve shape.
pub fn step_path(points: &[(f64, f64)], class: &str) -> String {
    let mut d = String::new();
    for (i, (x, y)) in points.iter().enumerate() {
        if i == 0 {
            d.push_str(&format!("M {} {}", fmt(*x), fmt(*y)));
        } else {
            d.push_str(&format!(" H {} V {}", fmt(*x), fmt(*y)));
        }
    }
    format!("<path d=\"{d}\" class=\"{class}\" fill=\"none\"/>")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_trims_trailing_zeros() {
        assert_eq!(fmt(4.0), "4");
        assert_eq!(fmt(4.5), "4.5");
        assert_eq!(fmt(4.567), "4.57");
        assert_eq!(fmt(-0.001), "0");
    }

    #[test]
    fn scale_maps_domain_onto_range() {
        let scale = Scale::new((0.0, 10.0), (100.0, 200.0));
        assert_eq!(scale.apply(0.0), 100.0);
        assert_eq!(scale.apply(10.0), 200.0);
        assert_eq!(scale.apply(5.0), 150.0);
        // Inverted pixel ranges (SVG y grows downward) work too.
        let y = Scale::new((0.0, 1.0), (200.0, 20.0));
        assert_eq!(y.apply(1.0), 20.0);
    }

    #[test]
    fn degenerate_domain_maps_to_the_middle() {
        let scale = Scale::new((3.0, 3.0), (0.0, 100.0));
        assert_eq!(scale.apply(3.0), 50.0);
    }

    #[test]
    fn step_path_alternates_horizontal_and_vertical() {
        let path = step_path(&[(0.0, 10.0), (5.0, 20.0), (8.0, 20.0)], "km");
        assert_eq!(
            path,
            "<path d=\"M 0 10 H 5 V 20 H 8 V 20\" class=\"km\" fill=\"none\"/>"
        );
    }

    #[test]
    fn markup_is_escaped() {
        assert_eq!(escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
        let label = text(1.0, 2.0, "t", "middle", "<x>");
        assert!(label.contains("&lt;x&gt;"));
    }
}
