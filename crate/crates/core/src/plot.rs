//! Standalone SVG charts: one median polyline per experiment series with a
//! shaded interquartile band.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

/// One generation's aggregated value for a series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotPoint {
    pub generation: u32,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

/// One experiment's curve.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub name: String,
    pub points: Vec<PlotPoint>,
}

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("no series to plot")]
    NoSeries,
    #[error("series `{0}` has no points")]
    EmptySeries(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 60.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, gen: f64) -> f64 {
        let w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        MARGIN_LEFT + (gen - self.x_min) / (self.x_max - self.x_min) * w
    }

    fn y(&self, v: f64) -> f64 {
        let h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        HEIGHT - MARGIN_BOTTOM - (v - self.y_min) / (self.y_max - self.y_min) * h
    }
}

fn frame_over(series: &[PlotSeries]) -> Frame {
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in series {
        for p in &s.points {
            x_min = x_min.min(p.generation as f64);
            x_max = x_max.max(p.generation as f64);
            y_min = y_min.min(p.q1.min(p.median));
            y_max = y_max.max(p.q3.max(p.median));
        }
    }
    if x_min == x_max {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if y_min == y_max {
        y_min -= 0.5;
        y_max += 0.5;
    }
    let pad = (y_max - y_min) * 0.05;
    Frame {
        x_min,
        x_max,
        y_min: y_min - pad,
        y_max: y_max + pad,
    }
}

/// Renders the chart for one metric as an SVG document.
pub fn render_svg(series: &[PlotSeries], metric_label: &str) -> Result<String, PlotError> {
    if series.is_empty() {
        return Err(PlotError::NoSeries);
    }
    for s in series {
        if s.points.is_empty() {
            return Err(PlotError::EmptySeries(s.name.clone()));
        }
    }
    let frame = frame_over(series);
    let mut svg = String::new();

    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );

    // axes
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    let _ = writeln!(
        svg,
        r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#
    );

    // ticks and grid labels
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let gx = frame.x_min + f * (frame.x_max - frame.x_min);
        let px = frame.x(gx);
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{}" stroke="black"/>"#,
            y0 + 6.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{px:.2}" y="{}" text-anchor="middle" font-size="12">{}</text>"#,
            y0 + 20.0,
            tick_label(gx)
        );
        let gy = frame.y_min + f * (frame.y_max - frame.y_min);
        let py = frame.y(gy);
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/>"#,
            x0 - 6.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end" font-size="12">{}</text>"#,
            x0 - 10.0,
            py + 4.0,
            tick_label(gy)
        );
    }

    // axis labels
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">generation</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" text-anchor="middle" font-size="14" transform="rotate(-90 18 {:.2})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(metric_label)
    );

    for (si, s) in series.iter().enumerate() {
        let color = COLORS[si % COLORS.len()];
        let mut pts = s.points.clone();
        pts.sort_by_key(|p| p.generation);
        if pts.len() == 1 {
            let p = pts[0];
            let px = frame.x(p.generation as f64);
            let _ = writeln!(
                svg,
                r#"<line class="band" x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="{color}" stroke-opacity="0.3" stroke-width="6"/>"#,
                frame.y(p.q1),
                frame.y(p.q3)
            );
            let _ = writeln!(
                svg,
                r#"<circle class="median" cx="{px:.2}" cy="{:.2}" r="4" fill="{color}"/>"#,
                frame.y(p.median)
            );
        } else {
            let mut band = String::new();
            for p in &pts {
                let _ = write!(
                    band,
                    "{:.2},{:.2} ",
                    frame.x(p.generation as f64),
                    frame.y(p.q1)
                );
            }
            for p in pts.iter().rev() {
                let _ = write!(
                    band,
                    "{:.2},{:.2} ",
                    frame.x(p.generation as f64),
                    frame.y(p.q3)
                );
            }
            let _ = writeln!(
                svg,
                r#"<polygon class="band" points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
                band.trim_end()
            );
            let median: Vec<String> = pts
                .iter()
                .map(|p| {
                    format!(
                        "{:.2},{:.2}",
                        frame.x(p.generation as f64),
                        frame.y(p.median)
                    )
                })
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline class="median" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                median.join(" ")
            );
        }

        // legend entry
        let lx = WIDTH - MARGIN_RIGHT + 20.0;
        let ly = MARGIN_TOP + 20.0 + si as f64 * 22.0;
        let _ = writeln!(
            svg,
            r#"<rect x="{lx}" y="{:.2}" width="14" height="14" fill="{color}"/>"#,
            ly - 11.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{ly}" font-size="13">{}</text>"#,
            lx + 20.0,
            escape(&s.name)
        );
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Renders and writes the chart to `path`.
pub fn emit_svg_plot(
    series: &[PlotSeries],
    metric_label: &str,
    path: &Path,
) -> Result<(), PlotError> {
    let svg = render_svg(series, metric_label)?;
    std::fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(name: &str, n: usize) -> PlotSeries {
        PlotSeries {
            name: name.to_string(),
            points: (1..=n as u32)
                .map(|g| PlotPoint {
                    generation: g,
                    median: g as f64,
                    q1: g as f64 - 0.5,
                    q3: g as f64 + 0.5,
                })
                .collect(),
        }
    }

    /// Minimal well-formedness check: every opened tag is closed or
    /// self-closing, and the nesting matches.
    fn assert_well_formed(svg: &str) {
        let mut stack: Vec<String> = Vec::new();
        let bytes = svg.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            if bytes[i] != b'<' {
                i += 1;
                continue;
            }
            let end = svg[i..].find('>').map(|e| i + e).expect("unterminated tag");
            let inner = &svg[i + 1..end];
            if let Some(name) = inner.strip_prefix('/') {
                assert_eq!(
                    stack.pop().as_deref(),
                    Some(name.trim()),
                    "mismatched close"
                );
            } else if !inner.ends_with('/') && !inner.starts_with('?') && !inner.starts_with('!') {
                let name = inner.split_whitespace().next().unwrap().to_string();
                stack.push(name);
            }
            i = end + 1;
        }
        assert!(stack.is_empty(), "unclosed tags: {stack:?}");
    }

    #[test]
    fn two_series_make_two_medians_and_two_bands() {
        let svg = render_svg(
            &[series("baseline", 50), series("battery", 50)],
            "speed (cm/s)",
        )
        .unwrap();
        assert_eq!(svg.matches(r#"<polyline class="median""#).count(), 2);
        assert_eq!(svg.matches(r#"<polygon class="band""#).count(), 2);
        assert_well_formed(&svg);
    }

    #[test]
    fn single_generation_degenerates_to_markers() {
        let svg = render_svg(&[series("battery", 1)], "balance").unwrap();
        assert_eq!(svg.matches(r#"<circle class="median""#).count(), 1);
        assert_eq!(svg.matches(r#"<line class="band""#).count(), 1);
        assert_well_formed(&svg);
    }

    #[test]
    fn empty_inputs_error() {
        assert!(matches!(render_svg(&[], "speed"), Err(PlotError::NoSeries)));
        let empty = PlotSeries {
            name: "x".into(),
            points: vec![],
        };
        assert!(matches!(
            render_svg(&[empty], "speed"),
            Err(PlotError::EmptySeries(_))
        ));
    }

    #[test]
    fn labels_are_escaped() {
        let svg = render_svg(&[series("a<b&c", 3)], "x<y").unwrap();
        assert!(svg.contains("a&lt;b&amp;c"));
        assert!(svg.contains("x&lt;y"));
        assert_well_formed(&svg);
    }

    #[test]
    fn flat_series_still_renders() {
        let flat = PlotSeries {
            name: "flat".into(),
            points: (1..=5)
                .map(|g| PlotPoint {
                    generation: g,
                    median: 2.0,
                    q1: 2.0,
                    q3: 2.0,
                })
                .collect(),
        };
        let svg = render_svg(&[flat], "battery").unwrap();
        assert_well_formed(&svg);
    }
}
