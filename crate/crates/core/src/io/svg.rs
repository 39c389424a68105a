//! Minimal SVG line plots of trace columns.
//!
//! Canvas is fixed at 800×500 with linear axes. The plotted polyline carries
//! its exact data in `data-t` and `data-values` attributes (17 significant
//! digits) together with the axis ranges, so the figure can be checked
//! against the trace it was drawn from.

use std::fmt::Write as _;

use super::fmt_f64;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 500.0;
const LEFT: f64 = 100.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;
const TICKS: usize = 5;

pub const OBJECTIVE_TITLE: &str = "objective value by iteration";
pub const GRADIENT_TITLE: &str = "L2 norm of the smooth gradient by iteration";
pub const X_LABEL: &str = "iteration t";

/// Axis ranges and the data-to-pixel map of one plot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub t_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Frame {
    pub fn fit(ts: &[f64], ys: &[f64]) -> Self {
        let t_max = ts.iter().copied().fold(0.0, f64::max).max(1.0);
        let mut y_min = ys.iter().copied().fold(f64::INFINITY, f64::min);
        let mut y_max = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !y_min.is_finite() || !y_max.is_finite() {
            y_min = 0.0;
            y_max = 1.0;
        }
        if y_max - y_min <= f64::EPSILON * y_max.abs().max(1.0) {
            let pad = 0.5 * y_max.abs().max(1.0);
            y_min -= pad;
            y_max += pad;
        }
        Self {
            t_max,
            y_min,
            y_max,
        }
    }

    pub fn x(&self, t: f64) -> f64 {
        LEFT + (WIDTH - LEFT - RIGHT) * t / self.t_max
    }

    pub fn y(&self, v: f64) -> f64 {
        TOP + (HEIGHT - TOP - BOTTOM) * (self.y_max - v) / (self.y_max - self.y_min)
    }

    /// Inverse of [`Frame::y`].
    pub fn value_at(&self, py: f64) -> f64 {
        self.y_max - (py - TOP) / (HEIGHT - TOP - BOTTOM) * (self.y_max - self.y_min)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

pub fn line_plot(title: &str, y_label: &str, ts: &[f64], ys: &[f64]) -> String {
    let frame = Frame::fit(ts, ys);
    let (x0, x1) = (LEFT, WIDTH - RIGHT);
    let (y0, y1) = (TOP, HEIGHT - BOTTOM);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="28" text-anchor="middle" font-family="sans-serif" font-size="18">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<g stroke="black" stroke-width="1"><line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}"/><line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/></g>"#
    );

    let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="12">"#);
    for k in 0..=TICKS {
        let frac = k as f64 / TICKS as f64;
        let t = frac * frame.t_max;
        let px = frame.x(t);
        let _ = writeln!(
            s,
            r#"<line x1="{px:.3}" y1="{y1}" x2="{px:.3}" y2="{}" stroke="black"/><text x="{px:.3}" y="{}" text-anchor="middle">{}</text>"#,
            y1 + 5.0,
            y1 + 20.0,
            format_tick(t)
        );
        let v = frame.y_min + frac * (frame.y_max - frame.y_min);
        let py = frame.y(v);
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{py:.3}" x2="{x0}" y2="{py:.3}" stroke="black"/><text x="{}" y="{:.3}" text-anchor="end">{}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            py + 4.0,
            format_tick(v)
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="14">{X_LABEL}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 20.0
    );
    let _ = writeln!(
        s,
        r#"<text x="22" y="{}" text-anchor="middle" font-family="sans-serif" font-size="14" transform="rotate(-90 22 {})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );

    let points: Vec<String> = ts
        .iter()
        .zip(ys)
        .map(|(t, v)| format!("{:.3},{:.3}", frame.x(*t), frame.y(*v)))
        .collect();
    let t_data: Vec<String> = ts.iter().map(|t| format!("{t}")).collect();
    let y_data: Vec<String> = ys.iter().map(|v| fmt_f64(*v)).collect();
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="2" points="{}" data-t="{}" data-values="{}" data-t-max="{}" data-y-min="{}" data-y-max="{}"/>"#,
        points.join(" "),
        t_data.join(" "),
        y_data.join(" "),
        fmt_f64(frame.t_max),
        fmt_f64(frame.y_min),
        fmt_f64(frame.y_max)
    );
    s.push_str("</svg>\n");
    s
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

/// The data embedded in a plot's polyline.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    pub frame: Frame,
    pub ts: Vec<f64>,
    pub values: Vec<f64>,
    /// Pixel coordinates from the `points` attribute.
    pub points: Vec<(f64, f64)>,
}

fn attr<'a>(element: &'a str, name: &str) -> Option<&'a str> {
    let key = format!(" {name}=\"");
    let start = element.find(&key)? + key.len();
    let len = element[start..].find('"')?;
    Some(&element[start..start + len])
}

fn floats(s: &str) -> Option<Vec<f64>> {
    s.split_whitespace().map(|t| t.parse().ok()).collect()
}

/// Reads back the polyline written by [`line_plot`].
pub fn parse_plot(svg: &str) -> Option<PlotData> {
    let start = svg.find("<polyline")?;
    let end = start + svg[start..].find("/>")?;
    let el = &svg[start..end];
    let frame = Frame {
        t_max: attr(el, "data-t-max")?.parse().ok()?,
        y_min: attr(el, "data-y-min")?.parse().ok()?,
        y_max: attr(el, "data-y-max")?.parse().ok()?,
    };
    let points = attr(el, "points")?
        .split_whitespace()
        .map(|p| {
            let (x, y) = p.split_once(',')?;
            Some((x.parse().ok()?, y.parse().ok()?))
        })
        .collect::<Option<Vec<_>>>()?;
    Some(PlotData {
        frame,
        ts: floats(attr(el, "data-t")?)?,
        values: floats(attr(el, "data-values")?)?,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_data_and_pixels_agree() {
        let ts = [0.0, 1.0, 2.0, 3.0];
        let ys = [5.0, 2.0, 1.5, 1.25];
        let svg = line_plot("t", "y", &ts, &ys);
        assert!(svg.contains(r#"width="800""#) && svg.contains(r#"height="500""#));
        let data = parse_plot(&svg).unwrap();
        assert_eq!(data.values, ys);
        assert_eq!(data.ts, ts);
        for ((t, v), (px, py)) in ts.iter().zip(ys).zip(&data.points) {
            assert!((data.frame.x(*t) - px).abs() < 1e-3);
            assert!(
                (data.frame.value_at(*py) - v).abs() < 1e-3 * (data.frame.y_max - data.frame.y_min)
            );
        }
    }

    #[test]
    fn constant_series_gets_a_padded_axis() {
        let svg = line_plot("t", "y", &[0.0], &[3.0]);
        let data = parse_plot(&svg).unwrap();
        assert!(data.frame.y_min < 3.0 && data.frame.y_max > 3.0);
        assert!(data.points[0].1.is_finite());
    }
}
