//! Minimal standalone SVG plots: markers, polylines and bars on linear axes.

use std::fmt::Write;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Points(Vec<(f64, f64)>),
    Line(Vec<(f64, f64)>),
    /// `(lo, hi, height)`
    Bars(Vec<(f64, f64, f64)>),
}

impl Shape {
    fn is_empty(&self) -> bool {
        match self {
            Shape::Points(p) | Shape::Line(p) => p.is_empty(),
            Shape::Bars(b) => b.is_empty(),
        }
    }

    fn extent(&self) -> Vec<(f64, f64)> {
        match self {
            Shape::Points(p) | Shape::Line(p) => p.clone(),
            Shape::Bars(b) => b
                .iter()
                .flat_map(|&(lo, hi, h)| [(lo, 0.0), (hi, h)])
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: Option<String>,
    pub color: &'static str,
    pub shape: Shape,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Same scale on both axes.
    pub equal_aspect: bool,
    /// Legend in a margin right of the plot instead of inside it.
    pub legend_outside: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Style {
    pub width: f64,
    pub height: f64,
    pub columns: usize,
    pub marker_radius: f64,
    pub font_size: f64,
}

impl Default for Style {
    fn default() -> Self {
        Style {
            width: 800.0,
            height: 800.0,
            columns: 1,
            marker_radius: 2.5,
            font_size: 12.0,
        }
    }
}

pub const PALETTE: [&str; 8] = [
    "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    xr: (f64, f64),
    yr: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        self.x0 + (x - self.xr.0) / (self.xr.1 - self.xr.0) * self.w
    }

    fn py(&self, y: f64) -> f64 {
        self.y0 + self.h - (y - self.yr.0) / (self.yr.1 - self.yr.0) * self.h
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi - lo <= 0.0 {
        let d = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        return (lo - d, hi + d);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn tick_step(lo: f64, hi: f64) -> f64 {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let frac = raw / mag;
    mag * if frac < 1.5 {
        1.0
    } else if frac < 3.5 {
        2.0
    } else if frac < 7.5 {
        5.0
    } else {
        10.0
    }
}

fn ticks(lo: f64, hi: f64) -> (Vec<f64>, usize) {
    let step = tick_step(lo, hi);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    ((first..=last).map(|k| k as f64 * step).collect(), decimals)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn ranges(panel: &Panel, w: f64, h: f64) -> ((f64, f64), (f64, f64)) {
    let pts: Vec<(f64, f64)> = panel.series.iter().flat_map(|s| s.shape.extent()).collect();
    let fold = |f: fn(&(f64, f64)) -> f64| {
        pts.iter()
            .map(f)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                (a.min(v), b.max(v))
            })
    };
    let (xl, xh) = fold(|p| p.0);
    let (yl, yh) = fold(|p| p.1);
    let (mut xr, mut yr) = (padded(xl, xh), padded(yl, yh));
    if panel.equal_aspect {
        // widen the tighter axis so one unit has the same length on both
        let sx = (xr.1 - xr.0) / w;
        let sy = (yr.1 - yr.0) / h;
        if sx > sy {
            let c = 0.5 * (yr.0 + yr.1);
            let half = 0.5 * sx * h;
            yr = (c - half, c + half);
        } else {
            let c = 0.5 * (xr.0 + xr.1);
            let half = 0.5 * sy * w;
            xr = (c - half, c + half);
        }
    }
    (xr, yr)
}

fn draw_panel(out: &mut String, panel: &Panel, style: &Style, cell: (f64, f64, f64, f64)) {
    let fs = style.font_size;
    let (cx, cy, cw, ch) = cell;
    let right = if panel.legend_outside {
        12.0 * fs
    } else {
        1.5 * fs
    };
    let (left, top, bottom) = (5.0 * fs, 2.5 * fs, 3.5 * fs);
    let (w, h) = (cw - left - right, ch - top - bottom);
    let (xr, yr) = ranges(panel, w, h);
    let f = Frame {
        x0: cx + left,
        y0: cy + top,
        w,
        h,
        xr,
        yr,
    };
    let _ = writeln!(
        out,
        r##"<g><rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#000"/>"##,
        f.x0, f.y0, f.w, f.h
    );
    let _ = writeln!(
        out,
        r##"<text x="{:.2}" y="{:.2}" font-size="{:.1}" text-anchor="middle">{}</text>"##,
        f.x0 + 0.5 * f.w,
        cy + 1.6 * fs,
        fs * 1.2,
        escape(&panel.title)
    );
    let (xt, xd) = ticks(xr.0, xr.1);
    for t in xt {
        let x = f.px(t);
        let yb = f.y0 + f.h;
        let _ = writeln!(
            out,
            r##"<line x1="{x:.2}" y1="{yb:.2}" x2="{x:.2}" y2="{:.2}" stroke="#000"/><text x="{x:.2}" y="{:.2}" font-size="{fs:.1}" text-anchor="middle">{t:.xd$}</text>"##,
            yb + 0.4 * fs,
            yb + 1.5 * fs,
        );
    }
    let (yt, yd) = ticks(yr.0, yr.1);
    for t in yt {
        let y = f.py(t);
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#000"/><text x="{:.2}" y="{:.2}" font-size="{fs:.1}" text-anchor="end">{t:.yd$}</text>"##,
            f.x0 - 0.4 * fs,
            f.x0,
            f.x0 - 0.6 * fs,
            y + 0.35 * fs,
        );
    }
    let _ = writeln!(
        out,
        r##"<text x="{:.2}" y="{:.2}" font-size="{fs:.1}" text-anchor="middle">{}</text>"##,
        f.x0 + 0.5 * f.w,
        f.y0 + f.h + 2.8 * fs,
        escape(&panel.x_label)
    );
    let (lx, ly) = (cx + 1.2 * fs, f.y0 + 0.5 * f.h);
    let _ = writeln!(
        out,
        r##"<text x="{lx:.2}" y="{ly:.2}" font-size="{fs:.1}" text-anchor="middle" transform="rotate(-90 {lx:.2} {ly:.2})">{}</text>"##,
        escape(&panel.y_label)
    );
    for s in &panel.series {
        match &s.shape {
            Shape::Points(p) => {
                for &(x, y) in p {
                    let _ = writeln!(
                        out,
                        r##"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="{}"/>"##,
                        f.px(x),
                        f.py(y),
                        style.marker_radius,
                        s.color
                    );
                }
            }
            Shape::Line(p) => {
                let coords: Vec<String> = p
                    .iter()
                    .map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y)))
                    .collect();
                let _ = writeln!(
                    out,
                    r##"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"##,
                    coords.join(" "),
                    s.color
                );
            }
            Shape::Bars(b) => {
                for &(lo, hi, v) in b {
                    let (top, base) = (f.py(v.max(0.0)), f.py(v.min(0.0)));
                    let _ = writeln!(
                        out,
                        r##"<rect x="{:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="{}" fill-opacity="0.5" stroke="{}"/>"##,
                        f.px(lo),
                        f.px(hi) - f.px(lo),
                        base - top,
                        s.color,
                        s.color
                    );
                }
            }
        }
    }
    let labelled: Vec<&Series> = panel.series.iter().filter(|s| s.label.is_some()).collect();
    for (k, s) in labelled.iter().enumerate() {
        let y = f.y0 + (k as f64 + 1.0) * 1.4 * fs;
        let x = if panel.legend_outside {
            f.x0 + f.w + 1.0 * fs
        } else {
            f.x0 + f.w - 10.0 * fs
        };
        let _ = writeln!(
            out,
            r##"<rect x="{x:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/><text x="{:.2}" y="{y:.2}" font-size="{fs:.1}">{}</text>"##,
            y - 0.8 * fs,
            0.8 * fs,
            0.8 * fs,
            s.color,
            x + 1.2 * fs,
            escape(s.label.as_deref().unwrap_or_default())
        );
    }
    out.push_str("</g>\n");
}

/// Renders the panels on a grid of `style.columns` columns. Fails if there
/// is nothing to draw.
pub fn emit_svg(panels: &[Panel], style: &Style) -> Result<String> {
    let drawable = panels
        .iter()
        .any(|p| p.series.iter().any(|s| !s.shape.is_empty()));
    if !drawable {
        return Err(CliError::Usage(
            "nothing to plot: the dataset is empty".into(),
        ));
    }
    let cols = style.columns.max(1).min(panels.len());
    let rows = panels.len().div_ceil(cols);
    let (cw, ch) = (style.width / cols as f64, style.height / rows as f64);
    let mut out = String::new();
    let _ = writeln!(out, r##"<?xml version="1.0" encoding="UTF-8"?>"##);
    let _ = writeln!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif">"##,
        w = style.width,
        h = style.height
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#fff"/>"##);
    for (k, panel) in panels.iter().enumerate() {
        let cell = ((k % cols) as f64 * cw, (k / cols) as f64 * ch, cw, ch);
        draw_panel(&mut out, panel, style, cell);
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(s: &str, tag: &str) -> usize {
        s.matches(&format!("<{tag} ")).count()
    }

    fn panel(series: Vec<Series>) -> Panel {
        Panel {
            title: "t".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series,
            equal_aspect: false,
            legend_outside: false,
        }
    }

    #[test]
    fn one_circle_per_root() {
        let pts: Vec<(f64, f64)> = (0..37).map(|k| (k as f64, (k * k) as f64)).collect();
        let s = emit_svg(
            &[panel(vec![Series {
                label: None,
                color: PALETTE[0],
                shape: Shape::Points(pts),
            }])],
            &Style::default(),
        )
        .unwrap();
        assert_eq!(count(&s, "circle"), 37);
        assert!(s.contains(r#"width="800" height="800""#));
    }

    #[test]
    fn one_polyline_with_all_points() {
        let pts: Vec<(f64, f64)> = (0..64)
            .map(|k| (k as f64 / 63.0, (k as f64).sin()))
            .collect();
        let s = emit_svg(
            &[panel(vec![Series {
                label: None,
                color: PALETTE[1],
                shape: Shape::Line(pts),
            }])],
            &Style::default(),
        )
        .unwrap();
        assert_eq!(count(&s, "polyline"), 1);
        let line = s.lines().find(|l| l.starts_with("<polyline")).unwrap();
        let inside = line.split('"').nth(1).unwrap();
        assert_eq!(inside.split(' ').count(), 64);
    }

    #[test]
    fn combined_plot_has_legend() {
        let s = emit_svg(
            &[panel(vec![
                Series {
                    label: Some("roots".into()),
                    color: PALETTE[0],
                    shape: Shape::Points(vec![(0.0, 0.0), (1.0, 1.0)]),
                },
                Series {
                    label: Some("support & arc".into()),
                    color: PALETTE[1],
                    shape: Shape::Line(vec![(0.0, 1.0), (1.0, 0.0)]),
                },
            ])],
            &Style::default(),
        )
        .unwrap();
        assert_eq!(count(&s, "circle"), 2);
        assert_eq!(count(&s, "polyline"), 1);
        assert!(s.contains(">roots</text>"));
        assert!(s.contains(">support &amp; arc</text>"));
    }

    #[test]
    fn empty_dataset_is_an_error() {
        assert!(emit_svg(&[], &Style::default()).is_err());
        let empty = panel(vec![Series {
            label: None,
            color: PALETTE[0],
            shape: Shape::Points(vec![]),
        }]);
        assert!(matches!(
            emit_svg(&[empty], &Style::default()),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn output_is_deterministic() {
        let p = panel(vec![Series {
            label: None,
            color: PALETTE[2],
            shape: Shape::Bars(vec![(0.0, 0.5, 1.0), (0.5, 1.0, 0.3)]),
        }]);
        let a = emit_svg(
            &[p.clone(), p.clone()],
            &Style {
                columns: 2,
                ..Style::default()
            },
        )
        .unwrap();
        let b = emit_svg(
            &[p.clone(), p],
            &Style {
                columns: 2,
                ..Style::default()
            },
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ticks_are_round() {
        let (t, d) = ticks(-0.05, 1.05);
        assert_eq!(d, 1);
        assert_eq!(t.len(), 6);
        assert!((t[1] - 0.2).abs() < 1e-12);
    }
}
