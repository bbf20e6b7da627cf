//! Minimal line charts as standalone SVG documents.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{HarnessError, Result};

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;

const MARGIN_LEFT: f64 = 90.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn extent(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo > hi {
        None
    } else if lo == hi {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.05 };
        Some((lo - pad, hi + pad))
    } else {
        Some((lo, hi))
    }
}

/// Renders one polyline per series on shared axes.
///
/// With `log_y` the y-axis shows `log10(value)`; values that cannot be
/// plotted (non-finite, or non-positive on a log axis) are dropped and
/// their number recorded in a comment. Output depends only on the input.
pub fn render_svg(series: &[Series], log_y: bool) -> Result<String> {
    if series.is_empty() {
        return Err(HarnessError::Usage("nothing to plot: no series given".into()));
    }
    let mut dropped = 0usize;
    let kept: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .filter_map(|&(x, y)| {
                    let y = if log_y { y.log10() } else { y };
                    if x.is_finite() && y.is_finite() {
                        Some((x, y))
                    } else {
                        dropped += 1;
                        None
                    }
                })
                .collect()
        })
        .collect();
    let all = || kept.iter().flatten();
    let (x0, x1) = extent(all().map(|p| p.0))
        .ok_or_else(|| HarnessError::Usage("nothing to plot: every value is non-finite".into()))?;
    let (y0, y1) = extent(all().map(|p| p.1)).unwrap();

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| MARGIN_TOP + (y1 - y) / (y1 - y0) * plot_h;
    let tick = |v: f64| if log_y { format!("1e{v:.2}") } else { format!("{v:.4e}") };

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    )
    .unwrap();
    writeln!(out, "<!-- dropped {dropped} non-plottable values -->").unwrap();
    writeln!(out, "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>").unwrap();
    writeln!(
        out,
        "<rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" width=\"{plot_w}\" height=\"{plot_h}\" fill=\"none\" stroke=\"black\"/>"
    )
    .unwrap();

    let text = |out: &mut String, x: f64, y: f64, anchor: &str, s: &str| {
        writeln!(
            out,
            "<text x=\"{x:.2}\" y=\"{y:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"{anchor}\">{}</text>",
            escape(s)
        )
        .unwrap();
    };
    let bottom = MARGIN_TOP + plot_h;
    text(&mut out, MARGIN_LEFT, bottom + 20.0, "start", &format!("{x0}"));
    text(&mut out, MARGIN_LEFT + plot_w, bottom + 20.0, "end", &format!("{x1}"));
    text(&mut out, MARGIN_LEFT + plot_w / 2.0, bottom + 45.0, "middle", "t");
    text(&mut out, MARGIN_LEFT - 6.0, bottom, "end", &tick(y0));
    text(&mut out, MARGIN_LEFT - 6.0, MARGIN_TOP + 12.0, "end", &tick(y1));

    for (k, (s, pts)) in series.iter().zip(&kept).enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.5\" points=\"{}\"/>",
            coords.join(" ")
        )
        .unwrap();
        let ly = MARGIN_TOP + 18.0 + 18.0 * k as f64;
        let lx = MARGIN_LEFT + plot_w - 150.0;
        writeln!(
            out,
            "<line x1=\"{lx:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{colour}\" stroke-width=\"2\"/>",
            ly - 4.0,
            lx + 20.0,
            ly - 4.0
        )
        .unwrap();
        text(&mut out, lx + 26.0, ly, "start", &s.label);
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn emit_svg_plot(series: &[Series], path: impl AsRef<Path>, log_y: bool) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, render_svg(series, log_y)?).map_err(|e| HarnessError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn polylines(svg: &str) -> Vec<Vec<(f64, f64)>> {
        svg.lines()
            .filter_map(|l| l.split("points=\"").nth(1))
            .map(|rest| {
                rest.split('"')
                    .next()
                    .unwrap()
                    .split(' ')
                    .map(|p| {
                        let (x, y) = p.split_once(',').unwrap();
                        (x.parse().unwrap(), y.parse().unwrap())
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn constant_series_is_horizontal() {
        let s = Series::new("c", (0..10).map(|t| (t as f64, 0.5)).collect());
        let svg = render_svg(&[s], false).unwrap();
        let line = &polylines(&svg)[0];
        assert_eq!(line.len(), 10);
        assert!(line.iter().all(|p| p.1 == line[0].1));
        assert!(svg.contains("viewBox=\"0 0 800 600\""));
    }

    #[test]
    fn non_plottable_values_are_counted() {
        let s = Series::new("kl", vec![(0.0, 1.0), (1.0, f64::NAN), (2.0, 0.0), (3.0, 10.0)]);
        let svg = render_svg(std::slice::from_ref(&s), true).unwrap();
        assert!(svg.contains("<!-- dropped 2 non-plottable values -->"));
        assert_eq!(polylines(&svg)[0].len(), 2);
        let svg = render_svg(&[s], false).unwrap();
        assert!(svg.contains("<!-- dropped 1 non-plottable values -->"));
    }

    #[test]
    fn rising_series_rises_on_screen() {
        let s = Series::new("kl", (1..50).map(|t| (t as f64, (t as f64).exp())).collect());
        let line = &polylines(&render_svg(&[s], true).unwrap())[0];
        assert!(line.windows(2).all(|w| w[1].1 < w[0].1 && w[1].0 > w[0].0));
    }

    #[test]
    fn output_is_deterministic_and_escaped() {
        let s = vec![
            Series::new("a<b", vec![(0.0, 1.0), (1.0, 2.0)]),
            Series::new("b&c", vec![(0.0, 3.0), (1.0, 0.5)]),
        ];
        let a = render_svg(&s, false).unwrap();
        assert_eq!(a, render_svg(&s, false).unwrap());
        assert!(a.contains("a&lt;b") && a.contains("b&amp;c"));
        assert_eq!(polylines(&a).len(), 2);
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(render_svg(&[], false).is_err());
        assert!(render_svg(&[Series::new("x", vec![(0.0, f64::NAN)])], false).is_err());
    }
}
