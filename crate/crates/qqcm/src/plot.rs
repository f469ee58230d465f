//! Minimal static SVG line plots of the CSV outputs.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::output::Table;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Trajectory,
    Queue,
    Sweep,
    Cdf,
    Comparison,
}

impl FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "trajectory" => PlotKind::Trajectory,
            "queue" => PlotKind::Queue,
            "sweep" => PlotKind::Sweep,
            "cdf" => PlotKind::Cdf,
            "comparison" => PlotKind::Comparison,
            _ => return Err(Error::Malformed(format!("unknown plot kind {s:?}"))),
        })
    }
}

impl PlotKind {
    /// Guesses the kind from a header row.
    pub fn detect(headers: &[String]) -> Option<PlotKind> {
        let has = |h: &str| headers.iter().any(|x| x == h);
        if has("F_numeric") {
            Some(PlotKind::Comparison)
        } else if has("E_C") {
            Some(PlotKind::Sweep)
        } else if has("t_depart") && has("C") {
            Some(PlotKind::Trajectory)
        } else if has("Wq") {
            Some(PlotKind::Queue)
        } else if has("F") {
            Some(PlotKind::Cdf)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Optional symmetric error bars.
    pub err: Option<Vec<f64>>,
    pub markers: bool,
}

fn column(table: &Table, name: &str) -> Result<Vec<f64>> {
    table
        .column(name)
        .ok_or_else(|| Error::Malformed(format!("missing column {name:?}")))
}

/// Turns a table into an SVG document.
pub fn plot_table(table: &Table, kind: PlotKind) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::Malformed("no data rows".into()));
    }
    let (series, xl, yl) = match kind {
        PlotKind::Trajectory => (
            vec![line("C", column(table, "n")?, column(table, "C")?)],
            "collision n",
            "coherence C",
        ),
        PlotKind::Queue => (
            vec![line("Wq", column(table, "n")?, column(table, "Wq")?)],
            "ancilla n",
            "waiting time",
        ),
        PlotKind::Sweep => {
            let axis = table.headers[0].clone();
            let mut s = line("E(C)", column(table, &axis)?, column(table, "E_C")?);
            s.err = Some(column(table, "stderr")?);
            s.markers = true;
            let xl = if axis == "g_delta" { "g·Δ" } else { "r" };
            (vec![s], xl, "E(C)")
        }
        PlotKind::Cdf => (vec![line("F", column(table, "x")?, column(table, "F")?)], "x", "CDF"),
        PlotKind::Comparison => {
            let x = column(table, "x")?;
            (
                vec![
                    line("numeric", x.clone(), column(table, "F_numeric")?),
                    line("empirical", x, column(table, "F_empirical")?),
                ],
                "x",
                "CDF",
            )
        }
    };
    render(&series, xl, yl)
}

fn line(label: &str, x: Vec<f64>, y: Vec<f64>) -> Series {
    Series {
        label: label.into(),
        x,
        y,
        err: None,
        markers: false,
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if lo > hi {
        return None;
    }
    if lo == hi {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        return Some((lo - pad, hi + pad));
    }
    Some((lo, hi))
}

/// Renders line series with axes, ticks, labels and a legend.
pub fn render(series: &[Series], x_label: &str, y_label: &str) -> Result<String> {
    let xs = series.iter().flat_map(|s| s.x.iter().copied());
    let ys = series.iter().flat_map(|s| {
        let e = s.err.clone().unwrap_or_else(|| vec![0.0; s.y.len()]);
        s.y.iter().zip(e).flat_map(|(y, e)| [y - e, y + e]).collect::<Vec<_>>()
    });
    let (x0, x1) = range(xs).ok_or_else(|| Error::Malformed("no finite x values".into()))?;
    let (y0, y1) = range(ys).ok_or_else(|| Error::Malformed("no finite y values".into()))?;
    let pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| MARGIN_TOP + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_TOP + ph,
            MARGIN_TOP + ph + 5.0,
            MARGIN_TOP + ph + 18.0,
            fmt_tick(xv)
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{MARGIN_LEFT}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 5.0,
            MARGIN_LEFT - 8.0,
            py + 4.0,
            fmt_tick(yv)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + pw / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        MARGIN_TOP + ph / 2.0,
        MARGIN_TOP + ph / 2.0,
        escape(y_label)
    );
    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let points: Vec<String> =
            s.x.iter()
                .zip(&s.y)
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y)))
                .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        if let Some(err) = &s.err {
            for ((x, y), e) in s.x.iter().zip(&s.y).zip(err) {
                let _ = writeln!(
                    svg,
                    r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="{color}"/>"#,
                    sx(*x),
                    sy(y - e),
                    sy(y + e)
                );
            }
        }
        if s.markers {
            for (x, y) in s.x.iter().zip(&s.y) {
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                    sx(*x),
                    sy(*y)
                );
            }
        }
        let ly = MARGIN_TOP + 14.0 + 16.0 * k as f64;
        let lx = MARGIN_LEFT + pw - 110.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{ly:.2}">{}</text>"#,
            ly - 4.0,
            lx + 20.0,
            ly - 4.0,
            lx + 26.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(headers: &[&str], rows: Vec<Vec<f64>>) -> Table {
        Table {
            headers: headers.iter().map(|s| s.to_string()).collect(),
            rows,
        }
    }

    #[test]
    fn detects_kinds() {
        let h = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        assert_eq!(
            PlotKind::detect(&h(&["r", "E_C", "Var_C", "stderr"])),
            Some(PlotKind::Sweep)
        );
        assert_eq!(PlotKind::detect(&h(&["x", "F"])), Some(PlotKind::Cdf));
        assert_eq!(PlotKind::detect(&h(&["a"])), None);
    }

    #[test]
    fn sweep_plot_is_svg() {
        let t = table(
            &["r", "E_C", "Var_C", "stderr"],
            vec![vec![0.1, 0.2, 0.01, 0.001], vec![0.5, 0.3, 0.01, 0.001]],
        );
        let svg = plot_table(&t, PlotKind::Sweep).unwrap();
        assert!(svg.starts_with("<?xml"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg, plot_table(&t, PlotKind::Sweep).unwrap());
    }

    #[test]
    fn empty_or_mismatched_tables_fail() {
        let t = table(&["x", "F"], vec![]);
        assert!(plot_table(&t, PlotKind::Cdf).is_err());
        let t = table(&["x", "F"], vec![vec![0.0, 1.0]]);
        assert!(plot_table(&t, PlotKind::Sweep).is_err());
    }

    #[test]
    fn constant_series_gets_a_range() {
        let t = table(&["x", "F"], vec![vec![0.0, 1.0], vec![1.0, 1.0]]);
        assert!(plot_table(&t, PlotKind::Cdf).is_ok());
    }
}
