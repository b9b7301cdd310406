//! Static SVG plots. Every report row becomes exactly one element with
//! class `marker`: a circle in scatter plots, a rug tick in histograms.
//! Rows missing a coordinate are drawn as a rug tick under the x axis.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::report::{ExperimentReport, PlotKind, PlotSpec};

const PANEL_W: f64 = 560.0;
const PANEL_H: f64 = 360.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 60.0;
const BINS: usize = 30;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[derive(Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>) -> Axis {
        let (lo, hi) = values
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if !lo.is_finite() {
            return Axis { lo: 0.0, hi: 1.0 };
        }
        if hi - lo < 1e-12 * (1.0 + lo.abs()) {
            return Axis { lo: lo - 0.5, hi: hi + 0.5 };
        }
        let pad = 0.04 * (hi - lo);
        Axis {
            lo: lo - pad,
            hi: hi + pad,
        }
    }

    fn frac(&self, v: f64) -> f64 {
        ((v - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }
}

fn group_key(report: &ExperimentReport, spec: &PlotSpec, row: usize) -> String {
    match report.column(spec.group) {
        Some(j) => match &report.rows[row][j] {
            super::Cell::Int(v) => v.to_string(),
            super::Cell::Text(s) => s.clone(),
            super::Cell::Real(v) => v.to_string(),
            super::Cell::Na => "NA".into(),
        },
        None => "all".into(),
    }
}

fn frame(out: &mut String, x0: f64, y0: f64, xa: Axis, ya: Axis, spec: &PlotSpec, subtitle: &str) {
    let (w, h) = (PANEL_W - MARGIN_L - MARGIN_R, PANEL_H - MARGIN_T - MARGIN_B);
    let (left, top) = (x0 + MARGIN_L, y0 + MARGIN_T);
    let _ = writeln!(
        out,
        r#"<rect x="{left:.2}" y="{top:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="black"/>"#
    );
    for t in 0..=4 {
        let f = t as f64 / 4.0;
        let xv = xa.lo + f * (xa.hi - xa.lo);
        let yv = ya.lo + f * (ya.hi - ya.lo);
        let px = left + f * w;
        let py = top + h - f * h;
        let _ = writeln!(
            out,
            r#"<text x="{px:.2}" y="{:.2}" font-size="10" text-anchor="middle">{}</text>"#,
            top + h + 14.0,
            tick(xv)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="end">{}</text>"#,
            left - 4.0,
            py + 3.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
        left + w / 2.0,
        top + h + 36.0,
        escape(&spec.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
        x0 + 16.0,
        top + h / 2.0,
        x0 + 16.0,
        top + h / 2.0,
        escape(&spec.y_label)
    );
    if !subtitle.is_empty() {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
            left + w / 2.0,
            top - 8.0,
            escape(subtitle)
        );
    }
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn rug(out: &mut String, px: f64, base: f64, color: &str, class: &str) {
    let _ = writeln!(
        out,
        r#"<line class="{class}" x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="{color}"/>"#,
        base + 18.0,
        base + 26.0
    );
}

fn scatter(report: &ExperimentReport, spec: &PlotSpec, x: &str, y: &str) -> (String, f64, f64) {
    let xs = report.reals(x);
    let ys = report.reals(y);
    let xa = Axis::fit(xs.iter().flatten().copied());
    let ya = Axis::fit(ys.iter().flatten().copied());
    let mut groups: BTreeMap<String, usize> = BTreeMap::new();
    for i in 0..report.rows.len() {
        let next = groups.len();
        groups.entry(group_key(report, spec, i)).or_insert(next);
    }
    let mut body = String::new();
    frame(&mut body, 0.0, 0.0, xa, ya, spec, "");
    let (w, h) = (PANEL_W - MARGIN_L - MARGIN_R, PANEL_H - MARGIN_T - MARGIN_B);
    for i in 0..report.rows.len() {
        let color = COLORS[groups[&group_key(report, spec, i)] % COLORS.len()];
        match (xs.get(i).copied().flatten(), ys.get(i).copied().flatten()) {
            (Some(xv), Some(yv)) => {
                let px = MARGIN_L + xa.frac(xv) * w;
                let py = MARGIN_T + h - ya.frac(yv) * h;
                let _ = writeln!(
                    body,
                    r#"<circle class="marker" cx="{px:.2}" cy="{py:.2}" r="2" fill="{color}" fill-opacity="0.5"/>"#
                );
            }
            (xv, _) => {
                let px = MARGIN_L + xv.map_or(0.0, |v| xa.frac(v)) * w;
                rug(&mut body, px, MARGIN_T + h + 22.0, color, "marker missing");
            }
        }
    }
    for (name, idx) in &groups {
        let _ = writeln!(
            body,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" fill="{}">{} = {}</text>"#,
            MARGIN_L + 8.0,
            MARGIN_T + 14.0 + 14.0 * *idx as f64,
            COLORS[idx % COLORS.len()],
            escape(spec.group),
            escape(name)
        );
    }
    (body, PANEL_W, PANEL_H + 30.0)
}

fn histogram(report: &ExperimentReport, spec: &PlotSpec, column: &str) -> (String, f64, f64) {
    let values = report.reals(column);
    let mut groups: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for i in 0..report.rows.len() {
        groups.entry(group_key(report, spec, i)).or_default().push(i);
    }
    let (w, h) = (PANEL_W - MARGIN_L - MARGIN_R, PANEL_H - MARGIN_T - MARGIN_B);
    let panel_h = PANEL_H + 30.0;
    let mut body = String::new();
    for (p, (name, rows)) in groups.iter().enumerate() {
        let y0 = p as f64 * panel_h;
        let xa = Axis::fit(rows.iter().filter_map(|&i| values[i]));
        let mut counts = [0usize; BINS];
        for v in rows.iter().filter_map(|&i| values[i]) {
            counts[((xa.frac(v) * BINS as f64) as usize).min(BINS - 1)] += 1;
        }
        let ya = Axis {
            lo: 0.0,
            hi: counts.iter().copied().max().unwrap_or(0).max(1) as f64 * 1.05,
        };
        let color = COLORS[p % COLORS.len()];
        let _ = writeln!(body, r#"<g transform="translate(0 {y0:.2})">"#);
        frame(&mut body, 0.0, 0.0, xa, ya, spec, &format!("{} = {name}", spec.group));
        let bw = w / BINS as f64;
        for (b, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let bh = ya.frac(c as f64) * h;
            let _ = writeln!(
                body,
                r#"<rect class="bar" x="{:.2}" y="{:.2}" width="{:.2}" height="{bh:.2}" fill="{color}" fill-opacity="0.6"/>"#,
                MARGIN_L + b as f64 * bw,
                MARGIN_T + h - bh,
                bw
            );
        }
        for &i in rows {
            let (px, class) = match values[i] {
                Some(v) => (MARGIN_L + xa.frac(v) * w, "marker"),
                None => (MARGIN_L, "marker missing"),
            };
            rug(&mut body, px, MARGIN_T + h + 22.0, color, class);
        }
        body.push_str("</g>\n");
    }
    let total_h = panel_h * groups.len().max(1) as f64;
    (body, PANEL_W, total_h)
}

/// Renders the report's plot; a report without a plot spec gets an empty
/// canvas with the experiment name.
pub fn render_svg(report: &ExperimentReport) -> String {
    let (body, width, height) = match &report.plot {
        Some(spec) => match spec.kind {
            PlotKind::Scatter { x, y } => scatter(report, spec, x, y),
            PlotKind::Histogram { column } => histogram(report, spec, column),
        },
        None => (String::new(), PANEL_W, PANEL_H),
    };
    let title = report
        .plot
        .as_ref()
        .map_or_else(|| report.experiment.to_string(), |p| p.title.clone());
    let height = height + 30.0;
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(&title));
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="20" font-size="13" text-anchor="middle">{}</text>"#,
        width / 2.0,
        escape(&title)
    );
    let _ = writeln!(out, r#"<g transform="translate(0 30)">"#);
    out.push_str(&body);
    out.push_str("</g>\n</svg>\n");
    out
}
