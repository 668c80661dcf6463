//! Static HTML and SVG rendering.

use std::fmt::Write;

use chrono::{DateTime, Utc};

use super::config::Thresholds;
use crate::data::{format_timestamp, summary_stats};
use crate::evaluation::ImportanceEntry;

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

/// One hour of building-level means.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub timestamp: DateTime<Utc>,
    /// Same order as [`Thresholds::PARAMETERS`].
    pub values: [Option<f64>; 6],
}

pub struct ReportInput<'a> {
    pub building_id: &'a str,
    pub from: Option<DateTime<Utc>>,
    pub to: Option<DateTime<Utc>>,
    pub rows: &'a [ReportRow],
    pub thresholds: &'a Thresholds,
    /// LOESS trend of pm25, aligned with the rows that have pm25.
    pub trend: &'a [(DateTime<Utc>, f64, f64)],
}

const STYLE: &str = "body{font-family:sans-serif;margin:2em}\
table{border-collapse:collapse;margin-bottom:1.5em}\
td,th{border:1px solid #ccc;padding:2px 6px;text-align:right}\
td.good{background:#c8e6c9}td.moderate{background:#fff59d}td.poor{background:#ef9a9a}\
td.na{color:#999}.banner{padding:1em;background:#eee;border:1px solid #999;font-weight:bold}";

pub fn render_html(input: &ReportInput) -> String {
    let mut h = String::new();
    let title = format!("Indoor air quality: {}", escape(input.building_id));
    let _ = write!(
        h,
        "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>{title}</title>\n<style>{STYLE}</style>\n</head>\n<body>\n<h1>{title}</h1>\n"
    );
    let range = |t: Option<DateTime<Utc>>| t.map(|t| format_timestamp(&t)).unwrap_or_else(|| "-".into());
    let _ = writeln!(h, "<p>From {} to {}</p>", range(input.from), range(input.to));

    if input.rows.is_empty() {
        h.push_str("<div class=\"banner no-data\">No data for the selected building and date range.</div>\n");
        h.push_str("</body>\n</html>\n");
        return h;
    }

    h.push_str("<h2>Summary</h2>\n<table class=\"summary\">\n<tr><th>parameter</th><th>n</th><th>min</th><th>median</th><th>mean</th><th>max</th><th>sd</th></tr>\n");
    for (k, p) in Thresholds::PARAMETERS.iter().enumerate() {
        let col: Vec<Option<f64>> = input.rows.iter().map(|r| r.values[k]).collect();
        match summary_stats(&col) {
            Ok(s) => {
                let _ = writeln!(
                    h,
                    "<tr><th>{p}</th><td>{}</td><td>{:.2}</td><td>{:.2}</td><td>{:.2}</td><td>{:.2}</td><td>{:.2}</td></tr>",
                    s.n, s.min, s.median, s.mean, s.max, s.sd
                );
            }
            Err(_) => {
                let _ = writeln!(h, "<tr><th>{p}</th><td>0</td><td class=\"na\" colspan=\"5\">no values</td></tr>");
            }
        }
    }
    h.push_str("</table>\n");

    if !input.trend.is_empty() {
        h.push_str("<h2>PM2.5 trend (LOESS, span 0.2)</h2>\n");
        h.push_str(&trend_svg(input.trend));
        h.push('\n');
    }

    h.push_str("<h2>Hourly values</h2>\n<table class=\"hourly\">\n<tr><th>timestamp</th>");
    for p in Thresholds::PARAMETERS {
        let _ = write!(h, "<th>{p}</th>");
    }
    h.push_str("</tr>\n");
    for r in input.rows {
        let _ = write!(h, "<tr><th>{}</th>", format_timestamp(&r.timestamp));
        for (k, p) in Thresholds::PARAMETERS.iter().enumerate() {
            match r.values[k] {
                Some(v) => {
                    let band = input.thresholds.get(p).expect("known parameter").classify(v);
                    let _ = write!(h, "<td class=\"{}\">{v:.2}</td>", band.as_str());
                }
                None => h.push_str("<td class=\"na\">NA</td>"),
            }
        }
        h.push_str("</tr>\n");
    }
    h.push_str("</table>\n</body>\n</html>\n");
    h
}

const W: f64 = 800.0;
const H: f64 = 300.0;
const PAD: f64 = 40.0;

fn polyline(points: &[(f64, f64)], color: &str, width: f64) -> String {
    let pts: Vec<String> = points.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
    format!(
        "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\" points=\"{}\"/>",
        pts.join(" ")
    )
}

/// Observed series (grey) and trend (blue) over time.
pub fn trend_svg(series: &[(DateTime<Utc>, f64, f64)]) -> String {
    let t0 = series[0].0.timestamp() as f64;
    let t1 = series[series.len() - 1].0.timestamp() as f64;
    let span = (t1 - t0).max(1.0);
    let lo = series.iter().flat_map(|s| [s.1, s.2]).fold(f64::INFINITY, f64::min);
    let hi = series.iter().flat_map(|s| [s.1, s.2]).fold(f64::NEG_INFINITY, f64::max);
    let range = (hi - lo).max(1e-9);
    let x = |t: &DateTime<Utc>| PAD + (t.timestamp() as f64 - t0) / span * (W - 2.0 * PAD);
    let y = |v: f64| H - PAD - (v - lo) / range * (H - 2.0 * PAD);
    let raw: Vec<(f64, f64)> = series.iter().map(|s| (x(&s.0), y(s.1))).collect();
    let fit: Vec<(f64, f64)> = series.iter().map(|s| (x(&s.0), y(s.2))).collect();
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\
<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\
<text x=\"{PAD}\" y=\"{}\" font-size=\"11\">{lo:.1}</text><text x=\"{PAD}\" y=\"{}\" font-size=\"11\">{hi:.1}</text>\
{}{}</svg>",
        H - PAD + 14.0,
        PAD - 4.0,
        polyline(&raw, "#bbbbbb", 1.0),
        polyline(&fit, "#1565c0", 2.0)
    )
}

/// Horizontal bar chart of mean RMSE loss.
pub fn importance_svg(entries: &[ImportanceEntry]) -> String {
    let label_w = 200.0;
    let bar_h = 20.0;
    let height = PAD + bar_h * entries.len() as f64 + PAD;
    let max = entries.iter().map(|e| e.mean_rmse_loss).fold(0.0, f64::max).max(1e-12);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{height}\" viewBox=\"0 0 {W} {height}\">\
<rect width=\"{W}\" height=\"{height}\" fill=\"white\"/>\
<text x=\"{PAD}\" y=\"{}\" font-size=\"13\">Mean RMSE increase when permuted</text>",
        PAD - 15.0
    );
    for (i, e) in entries.iter().enumerate() {
        let top = PAD + i as f64 * bar_h;
        let len = e.mean_rmse_loss.max(0.0) / max * (W - label_w - 2.0 * PAD);
        let _ = write!(
            s,
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{}</text>\
<rect x=\"{}\" y=\"{}\" width=\"{len:.1}\" height=\"{}\" fill=\"#1565c0\"/>\
<text x=\"{}\" y=\"{}\" font-size=\"10\">{:.4}</text>",
            PAD + label_w - 6.0,
            top + 14.0,
            escape(&e.feature),
            PAD + label_w,
            top + 3.0,
            bar_h - 6.0,
            PAD + label_w + len + 4.0,
            top + 14.0,
            e.mean_rmse_loss
        );
    }
    s.push_str("</svg>");
    s
}
