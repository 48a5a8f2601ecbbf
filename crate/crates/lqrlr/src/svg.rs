// Copyright 2026 The lqrlr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


//! Static 800×600 SVG charts for scenario reports.

use std::fmt::Write;

use crate::experiments::{Family, ScenarioReport};

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;
const MARGIN: (f64, f64, f64, f64) = (70.0, 30.0, 50.0, 60.0); // left, right, top, bottom
const PALETTE: [&str; 6] = ["#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d35400", "#555555"];

/// `(x, mean, min, max)` samples of one line.
#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64, f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub title: String,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    /// Row-major cells in `[0, 1]`; `None` draws a hatched cell.
    pub cells: Vec<Vec<Option<f64>>>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(title: &str) -> String {
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    writeln!(s, r#"<text x="{}" y="28" text-anchor="middle" font-size="16">{}</text>"#, WIDTH / 2.0, escape(title)).unwrap();
    s
}

/// Round tick values covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(1e-12);
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| span / s <= 6.0).unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(t);
        t += step;
    }
    out
}

fn label(v: f64) -> String {
    let s = format!("{v:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Mean lines with a shaded min/max band per series.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (ml, mr, mt, mb) = MARGIN;
    let (pw, ph) = (WIDTH - ml - mr, HEIGHT - mt - mb);
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, _, lo, hi) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(lo);
        y1 = y1.max(hi);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        (x0, x1) = (x0 - 1.0, x1 + 1.0);
    }
    let pad = ((y1 - y0) * 0.08).max(1e-6 * y1.abs().max(1.0));
    (y0, y1) = (y0 - pad, y1 + pad);
    let px = |x: f64| ml + (x - x0) / (x1 - x0) * pw;
    let py = |y: f64| mt + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut s = header(title);
    writeln!(s, r#"<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#).unwrap();
    for t in ticks(x0, x1) {
        let x = px(t);
        writeln!(s, r##"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="#ddd"/>"##, mt, mt + ph).unwrap();
        writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, mt + ph + 18.0, label(t)).unwrap();
    }
    for t in ticks(y0, y1) {
        let y = py(t);
        writeln!(s, r##"<line x1="{ml}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd"/>"##, ml + pw).unwrap();
        writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, ml - 6.0, y + 4.0, label(t)).unwrap();
    }
    writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, ml + pw / 2.0, HEIGHT - 15.0, escape(x_label)).unwrap();
    writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        mt + ph / 2.0,
        escape(y_label)
    )
    .unwrap();

    for (idx, ser) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let upper = ser.points.iter().map(|p| format!("{:.2},{:.2}", px(p.0), py(p.3)));
        let lower = ser.points.iter().rev().map(|p| format!("{:.2},{:.2}", px(p.0), py(p.2)));
        let band: Vec<String> = upper.chain(lower).collect();
        writeln!(s, r#"<polygon points="{}" fill="{color}" fill-opacity="0.15" stroke="none"/>"#, band.join(" ")).unwrap();
        let line: Vec<String> = ser.points.iter().map(|p| format!("{:.2},{:.2}", px(p.0), py(p.1))).collect();
        writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, line.join(" ")).unwrap();
        for p in &ser.points {
            writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, px(p.0), py(p.1)).unwrap();
        }
        let ly = mt + 16.0 + 18.0 * idx as f64;
        writeln!(s, r#"<rect x="{}" y="{}" width="14" height="4" fill="{color}"/>"#, ml + 12.0, ly - 6.0).unwrap();
        writeln!(s, r#"<text x="{}" y="{ly}">{}</text>"#, ml + 32.0, escape(&ser.name)).unwrap();
    }
    s.push_str("</svg>\n");
    s
}

/// Side-by-side grayscale grids: black is 0, white is 1.
pub fn heatmap(title: &str, x_label: &str, y_label: &str, panels: &[Panel]) -> String {
    let (ml, mr, mt, mb) = MARGIN;
    let gap = 30.0;
    let count = panels.len().max(1) as f64;
    let pw = (WIDTH - ml - mr - gap * (count - 1.0)) / count;
    let ph = HEIGHT - mt - mb - 20.0;
    let mut s = header(title);
    s.push_str(
        r##"<defs><pattern id="na" width="6" height="6" patternUnits="userSpaceOnUse"><path d="M0,6 L6,0" stroke="#999"/></pattern></defs>
"##,
    );
    for (p_idx, panel) in panels.iter().enumerate() {
        let left = ml + p_idx as f64 * (pw + gap);
        let top = mt + 20.0;
        let rows = panel.row_labels.len().max(1);
        let cols = panel.col_labels.len().max(1);
        let (cw, ch) = (pw / cols as f64, ph / rows as f64);
        writeln!(s, r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#, left + pw / 2.0, mt + 10.0, escape(&panel.title)).unwrap();
        for (i, row) in panel.cells.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                let fill = match cell {
                    Some(v) => {
                        let g = (v.clamp(0.0, 1.0) * 255.0).round() as u8;
                        format!("rgb({g},{g},{g})")
                    }
                    None => "url(#na)".to_string(),
                };
                // First row at the bottom, like a y axis.
                let y = top + (rows - 1 - i) as f64 * ch;
                writeln!(
                    s,
                    r##"<rect x="{:.2}" y="{y:.2}" width="{cw:.2}" height="{ch:.2}" fill="{fill}" stroke="#888" stroke-width="0.5"/>"##,
                    left + j as f64 * cw
                )
                .unwrap();
            }
        }
        writeln!(s, r#"<rect x="{left:.2}" y="{top}" width="{pw:.2}" height="{ph}" fill="none" stroke="black"/>"#).unwrap();
        let every = |n: usize| n.div_ceil(12).max(1);
        for (j, l) in panel.col_labels.iter().enumerate().step_by(every(cols)) {
            let x = left + (j as f64 + 0.5) * cw;
            writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle" font-size="10">{}</text>"#, top + ph + 14.0, escape(l)).unwrap();
        }
        if p_idx == 0 {
            for (i, l) in panel.row_labels.iter().enumerate().step_by(every(rows)) {
                let y = top + (rows - 1 - i) as f64 * ch + ch / 2.0 + 4.0;
                writeln!(s, r#"<text x="{:.2}" y="{y:.2}" text-anchor="end" font-size="10">{}</text>"#, left - 5.0, escape(l)).unwrap();
            }
        }
    }
    writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 12.0, escape(x_label)).unwrap();
    writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        HEIGHT / 2.0,
        escape(y_label)
    )
    .unwrap();
    s.push_str("</svg>\n");
    s
}

/// The chart matching a report's scenario.
pub fn plot_report(report: &ScenarioReport) -> String {
    let c = &report.config;
    match c.scenario {
        1 => {
            let families: Vec<Family> = [Family::LowRank, Family::Sparse, Family::Control]
                .into_iter()
                .filter(|f| report.aggregates_for(*f).next().is_some())
                .collect();
            let series: Vec<Series> = families
                .iter()
                .map(|&f| Series {
                    name: f.name().to_string(),
                    points: report
                        .aggregates_for(f)
                        .filter_map(|a| Some((a.agents as f64, a.mean_cost_ratio?, a.min_cost_ratio?, a.max_cost_ratio?)))
                        .collect(),
                })
                .collect();
            line_chart("LQR cost increment", "number of agents N", "J / J_stand", &series)
        }
        4 => {
            let mut series = Vec::new();
            for &n in &c.agent_counts {
                for f in [Family::LowRank, Family::Sparse] {
                    series.push(Series {
                        name: format!("{} N={n}", f.name()),
                        points: report
                            .aggregates_for(f)
                            .filter(|a| a.agents == n)
                            .filter_map(|a| {
                                Some((a.sweep_value?, a.mean_cost_ratio?, a.min_cost_ratio?, a.max_cost_ratio?))
                            })
                            .collect(),
                    });
                }
            }
            line_chart("Cost at matched critical-node transmissions", "rank r", "J / J_stand", &series)
        }
        _ => {
            let (cols, x_label): (Vec<f64>, &str) = if c.scenario == 2 {
                (c.noise_variances.clone(), "noise variance")
            } else {
                (c.attack_counts.iter().map(|&l| l as f64).collect(), "links under attack")
            };
            let panels: Vec<Panel> = [Family::Standard, Family::Sparse, Family::LowRank]
                .into_iter()
                .map(|f| Panel {
                    title: f.name().to_string(),
                    row_labels: c.agent_counts.iter().map(|n| n.to_string()).collect(),
                    col_labels: cols.iter().map(|&v| label(v)).collect(),
                    cells: c
                        .agent_counts
                        .iter()
                        .map(|&n| {
                            cols.iter()
                                .map(|&v| {
                                    report
                                        .aggregates_for(f)
                                        .find(|a| a.agents == n && a.sweep_value == Some(v))
                                        .and_then(|a| a.success_probability)
                                })
                                .collect()
                        })
                        .collect(),
                })
                .collect();
            heatmap("Probability that the perturbed gain is stabilizing", x_label, "number of agents N", &panels)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_are_round() {
        assert_eq!(ticks(0.0, 1.0), [0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]);
        assert_eq!(ticks(10.0, 20.0), [10.0, 12.0, 14.0, 16.0, 18.0, 20.0]);
    }

    #[test]
    fn canvas_size_and_gray_levels() {
        let panel = Panel {
            title: "p".into(),
            row_labels: vec!["10".into()],
            col_labels: vec!["0.1".into(), "0.2".into()],
            cells: vec![vec![Some(0.0), Some(1.0)]],
        };
        let svg = heatmap("t", "x", "y", &[panel]);
        assert!(svg.starts_with(r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="600""#));
        assert!(svg.contains("rgb(0,0,0)") && svg.contains("rgb(255,255,255)"));
        let chart = line_chart("t", "x", "y", &[Series { name: "a".into(), points: vec![(1.0, 2.0, 1.5, 2.5)] }]);
        assert!(chart.contains("<polygon") && chart.ends_with("</svg>\n"));
    }
}
