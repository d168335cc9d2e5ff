//! Self-contained SVG output: MIV bar charts and adjacency heatmaps.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::blockmodel::Partition;
use crate::error::Result;
use crate::graph::DirectedGraph;

use super::{Algorithm, CellReport};

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Horizontal bars, one per `(label, value)`. Values are drawn on a
/// `[min(0, lowest), 1]` axis; missing values leave an empty row.
pub fn bar_chart_svg(title: &str, bars: &[(String, Option<f64>)]) -> String {
    let label_w = 300.0;
    let plot_w = 400.0;
    let row_h = 22.0;
    let top = 40.0;
    let height = top + row_h * bars.len() as f64 + 40.0;
    let width = label_w + plot_w + 60.0;
    let lo = bars
        .iter()
        .filter_map(|b| b.1)
        .fold(0.0f64, f64::min)
        .max(-1.0);
    let x = |v: f64| label_w + (v.clamp(lo, 1.0) - lo) / (1.0 - lo) * plot_w;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="10" y="22" font-size="15">{}</text>"#, escape(title));
    for (i, (label, value)) in bars.iter().enumerate() {
        let y = top + row_h * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            label_w - 6.0,
            y + row_h * 0.7,
            escape(label)
        );
        if let Some(v) = value {
            let (a, b) = (x(0.0), x(*v));
            let _ = writeln!(
                s,
                r##"<rect class="bar" x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="#4a78b5"><title>{:.3}</title></rect>"##,
                a.min(b),
                y + 3.0,
                (b - a).abs(),
                row_h - 6.0,
                v
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}">{v:.2}</text>"#,
                a.max(b) + 4.0,
                y + row_h * 0.7
            );
        }
    }
    let base = top + row_h * bars.len() as f64;
    let _ = writeln!(
        s,
        r#"<line x1="{0:.1}" y1="{1:.1}" x2="{0:.1}" y2="{2:.1}" stroke="black"/>"#,
        x(0.0),
        top,
        base
    );
    for t in [lo, 0.0, 0.5, 1.0] {
        if t < lo {
            continue;
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{t:.1}</text>"#,
            x(t),
            base + 16.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">MIV</text>"#,
        label_w + plot_w / 2.0,
        base + 34.0
    );
    s.push_str("</svg>\n");
    s
}

/// Adjacency matrix with one filled cell per arc. When a partition is given,
/// units are ordered by cluster and cluster boundaries are drawn.
pub fn heatmap_svg(g: &DirectedGraph, partition: Option<&Partition>) -> String {
    let n = g.n();
    let cell = 12.0;
    let margin = 10.0;
    let side = margin * 2.0 + cell * n as f64;
    let mut order: Vec<usize> = (0..n).collect();
    if let Some(p) = partition {
        order.sort_by_key(|&u| (p.cluster(u), u));
    }
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{side}" height="{side}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r##"<rect x="{margin}" y="{margin}" width="{0}" height="{0}" fill="none" stroke="#999"/>"##,
        cell * n as f64
    );
    for (r, &i) in order.iter().enumerate() {
        for (c, &j) in order.iter().enumerate() {
            if g.has_arc(i, j) {
                let _ = writeln!(
                    s,
                    r#"<rect class="arc" data-row="{r}" data-col="{c}" x="{:.1}" y="{:.1}" width="{cell}" height="{cell}" fill="black"/>"#,
                    margin + cell * c as f64,
                    margin + cell * r as f64
                );
            }
        }
    }
    if let Some(p) = partition {
        let mut at = 0;
        for size in &p.sizes()[..p.k() - 1] {
            at += size;
            let pos = margin + cell * at as f64;
            let end = margin + cell * n as f64;
            let _ = writeln!(
                s,
                r##"<line x1="{pos:.1}" y1="{margin}" x2="{pos:.1}" y2="{end:.1}" stroke="#d33"/>"##
            );
            let _ = writeln!(
                s,
                r##"<line x1="{margin}" y1="{pos:.1}" x2="{end:.1}" y2="{pos:.1}" stroke="#d33"/>"##
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlotOutcome {
    pub files: Vec<PathBuf>,
    /// Set when nothing was written.
    pub notice: Option<String>,
}

/// One bar chart per algorithm and one heatmap per cell (its first
/// replicate, ordered by the fitted partition) under `dir/plots`.
pub fn emit_plots(reports: &[CellReport], dir: &Path) -> Result<PlotOutcome> {
    if reports.is_empty() {
        return Ok(PlotOutcome {
            files: Vec::new(),
            notice: Some("no cells to plot; no plot files written".into()),
        });
    }
    let plots = dir.join("plots");
    std::fs::create_dir_all(&plots)?;
    let mut files = Vec::new();
    for alg in Algorithm::ALL {
        let bars: Vec<(String, Option<f64>)> = reports
            .iter()
            .filter(|r| r.algorithm == alg)
            .map(|r| (format!("{} / {}", r.kind, r.term_set), r.miv.as_ref().map(|m| m.value)))
            .collect();
        if bars.is_empty() {
            continue;
        }
        let path = plots.join(format!("miv_{alg}.svg"));
        std::fs::write(&path, bar_chart_svg(&format!("MIV by blockmodel and term set ({alg})"), &bars))?;
        files.push(path);
    }
    for r in reports {
        if let Some(sample) = r.sample() {
            let path = plots.join(format!("heatmap_{}.svg", r.cell_id()));
            std::fs::write(&path, heatmap_svg(&sample.graph, Some(&sample.partition)))?;
            files.push(path);
        }
    }
    Ok(PlotOutcome { files, notice: None })
}
