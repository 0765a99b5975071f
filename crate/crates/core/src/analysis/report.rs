use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::bench::TimingRow;
use super::confusion::ConfusionMatrix3;
use super::dynamics::DynamicsReport;
use super::graph::GraphMetrics;
use super::roc::RocCurve;
use crate::error::{Error, Result};
use crate::estimators::Method;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodEvaluation {
    pub method: Method,
    pub roc: RocCurve,
    pub auc: f64,
    pub target_fpr: f64,
    pub tpr_at_target: f64,
    /// Score threshold of the operating point at the target FPR.
    #[serde(with = "super::roc::infinite_as_null")]
    pub operating_threshold: f64,
    pub confusion: Option<ConfusionMatrix3>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DurationPoint {
    pub method: Method,
    pub duration_min: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub methods: Vec<MethodEvaluation>,
    pub tpr_vs_duration: Vec<DurationPoint>,
    pub graph: Option<GraphMetrics>,
    pub dynamics: Option<DynamicsReport>,
    pub timing: Vec<TimingRow>,
    /// `(degree, node count)` of the estimated or true network.
    pub degree_histogram: Vec<(usize, usize)>,
}

fn write(path: PathBuf, body: String) -> Result<PathBuf> {
    std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

impl EvaluationReport {
    pub fn write_json(&self, path: &Path) -> Result<()> {
        write(path.to_path_buf(), serde_json::to_string_pretty(self)?).map(|_| ())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// `method,fpr,tpr,threshold`, one row per curve point.
    pub fn roc_csv(&self) -> String {
        let mut out = String::from("method,fpr,tpr,threshold\n");
        for m in &self.methods {
            for p in &m.roc.points {
                let _ = writeln!(out, "{},{},{},{}", m.method, p.fpr, p.tpr, p.threshold);
            }
        }
        out
    }

    pub fn timing_csv(&self) -> String {
        let mut out = String::from("method,channels,duration_min,threads,seconds,pairs_per_second\n");
        for r in &self.timing {
            let _ = writeln!(out, "{},{},{},{},{},{}", r.method, r.channels, r.duration_min, r.threads, r.seconds, r.pairs_per_second);
        }
        out
    }

    pub fn degree_hist_csv(&self) -> String {
        let mut out = String::from("degree,count\n");
        for (d, c) in &self.degree_histogram {
            let _ = writeln!(out, "{d},{c}");
        }
        out
    }

    pub fn tpr_vs_duration_csv(&self) -> String {
        let mut out = String::from("method,duration_min,tpr\n");
        for p in &self.tpr_vs_duration {
            let _ = writeln!(out, "{},{},{}", p.method, p.duration_min, p.tpr);
        }
        out
    }
}

type Series = (String, Vec<(f64, f64)>);

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Minimal SVG line chart with one polyline per series (every point kept).
pub fn line_chart_svg(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (w, h, m) = (640.0, 420.0, 60.0);
    let finite = |v: f64| if v.is_finite() { v } else { 0.0 };
    let all = series.iter().flat_map(|s| s.1.iter()).map(|&(x, y)| (finite(x), finite(y)));
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let sx = |x: f64| m + (finite(x) - x0) / (x1 - x0).max(1e-12) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (finite(y) - y0) / (y1 - y0).max(1e-12) * (h - 2.0 * m);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\">{title}</text>\n\
         <line x1=\"{m}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n\
         <line x1=\"{m}\" y1=\"{m}\" x2=\"{m}\" y2=\"{}\" stroke=\"black\"/>\n\
         <text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{x_label} [{x0:.3}, {x1:.3}]</text>\n\
         <text x=\"15\" y=\"{}\" transform=\"rotate(-90 15 {})\" text-anchor=\"middle\">{y_label} [{y0:.3}, {y1:.3}]</text>\n",
        w / 2.0,
        h - m,
        w - m,
        h - m,
        h - m,
        w / 2.0,
        h - 20.0,
        h / 2.0,
        h / 2.0,
    );
    for (i, (name, points)) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(svg, "<polyline class=\"series\" data-name=\"{name}\" fill=\"none\" stroke=\"{colour}\" points=\"{}\"/>", coords.join(" "));
        let _ = writeln!(svg, "<text x=\"{}\" y=\"{}\" fill=\"{colour}\">{name}</text>", w - m - 80.0, m + 16.0 * i as f64);
    }
    svg.push_str("</svg>\n");
    svg
}

/// Write the plot-ready CSVs and their SVG renderings into `dir`. Empty
/// sections are skipped with a log note. Returns the written paths.
pub fn emit_plots(report: &EvaluationReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    if report.methods.is_empty() {
        log::info!("no ROC curves, roc plot skipped");
    } else {
        written.push(write(dir.join("roc.csv"), report.roc_csv())?);
        let series: Vec<Series> = report
            .methods
            .iter()
            .map(|m| (m.method.to_string(), m.roc.points.iter().map(|p| (p.fpr, p.tpr)).collect()))
            .collect();
        written.push(write(dir.join("roc.svg"), line_chart_svg("ROC", "FPR", "TPR", &series))?);
    }
    if report.tpr_vs_duration.is_empty() {
        log::info!("no duration sweep, tpr_vs_duration plot skipped");
    } else {
        written.push(write(dir.join("tpr_vs_duration.csv"), report.tpr_vs_duration_csv())?);
        let mut methods: Vec<Method> = report.tpr_vs_duration.iter().map(|p| p.method).collect();
        methods.dedup();
        let series: Vec<Series> = methods
            .iter()
            .map(|&m| (m.to_string(), report.tpr_vs_duration.iter().filter(|p| p.method == m).map(|p| (p.duration_min, p.tpr)).collect()))
            .collect();
        written.push(write(dir.join("tpr_vs_duration.svg"), line_chart_svg("TPR at the target FPR", "minutes", "TPR", &series))?);
    }
    if report.degree_histogram.is_empty() {
        log::info!("no degree histogram, degree plot skipped");
    } else {
        written.push(write(dir.join("degree_hist.csv"), report.degree_hist_csv())?);
        let series = vec![("nodes".to_string(), report.degree_histogram.iter().map(|&(d, c)| (d as f64, c as f64)).collect())];
        written.push(write(dir.join("degree_hist.svg"), line_chart_svg("Degree distribution", "degree", "nodes", &series))?);
    }
    if !report.timing.is_empty() {
        written.push(write(dir.join("timing.csv"), report.timing_csv())?);
    }
    Ok(written)
}
