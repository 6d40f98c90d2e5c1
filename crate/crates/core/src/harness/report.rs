use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distribution::AlphaSolution;
use crate::error::{Error, Result};

/// Metrics a benchmark can report. Declaration order is the column order of
/// the rendered tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Metric {
    Fid,
    HiFid,
    Cf,
    DeltaCf,
    ClipScore,
    Psnr,
    Ssim,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::Fid,
        Metric::HiFid,
        Metric::Cf,
        Metric::DeltaCf,
        Metric::ClipScore,
        Metric::Psnr,
        Metric::Ssim,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Metric::Fid => "FID",
            Metric::HiFid => "HI-FID",
            Metric::Cf => "CF",
            Metric::DeltaCf => "ΔCF",
            Metric::ClipScore => "CLIP Score",
            Metric::Psnr => "PSNR",
            Metric::Ssim => "SSIM",
        }
    }

    pub fn is_paired(self) -> bool {
        matches!(self, Metric::Psnr | Metric::Ssim)
    }

    fn decimals(self) -> usize {
        match self {
            Metric::Ssim => 4,
            _ => 2,
        }
    }

    pub fn format(self, v: f64) -> String {
        if v == f64::INFINITY {
            "inf".to_owned()
        } else {
            format!("{v:.*}", self.decimals())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Value(f64),
    Error(String),
}

impl Cell {
    pub fn value(&self) -> Option<f64> {
        match self {
            Cell::Value(v) => Some(*v),
            Cell::Error(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Markdown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodRow {
    pub method: String,
    pub cells: BTreeMap<Metric, Cell>,
    pub alpha: Option<AlphaSolution>,
}

impl MethodRow {
    pub fn get(&self, metric: Metric) -> Option<&Cell> {
        self.cells.get(&metric)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub dataset_name: String,
    /// Ground-truth images ingested.
    pub n_images: usize,
    pub luminance_replace: bool,
    /// Requested metrics in column order.
    pub metrics: Vec<Metric>,
    pub gt_mean_cf: Option<f64>,
    pub rows: Vec<MethodRow>,
}

impl MetricReport {
    pub fn row(&self, method: &str) -> Option<&MethodRow> {
        self.rows.iter().find(|r| r.method == method)
    }

    fn has_alpha(&self) -> bool {
        self.metrics.contains(&Metric::HiFid)
    }

    fn cell_text(row: &MethodRow, metric: Metric) -> String {
        match row.cells.get(&metric) {
            Some(Cell::Value(v)) => metric.format(*v),
            Some(Cell::Error(e)) => format!("error: {e}"),
            None => "error: not computed".to_owned(),
        }
    }

    fn alpha_text(row: &MethodRow) -> [String; 3] {
        match &row.alpha {
            Some(a) => [
                format!("{:.4}", a.alpha_star),
                format!("{:.4}", a.residual),
                format!("{:.4}", a.clipped_fraction),
            ],
            None => Default::default(),
        }
    }

    /// RFC 4180 CSV, one row per method.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["method".to_owned()];
        header.extend(self.metrics.iter().map(|m| m.label().to_owned()));
        if self.has_alpha() {
            header.extend(["alpha_star", "alpha_residual", "alpha_clipped_fraction"].map(String::from));
        }
        header.extend(["n_images", "luminance_replace"].map(String::from));
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec = vec![row.method.clone()];
            rec.extend(self.metrics.iter().map(|&m| Self::cell_text(row, m)));
            if self.has_alpha() {
                rec.extend(Self::alpha_text(row));
            }
            rec.push(self.n_images.to_string());
            rec.push(self.luminance_replace.to_string());
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_markdown(&self) -> String {
        let escape = |s: &str| s.replace('|', "\\|");
        let mut out = String::new();
        let _ = writeln!(out, "# {}\n", escape(&self.dataset_name));
        let _ = writeln!(out, "- images: {}", self.n_images);
        let mode = if self.luminance_replace { "on" } else { "off" };
        let _ = writeln!(out, "- luminance replacement: {mode}");
        if let Some(cf) = self.gt_mean_cf {
            let _ = writeln!(out, "- ground-truth CF: {cf:.2}");
        }
        out.push('\n');

        let _ = write!(out, "| Method |");
        for m in &self.metrics {
            let _ = write!(out, " {} |", m.label());
        }
        out.push_str("\n|---|");
        out.push_str(&"---:|".repeat(self.metrics.len()));
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "| {} |", escape(&row.method));
            for &m in &self.metrics {
                let _ = write!(out, " {} |", escape(&Self::cell_text(row, m)));
            }
            out.push('\n');
        }

        if self.has_alpha() {
            out.push_str("\n| Method | α* | residual | clipped fraction | iterations |\n");
            out.push_str("|---|---:|---:|---:|---:|\n");
            for row in &self.rows {
                if let Some(a) = &row.alpha {
                    let [star, res, clip] = Self::alpha_text(row);
                    let _ = writeln!(
                        out,
                        "| {} | {star} | {res} | {clip} | {} |",
                        escape(&row.method),
                        a.iterations
                    );
                }
            }
        }
        out
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Markdown => Ok(self.to_markdown()),
        }
    }

    pub fn write(&self, path: &Path, format: ReportFormat) -> Result<()> {
        let text = self.render(format)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}
