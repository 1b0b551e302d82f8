//! Experiment reports and their JSON/CSV forms.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use rpens_core::RngSeed;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

pub const CSV_COLUMNS: [&str; 5] = ["repetition", "method", "error", "intractable", "seconds"];
pub const SWEEP_COLUMNS: [&str; 3] = ["B1", "mean_error", "sd_error"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub repetition: usize,
    pub method: String,
    /// Test error, or `None` when the fit was intractable.
    pub error: Option<f64>,
    pub intractable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
    pub seed: RngSeed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub tractable: usize,
    pub intractable: usize,
    pub mean_error: Option<f64>,
    pub sd_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    /// Observations available in the data source (`None` for generated data).
    pub available: Option<usize>,
    pub feature_count: usize,
    pub test_seed: RngSeed,
    #[serde(default)]
    pub notes: Vec<String>,
    pub rows: Vec<ReportRow>,
    pub summaries: Vec<MethodSummary>,
}

/// Mean and sample standard deviation; `sd` is `None` below two values.
pub fn mean_sd(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (Some(mean), None);
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (Some(mean), Some((ss / (n - 1.0)).sqrt()))
}

/// Summaries in roster order.
pub fn summarise(methods: &[String], rows: &[ReportRow]) -> Vec<MethodSummary> {
    methods
        .iter()
        .map(|m| {
            let errors: Vec<f64> = rows.iter().filter(|r| &r.method == m).filter_map(|r| r.error).collect();
            let intractable = rows.iter().filter(|r| &r.method == m && r.intractable).count();
            let (mean_error, sd_error) = mean_sd(&errors);
            MethodSummary { method: m.clone(), tractable: errors.len(), intractable, mean_error, sd_error }
        })
        .collect()
}

impl ExperimentReport {
    pub fn summary(&self, method: &str) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_COLUMNS)?;
        for r in &self.rows {
            w.write_record([
                r.repetition.to_string(),
                r.method.clone(),
                r.error.map(|e| e.to_string()).unwrap_or_default(),
                r.intractable.to_string(),
                r.seconds.map(|s| s.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush().map_err(|e| HarnessError::io("<csv>", e))?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    Json,
    #[default]
    Csv,
}

impl FromStr for ReportFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(HarnessError::Config(format!("unknown format '{other}' (json or csv)"))),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        })
    }
}

pub fn render_report(report: &ExperimentReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => report.to_json(),
        ReportFormat::Csv => report.to_csv(),
    }
}

pub fn emit_report(report: &ExperimentReport, format: ReportFormat, path: &Path) -> Result<()> {
    let text = render_report(report, format)?;
    std::fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub b1: usize,
    pub mean_error: f64,
    pub sd_error: f64,
    pub errors: Vec<f64>,
}

pub fn sweep_csv(points: &[SweepPoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_COLUMNS)?;
    for p in points {
        w.write_record([p.b1.to_string(), p.mean_error.to_string(), p.sd_error.to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::io("<csv>", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}
