//! Delimited-text dataset ingestion.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use rpens_core::{Label, LabeledDataset};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvOptions {
    /// Column holding the class label; negative values count from the end
    /// (`-1` is the last column). `None` reads features only.
    #[serde(default = "default_label_column")]
    pub label_column: Option<i64>,
    #[serde(default)]
    pub header: bool,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
    /// Raw label -> class map. Defaults to `{"0": 0, "1": 1}`.
    #[serde(default)]
    pub label_map: Option<BTreeMap<String, Label>>,
    /// Drop columns whose first data row is not numeric (e.g. row identifiers).
    #[serde(default)]
    pub drop_non_numeric: bool,
}

fn default_label_column() -> Option<i64> {
    Some(-1)
}

fn default_delimiter() -> char {
    ','
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            label_column: default_label_column(),
            header: false,
            delimiter: default_delimiter(),
            label_map: None,
            drop_non_numeric: false,
        }
    }
}

/// Parsed table: features in file order, optional labels, and the raw columns dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub features: Vec<f64>,
    pub p: usize,
    pub labels: Option<Vec<Label>>,
    pub dropped_columns: Vec<usize>,
    pub raw_columns: usize,
}

impl Table {
    pub fn rows(&self) -> usize {
        if self.p == 0 {
            0
        } else {
            self.features.len() / self.p
        }
    }

    pub fn into_dataset(self) -> Result<LabeledDataset> {
        let labels = self
            .labels
            .ok_or_else(|| HarnessError::Config("table was read without a label column".into()))?;
        Ok(LabeledDataset::new(self.features, self.p, labels)?)
    }
}

/// Canonical form of a raw label: integral numbers lose any fractional zeros.
fn normalise_label(raw: &str) -> String {
    let t = raw.trim();
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() && v.fract() == 0.0 && v.abs() < 1e15 => format!("{}", v as i64),
        _ => t.to_string(),
    }
}

fn identity_map() -> BTreeMap<String, Label> {
    BTreeMap::from([("0".to_string(), 0), ("1".to_string(), 1)])
}

pub fn read_table(path: &Path, options: &CsvOptions) -> Result<Table> {
    let bytes = std::fs::read(path).map_err(|e| HarnessError::io(path, e))?;
    parse_table(&bytes, options)
}

pub fn parse_table(bytes: &[u8], options: &CsvOptions) -> Result<Table> {
    if !options.delimiter.is_ascii() {
        return Err(HarnessError::Config(format!("delimiter {:?} is not ASCII", options.delimiter)));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(options.header)
        .delimiter(options.delimiter as u8)
        .flexible(true)
        .from_reader(bytes);
    let label_map = options.label_map.clone().unwrap_or_else(identity_map);
    let normalised_map: BTreeMap<String, Label> =
        label_map.iter().map(|(k, &v)| (normalise_label(k), v)).collect();

    let mut width: Option<usize> = None;
    let mut label_idx: Option<usize> = None;
    let mut keep: Vec<usize> = Vec::new();
    let mut dropped = Vec::new();
    let mut features = Vec::new();
    let mut labels = options.label_column.map(|_| Vec::new());

    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record.get(0).is_some_and(|s| s.trim().is_empty()) {
            continue;
        }
        let w = *width.get_or_insert(record.len());
        if record.len() != w {
            return Err(HarnessError::Parse {
                line,
                column: record.len().min(w),
                message: format!("row has {} fields, expected {w}", record.len()),
            });
        }
        if keep.is_empty() && dropped.is_empty() {
            label_idx = match options.label_column {
                None => None,
                Some(c) => {
                    let idx = if c < 0 { w as i64 + c } else { c };
                    if idx < 0 || idx >= w as i64 {
                        return Err(HarnessError::Config(format!(
                            "label column {c} out of range for {w} columns"
                        )));
                    }
                    Some(idx as usize)
                }
            };
            for (j, field) in record.iter().enumerate() {
                if Some(j) == label_idx {
                    continue;
                }
                if options.drop_non_numeric && field.trim().parse::<f64>().is_err() {
                    dropped.push(j);
                } else {
                    keep.push(j);
                }
            }
            if keep.is_empty() {
                return Err(HarnessError::Parse { line, column: 0, message: "no feature columns".into() });
            }
        }
        for &j in &keep {
            let field = record.get(j).unwrap_or("").trim();
            let value: f64 = field.parse().map_err(|_| HarnessError::Parse {
                line,
                column: j,
                message: format!("'{field}' is not a number"),
            })?;
            if !value.is_finite() {
                return Err(HarnessError::NonFinite { line, column: j });
            }
            features.push(value);
        }
        if let (Some(idx), Some(labels)) = (label_idx, labels.as_mut()) {
            let raw = record.get(idx).unwrap_or("");
            let label = normalised_map
                .get(&normalise_label(raw))
                .copied()
                .filter(|&l| l <= 1)
                .ok_or_else(|| HarnessError::Label { line, label: raw.trim().to_string() })?;
            labels.push(label);
        }
    }
    if features.is_empty() {
        return Err(HarnessError::Parse { line: 0, column: 0, message: "no data rows".into() });
    }
    Ok(Table { features, p: keep.len(), labels, dropped_columns: dropped, raw_columns: width.unwrap_or(0) })
}

/// Load a labelled dataset, keeping rows in file order.
pub fn load_csv(path: &Path, options: &CsvOptions) -> Result<LabeledDataset> {
    if options.label_column.is_none() {
        return Err(HarnessError::Config("load_csv needs a label column".into()));
    }
    read_table(path, options)?.into_dataset()
}
