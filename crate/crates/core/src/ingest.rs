//! CSV ingestion for real-world datasets: complete-case filtering, one-hot
//! encoding of categorical columns and a binary target.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2, ShapeBuilder};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Dataset;

/// A column given by header name or 0-based position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColumnRef {
    Index(usize),
    Name(String),
}

impl ColumnRef {
    /// Digits are read as a position, anything else as a name.
    pub fn parse(s: &str) -> Self {
        match s.parse::<usize>() {
            Ok(i) => ColumnRef::Index(i),
            Err(_) => ColumnRef::Name(s.to_string()),
        }
    }

    fn resolve(&self, headers: &[String]) -> Option<usize> {
        match self {
            ColumnRef::Index(i) => (*i < headers.len()).then_some(*i),
            ColumnRef::Name(n) => headers.iter().position(|h| h == n),
        }
    }
}

impl fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnRef::Index(i) => write!(f, "#{i}"),
            ColumnRef::Name(n) => write!(f, "{n:?}"),
        }
    }
}

fn default_delimiter() -> char {
    ','
}

fn default_true() -> bool {
    true
}

/// How to read one CSV file. Also loadable from a JSON sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestSpec {
    pub path: PathBuf,
    pub target: ColumnRef,
    /// Target value mapped to 1; every other value maps to 0.
    pub positive_label: String,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
    #[serde(default = "default_true")]
    pub has_header: bool,
    /// `None` treats any column with a non-numeric cell as categorical.
    #[serde(default)]
    pub categorical_columns: Option<Vec<ColumnRef>>,
}

impl IngestSpec {
    pub fn new(path: impl Into<PathBuf>, target: ColumnRef, positive_label: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            target,
            positive_label: positive_label.into(),
            delimiter: ',',
            has_header: true,
            categorical_columns: None,
        }
    }

    /// Reads a JSON sidecar; a relative `path` is taken relative to the sidecar.
    pub fn from_json_file(sidecar: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(sidecar)?;
        let mut spec: IngestSpec = serde_json::from_str(&text)?;
        if spec.path.is_relative() {
            if let Some(dir) = sidecar.parent() {
                spec.path = dir.join(&spec.path);
            }
        }
        Ok(spec)
    }

    fn delimiter_byte(&self) -> Result<u8> {
        if self.delimiter.is_ascii() {
            Ok(self.delimiter as u8)
        } else {
            Err(Error::Spec(format!("delimiter {:?} is not a single ASCII character", self.delimiter)))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RejectedRow {
    /// 1-based data row, not counting the header.
    pub row: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoricalEncoding {
    pub column: String,
    /// All levels in lexicographic order; the first is the dropped reference.
    pub levels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IngestReport {
    pub rows_read: usize,
    pub rows_kept: usize,
    pub rejected: Vec<RejectedRow>,
    pub categorical: Vec<CategoricalEncoding>,
    /// Encoded columns with zero variance; fitters hold them at zero.
    pub zero_variance: Vec<String>,
    /// Column count after encoding.
    pub p: usize,
    pub positives: usize,
}

const MISSING: [&str; 4] = ["", "na", "?", "nan"];

fn is_missing(cell: &str) -> bool {
    let c = cell.trim().to_ascii_lowercase();
    MISSING.contains(&c.as_str())
}

fn parse_number(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Loads a CSV as a [`Dataset`], rejecting incomplete rows.
pub fn load_csv(spec: &IngestSpec) -> Result<(Dataset<f64>, IngestReport)> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(spec.delimiter_byte()?)
        .has_headers(spec.has_header)
        .flexible(true)
        .from_path(&spec.path)?;

    let mut records = Vec::new();
    for rec in reader.records() {
        records.push(rec?);
    }
    let width = if spec.has_header {
        reader.headers()?.len()
    } else {
        records.first().map_or(0, |r| r.len())
    };
    let headers: Vec<String> = if spec.has_header {
        reader.headers()?.iter().map(|h| h.trim().to_string()).collect()
    } else {
        (1..=width).map(|j| format!("V{j}")).collect()
    };

    let target = spec
        .target
        .resolve(&headers)
        .ok_or_else(|| Error::Spec(format!("target column {} not found", spec.target)))?;
    let declared: Option<HashSet<usize>> = match &spec.categorical_columns {
        None => None,
        Some(cols) => Some(
            cols.iter()
                .map(|c| {
                    c.resolve(&headers)
                        .ok_or_else(|| Error::Spec(format!("categorical column {c} not found")))
                })
                .collect::<Result<_>>()?,
        ),
    };
    if declared.as_ref().is_some_and(|d| d.contains(&target)) {
        return Err(Error::Spec("target column cannot be categorical".into()));
    }

    // complete-case filter
    let mut kept: Vec<Vec<String>> = Vec::new();
    let mut rejected = Vec::new();
    for (i, rec) in records.iter().enumerate() {
        let row = i + 1;
        if rec.len() != width {
            rejected.push(RejectedRow {
                row,
                reason: format!("expected {width} fields, found {}", rec.len()),
            });
            continue;
        }
        let cells: Vec<String> = rec.iter().map(|c| c.trim().to_string()).collect();
        let missing: Vec<&str> = (0..width)
            .filter(|&j| is_missing(&cells[j]))
            .map(|j| headers[j].as_str())
            .collect();
        if !missing.is_empty() {
            rejected.push(RejectedRow {
                row,
                reason: format!("missing value in {}", missing.join(", ")),
            });
            continue;
        }
        if let Some(decl) = &declared {
            let bad: Vec<&str> = (0..width)
                .filter(|&j| j != target && !decl.contains(&j) && parse_number(&cells[j]).is_none())
                .map(|j| headers[j].as_str())
                .collect();
            if !bad.is_empty() {
                rejected.push(RejectedRow {
                    row,
                    reason: format!("non-numeric value in {}", bad.join(", ")),
                });
                continue;
            }
        }
        kept.push(cells);
    }
    if kept.is_empty() {
        return Err(Error::Ingest(format!(
            "no complete rows remain ({} read, {} rejected)",
            records.len(),
            rejected.len()
        )));
    }

    let labels: BTreeSet<&str> = kept.iter().map(|r| r[target].as_str()).collect();
    if labels.len() > 2 {
        let listed: Vec<String> = labels.iter().map(|l| format!("{l:?}")).collect();
        return Err(Error::Ingest(format!(
            "target is not binary; observed labels {}",
            listed.join(", ")
        )));
    }
    if !labels.contains(spec.positive_label.as_str()) {
        return Err(Error::Spec(format!(
            "positive label {:?} does not occur in the target",
            spec.positive_label
        )));
    }

    let categorical = |j: usize| match &declared {
        Some(d) => d.contains(&j),
        None => kept.iter().any(|r| parse_number(&r[j]).is_none()),
    };

    let n = kept.len();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut names = Vec::new();
    let mut encodings = Vec::new();
    for j in (0..width).filter(|&j| j != target) {
        if categorical(j) {
            let levels: BTreeSet<&str> = kept.iter().map(|r| r[j].as_str()).collect();
            let levels: Vec<String> = levels.into_iter().map(str::to_string).collect();
            for level in levels.iter().skip(1) {
                columns.push(kept.iter().map(|r| if r[j] == *level { 1.0 } else { 0.0 }).collect());
                names.push(format!("{}={}", headers[j], level));
            }
            encodings.push(CategoricalEncoding {
                column: headers[j].clone(),
                levels,
            });
        } else {
            columns.push(kept.iter().map(|r| parse_number(&r[j]).expect("checked numeric")).collect());
            names.push(headers[j].clone());
        }
    }

    let p = columns.len();
    let mut x = Array2::<f64>::zeros((n, p).f());
    for (j, col) in columns.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            x[[i, j]] = v;
        }
    }
    let y: Array1<f64> = kept
        .iter()
        .map(|r| if r[target] == spec.positive_label { 1.0 } else { 0.0 })
        .collect();
    let zero_variance = columns
        .iter()
        .zip(&names)
        .filter(|(c, _)| c.iter().all(|&v| v == c[0]))
        .map(|(_, name)| name.clone())
        .collect();
    let positives = y.iter().filter(|&&v| v == 1.0).count();
    let data = Dataset::new(x, y, Some(names))?;
    let report = IngestReport {
        rows_read: records.len(),
        rows_kept: n,
        rejected,
        categorical: encodings,
        zero_variance,
        p,
        positives,
    };
    Ok((data, report))
}

/// Writes a dataset as CSV with a header and the outcome (`1`/`0`) last.
/// Values use shortest round-trip formatting, so [`load_csv`] with
/// `positive_label = "1"` reproduces the dataset exactly.
pub fn write_csv(data: &Dataset<f64>, path: &Path, target_name: &str) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = (0..data.p()).map(|j| data.feature_name(j)).collect();
    header.push(target_name.to_string());
    w.write_record(&header)?;
    for i in 0..data.n() {
        let mut rec: Vec<String> = data.row(i).iter().map(|v| v.to_string()).collect();
        rec.push(if data.label(i) { "1" } else { "0" }.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
