//! Dataset ingestion from delimited files and plot-ready series output.
//!
//! Two input schemas are supported, both requiring a header row:
//!
//! * `EU`: columns `E` (error) and `u` (uncertainty);
//! * `RVU`: columns `R` (reference), `V` (prediction) and `uV` (prediction
//!   uncertainty), transformed to `E = R - V`, `u = uV` on load.
//!
//! Column names are matched case-insensitively and extra columns are
//! ignored. Numbers are written back with the shortest representation that
//! round-trips to the same binary value.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{from_raw, Dataset, RawRecord};
use crate::error::{Error, Result};
use crate::metrics::ReliabilityPoint;
use crate::scan::ScanSeries;
use crate::sim::RealizationPoint;

/// Input column layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schema {
    /// Error/uncertainty pairs.
    Eu,
    /// Reference, prediction, prediction uncertainty.
    Rvu,
}

/// Where and how to read a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct InputSpec {
    pub path: PathBuf,
    pub schema: Schema,
    pub delimiter: u8,
    /// With a header (the default) columns are located by name; without
    /// one they are positional: `E,u` or `R,V,uV` in schema order.
    pub has_header: bool,
}

impl InputSpec {
    pub fn new(path: impl Into<PathBuf>, schema: Schema) -> Self {
        Self {
            path: path.into(),
            schema,
            delimiter: b',',
            has_header: true,
        }
    }

    pub fn with_delimiter(mut self, delimiter: u8) -> Self {
        self.delimiter = delimiter;
        self
    }

    pub fn without_header(mut self) -> Self {
        self.has_header = false;
        self
    }
}

fn find_column(headers: &csv::StringRecord, name: &str, path: &Path) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim().eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::Input {
            path: path.to_path_buf(),
            reason: format!("missing required column '{name}'"),
        })
}

fn parse_field(
    record: &csv::StringRecord,
    index: usize,
    column: &str,
    row: usize,
    path: &Path,
) -> Result<f64> {
    let field = record.get(index).ok_or_else(|| Error::InputRow {
        path: path.to_path_buf(),
        row,
        reason: format!("missing {column} field (column {})", index + 1),
    })?;
    field.trim().parse::<f64>().map_err(|_| Error::InputRow {
        path: path.to_path_buf(),
        row,
        reason: format!("cannot parse {column} value '{field}' as a number"),
    })
}

/// Read a dataset from a delimited file according to the input spec.
///
/// Row numbers in errors are 1-based over data rows (the header does not
/// count).
pub fn load_csv(spec: &InputSpec) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(spec.delimiter)
        .has_headers(spec.has_header)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_path(&spec.path)
        .map_err(|e| Error::Input {
            path: spec.path.clone(),
            reason: e.to_string(),
        })?;
    let headers = if spec.has_header {
        Some(
            reader
                .headers()
                .map_err(|e| Error::Input {
                    path: spec.path.clone(),
                    reason: e.to_string(),
                })?
                .clone(),
        )
    } else {
        None
    };
    let column = |name: &str, position: usize| -> Result<usize> {
        match &headers {
            Some(h) => find_column(h, name, &spec.path),
            None => Ok(position),
        }
    };

    match spec.schema {
        Schema::Eu => {
            let col_e = column("e", 0)?;
            let col_u = column("u", 1)?;
            let mut errors = Vec::new();
            let mut uncertainties = Vec::new();
            for (i, record) in reader.records().enumerate() {
                let row = i + 1;
                let record = record.map_err(|e| Error::InputRow {
                    path: spec.path.clone(),
                    row,
                    reason: e.to_string(),
                })?;
                let e = parse_field(&record, col_e, "E", row, &spec.path)?;
                let u = parse_field(&record, col_u, "u", row, &spec.path)?;
                if !u.is_finite() || u <= 0.0 {
                    return Err(Error::InputRow {
                        path: spec.path.clone(),
                        row,
                        reason: format!("uncertainty must be a positive finite number, got {u}"),
                    });
                }
                if !e.is_finite() {
                    return Err(Error::InputRow {
                        path: spec.path.clone(),
                        row,
                        reason: "error value is not finite".into(),
                    });
                }
                errors.push(e);
                uncertainties.push(u);
            }
            if errors.is_empty() {
                return Err(Error::EmptyInput(spec.path.clone()));
            }
            Dataset::new(errors, uncertainties)
        }
        Schema::Rvu => {
            let col_r = column("r", 0)?;
            let col_v = column("v", 1)?;
            let col_uv = column("uv", 2)?;
            let mut records = Vec::new();
            for (i, record) in reader.records().enumerate() {
                let row = i + 1;
                let record = record.map_err(|e| Error::InputRow {
                    path: spec.path.clone(),
                    row,
                    reason: e.to_string(),
                })?;
                records.push(RawRecord {
                    reference: parse_field(&record, col_r, "R", row, &spec.path)?,
                    prediction: parse_field(&record, col_v, "V", row, &spec.path)?,
                    uncertainty: parse_field(&record, col_uv, "uV", row, &spec.path)?,
                });
            }
            if records.is_empty() {
                return Err(Error::EmptyInput(spec.path.clone()));
            }
            // from_raw reports the 1-based record index, which coincides
            // with the data row number here.
            from_raw(&records).map_err(|e| match e {
                Error::Record { row, reason } => Error::InputRow {
                    path: spec.path.clone(),
                    row,
                    reason,
                },
                other => other,
            })
        }
    }
}

/// Write a scan series as `n,sqrt_n,value` rows.
pub fn write_scan_csv<W: Write>(w: &mut W, series: &ScanSeries) -> std::io::Result<()> {
    writeln!(w, "n,sqrt_n,{}", series.metric.label())?;
    for p in &series.points {
        writeln!(w, "{},{},{}", p.n, p.sqrt_n, p.value)?;
    }
    Ok(())
}

/// Write reliability-diagram points as `bin,size,rmv,rmse` rows.
pub fn write_diagram_csv<W: Write>(w: &mut W, points: &[ReliabilityPoint]) -> std::io::Result<()> {
    writeln!(w, "bin,size,rmv,rmse")?;
    for p in points {
        writeln!(w, "{},{},{},{}", p.bin, p.size, p.rmv, p.rmse)?;
    }
    Ok(())
}

/// Write an expected-value curve as `factor,n,sqrt_n,value` rows.
pub fn write_expected_csv<W: Write>(
    w: &mut W,
    rows: &[(f64, usize, f64)],
) -> std::io::Result<()> {
    writeln!(w, "factor,n,sqrt_n,value")?;
    for &(factor, n, value) in rows {
        writeln!(w, "{},{},{},{}", factor, n, (n as f64).sqrt(), value)?;
    }
    Ok(())
}

/// Write Monte Carlo realization points as `realization,n,sqrt_n,ence`.
pub fn write_realizations_csv<W: Write>(
    w: &mut W,
    points: &[RealizationPoint],
) -> std::io::Result<()> {
    writeln!(w, "realization,n,sqrt_n,ence")?;
    for p in points {
        writeln!(
            w,
            "{},{},{},{}",
            p.realization,
            p.n,
            (p.n as f64).sqrt(),
            p.ence
        )?;
    }
    Ok(())
}
