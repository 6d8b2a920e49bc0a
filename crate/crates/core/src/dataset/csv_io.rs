use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::LabeledDataset;
use crate::error::{Error, Result};

/// Layout of a labelled CSV file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvOptions {
    pub label_column: usize,
    #[serde(default)]
    pub has_header: bool,
    #[serde(default)]
    pub label_encoding: LabelEncoding,
}

/// How label cells become class indices.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelEncoding {
    /// `0..c` in order of first appearance.
    #[default]
    FirstAppearance,
    /// Cells are already class indices (files written by [`write_csv`]).
    Integer,
}

/// Reads a comma-separated file. Labels are re-encoded to `0..c` in order
/// of first appearance; all other columns must parse as reals.
pub fn load_csv(path: impl AsRef<Path>, label_column: usize, has_header: bool) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".into());
    read_csv(
        file,
        &CsvOptions {
            label_column,
            has_header,
            label_encoding: LabelEncoding::FirstAppearance,
        },
    ).map(|ds| ds.with_name(name))
}

pub fn read_csv<R: Read>(reader: R, opts: &CsvOptions) -> Result<LabeledDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels = Vec::new();
    let mut label_names: Vec<String> = Vec::new();
    let mut width = None;
    let mut max_label = 0;

    for (idx, record) in rdr.records().enumerate() {
        // 1-based line numbers as a user would count them
        let row = idx + 1;
        let record = record.map_err(|e| Error::Ingestion {
            row,
            column: 0,
            message: e.to_string(),
        })?;
        if idx == 0 && opts.has_header {
            width = Some(record.len());
            continue;
        }
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::Ingestion {
                row,
                column: record.len().min(expected) + 1,
                message: format!("expected {expected} fields, found {}", record.len()),
            });
        }
        if opts.label_column >= expected {
            return Err(Error::Ingestion {
                row,
                column: opts.label_column + 1,
                message: format!("label column {} out of range for {expected} fields", opts.label_column),
            });
        }
        if expected < 2 {
            return Err(Error::Ingestion {
                row,
                column: 1,
                message: "need at least one feature column besides the label".into(),
            });
        }
        let mut features = Vec::with_capacity(expected - 1);
        for (col, cell) in record.iter().enumerate() {
            if col == opts.label_column && opts.label_encoding == LabelEncoding::Integer {
                let label: usize = cell.parse().map_err(|_| Error::Ingestion {
                    row,
                    column: col + 1,
                    message: format!("cannot parse {cell:?} as a class index"),
                })?;
                max_label = max_label.max(label + 1);
                labels.push(label);
            } else if col == opts.label_column {
                let label = match label_names.iter().position(|l| l == cell) {
                    Some(p) => p,
                    None => {
                        if cell.is_empty() {
                            return Err(Error::Ingestion {
                                row,
                                column: col + 1,
                                message: "empty label".into(),
                            });
                        }
                        label_names.push(cell.to_string());
                        label_names.len() - 1
                    }
                };
                labels.push(label);
            } else {
                let v: f64 = cell.parse().map_err(|_| Error::Ingestion {
                    row,
                    column: col + 1,
                    message: format!("cannot parse {cell:?} as a number"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Ingestion {
                        row,
                        column: col + 1,
                        message: format!("non-finite value {cell:?}"),
                    });
                }
                features.push(v);
            }
        }
        rows.push(features);
    }

    if rows.is_empty() {
        return Err(Error::EmptyInput("no data rows".into()));
    }
    let d = rows[0].len();
    let features = DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]);
    let class_count = match opts.label_encoding {
        LabelEncoding::FirstAppearance => label_names.len(),
        LabelEncoding::Integer => max_label,
    };
    LabeledDataset::new("csv", features, labels, class_count)
}

/// Writes features followed by a trailing `label` column, with a header row.
pub fn write_csv<W: Write>(ds: &LabeledDataset, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (0..ds.dim()).map(|j| format!("x{j}")).collect();
    header.push("label".into());
    let to_io = |e: csv::Error| Error::io("<csv>", std::io::Error::other(e));
    wtr.write_record(&header).map_err(to_io)?;
    for i in 0..ds.len() {
        let mut rec: Vec<String> = ds.features().row(i).iter().map(|v| format!("{v}")).collect();
        rec.push(ds.labels()[i].to_string());
        wtr.write_record(&rec).map_err(to_io)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv>", e))
}
