//! CSV ingestion: comma-separated rows of decimal reals, optional header.

use std::path::Path;

use crate::dataset::{FeatureVector, LabeledDataset};
use crate::error::{Error, Result};

/// Which column holds the label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelColumn {
    /// The last column of every row.
    Last,
    /// Zero-based column index.
    Index(usize),
}

fn reader(path: &Path, has_header: bool) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .has_headers(has_header)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io {
                path: path.to_path_buf(),
                source: io,
            },
            other => Error::InvalidParameter(format!("{other:?}")),
        })
}

fn parse_cell(path: &Path, line: usize, col: usize, cell: &str) -> Result<f64> {
    let value: f64 = cell.parse().map_err(|_| Error::CsvParse {
        path: path.to_path_buf(),
        row: line,
        col: col + 1,
        message: format!("{cell:?} is not a real number"),
    })?;
    if !value.is_finite() {
        return Err(Error::CsvParse {
            path: path.to_path_buf(),
            row: line,
            col: col + 1,
            message: format!("{cell:?} is not finite"),
        });
    }
    Ok(value)
}

/// Loads a labeled dataset, preserving row order.
///
/// Every cell must parse as a finite real. Errors name the offending
/// 1-based file line and column.
pub fn load_csv(
    path: impl AsRef<Path>,
    label_column: LabelColumn,
    has_header: bool,
) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let offset = if has_header { 2 } else { 1 };
    for (i, record) in reader(path, has_header)?.records().enumerate() {
        let line = i + offset;
        let record = record.map_err(|e| Error::CsvParse {
            path: path.to_path_buf(),
            row: line,
            col: 0,
            message: e.to_string(),
        })?;
        let width = record.len();
        let label_idx = match label_column {
            LabelColumn::Last => width.saturating_sub(1),
            LabelColumn::Index(c) => c,
        };
        if label_idx >= width {
            return Err(Error::CsvParse {
                path: path.to_path_buf(),
                row: line,
                col: label_idx + 1,
                message: format!("label column {label_idx} out of range for {width} columns"),
            });
        }
        let mut features = Vec::with_capacity(width - 1);
        let mut label = 0.0;
        for (col, cell) in record.iter().enumerate() {
            let value = parse_cell(path, line, col, cell)?;
            if col == label_idx {
                label = value;
            } else {
                features.push(value);
            }
        }
        rows.push(features);
        labels.push(label);
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("csv file has no data rows"));
    }
    LabeledDataset::from_rows(rows, labels)
}

/// Loads unlabeled query vectors: every column is a feature.
pub fn load_query_csv(path: impl AsRef<Path>, has_header: bool) -> Result<Vec<FeatureVector>> {
    let path = path.as_ref();
    let mut queries = Vec::new();
    let offset = if has_header { 2 } else { 1 };
    for (i, record) in reader(path, has_header)?.records().enumerate() {
        let line = i + offset;
        let record = record.map_err(|e| Error::CsvParse {
            path: path.to_path_buf(),
            row: line,
            col: 0,
            message: e.to_string(),
        })?;
        let coords = record
            .iter()
            .enumerate()
            .map(|(col, cell)| parse_cell(path, line, col, cell))
            .collect::<Result<Vec<_>>>()?;
        queries.push(FeatureVector::new(coords)?);
    }
    if queries.is_empty() {
        return Err(Error::EmptyInput("query csv has no data rows"));
    }
    Ok(queries)
}
