//! CSV ingestion: a header naming `d` feature columns and a label column,
//! then rows of finite decimal numbers.

use std::path::Path;

use irp_core::{Example, Task};

use crate::error::{CliError, CliResult};

/// Parsed rows. `labels` is empty for a test file without a label column.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvDataset {
    pub header: Vec<String>,
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<f64>,
}

impl CsvDataset {
    pub fn dim(&self) -> usize {
        self.features.first().map_or(self.header.len(), Vec::len)
    }

    pub fn examples(&self, task: Task) -> CliResult<Vec<Example>> {
        self.features
            .iter()
            .zip(&self.labels)
            .map(|(x, &y)| Example::new(task, x.clone(), y).map_err(CliError::from))
            .collect()
    }
}

fn diag(path: &Path, line: u64, msg: impl std::fmt::Display) -> CliError {
    CliError::usage(format!("{}: line {line}: {msg}", path.display()))
}

fn parse_rows(
    path: &Path,
    text: &str,
    widths: &[usize],
) -> CliResult<(Vec<String>, Vec<Vec<f64>>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| diag(path, 1, e))?
        .iter()
        .map(str::to_owned)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(diag(path, 1, "missing header row"));
    }
    if !widths.contains(&header.len()) {
        let want: Vec<String> = widths.iter().map(usize::to_string).collect();
        return Err(diag(
            path,
            1,
            format!(
                "header has {} columns, expected {}",
                header.len(),
                want.join(" or ")
            ),
        ));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            diag(path, line, e)
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(diag(
                path,
                line,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        let mut row = Vec::with_capacity(record.len());
        for (col, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                diag(
                    path,
                    line,
                    format!(
                        "column {} ({}): cannot parse {field:?}",
                        col + 1,
                        header[col]
                    ),
                )
            })?;
            if !v.is_finite() {
                return Err(diag(
                    path,
                    line,
                    format!(
                        "column {} ({}): non-finite value {field:?}",
                        col + 1,
                        header[col]
                    ),
                ));
            }
            row.push(v);
        }
        rows.push(row);
    }
    Ok((header, rows))
}

fn check_label(path: &Path, task: Task, line: u64, col: usize, y: f64) -> CliResult<()> {
    if task == Task::Classification && y != 1.0 && y != -1.0 {
        return Err(diag(
            path,
            line,
            format!("column {col}: classification label {y} is not -1 or 1"),
        ));
    }
    Ok(())
}

fn split_labels(
    path: &Path,
    task: Task,
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
    labelled: bool,
) -> CliResult<CsvDataset> {
    let mut features = Vec::with_capacity(rows.len());
    let mut labels = Vec::new();
    let width = header.len();
    for (i, mut row) in rows.into_iter().enumerate() {
        if labelled {
            let y = row.pop().expect("rows are non-empty");
            // line 1 is the header
            check_label(path, task, i as u64 + 2, width, y)?;
            labels.push(y);
        }
        features.push(row);
    }
    Ok(CsvDataset {
        header,
        features,
        labels,
    })
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

/// Training file: `d` feature columns then the label.
pub fn load_training(path: &Path, task: Task) -> CliResult<CsvDataset> {
    let text = read(path)?;
    let (header, rows) = parse_rows_any(path, &text)?;
    if header.len() < 2 {
        return Err(diag(
            path,
            1,
            "need at least one feature column and a label column",
        ));
    }
    split_labels(path, task, header, rows, true)
}

fn parse_rows_any(path: &Path, text: &str) -> CliResult<(Vec<String>, Vec<Vec<f64>>)> {
    let width = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
        .headers()
        .map_err(|e| diag(path, 1, e))?
        .len();
    parse_rows(path, text, &[width])
}

/// Test file: the `d` training feature columns, optionally followed by the
/// label.
pub fn load_test(path: &Path, task: Task, dim: usize) -> CliResult<CsvDataset> {
    let text = read(path)?;
    let (header, rows) = parse_rows(path, &text, &[dim, dim + 1])?;
    let labelled = header.len() == dim + 1;
    split_labels(path, task, header, rows, labelled)
}
