//! CSV dataset I/O: header-row datasets with a named response column,
//! bit-exact float round-trips, and bare point sets for diagnostics.

use crate::CliError;
use screenlab::core::DesignMatrix;
use std::io::Write;
use std::path::Path;

/// A parsed dataset: predictors in file order plus the response column.
pub struct Dataset {
    /// Predictor column names, in file order.
    pub columns: Vec<String>,
    /// Predictor rows, aligned with `columns`.
    pub rows: Vec<Vec<f64>>,
    pub response: Vec<f64>,
}

/// 17 significant digits — enough to reproduce any f64 exactly on re-read.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_cell(cell: &str, line: u64, column: &str) -> Result<f64, CliError> {
    cell.trim().parse::<f64>().map_err(|_| {
        CliError::Input(format!(
            "line {line}: column '{column}': cannot parse '{cell}' as a number"
        ))
    })
}

/// Reads a dataset with a header row and one response column. With `clip`,
/// predictor values exactly equal to 1.0 are pulled down to 1 − 2⁻⁵² so that
/// boundary points from closed-interval sources stay inside [0,1).
pub fn read_dataset(path: &Path, response: &str, clip: bool) -> Result<Dataset, CliError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let names: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    let y_col = names.iter().position(|h| h == response).ok_or_else(|| {
        CliError::Input(format!(
            "response column '{response}' not found in {} (columns: {})",
            path.display(),
            names.join(", ")
        ))
    })?;
    if names.len() < 2 {
        return Err(CliError::Input(format!(
            "{}: need at least one predictor column besides '{response}'",
            path.display()
        )));
    }

    let mut rows = Vec::new();
    let mut y = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        let mut row = Vec::with_capacity(names.len() - 1);
        for (j, cell) in record.iter().enumerate() {
            let v = parse_cell(cell, line, &names[j])?;
            if j == y_col {
                y.push(v);
            } else {
                row.push(if clip && v == 1.0 { 1.0 - f64::EPSILON } else { v });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Input(format!("{}: no data rows", path.display())));
    }

    let columns = names
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != y_col)
        .map(|(_, name)| name.clone())
        .collect();
    Ok(Dataset {
        columns,
        rows,
        response: y,
    })
}

/// Reads a point set: header row, every column a coordinate.
pub fn read_points(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let names: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut points = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        let mut pt = Vec::with_capacity(names.len());
        for (j, cell) in record.iter().enumerate() {
            pt.push(parse_cell(cell, line, &names[j])?);
        }
        points.push(pt);
    }
    Ok(points)
}

/// Writes `x1..xp,y` with RFC-4180 quoting and 17-significant-digit floats.
pub fn write_dataset<W: Write>(out: W, design: &DesignMatrix, y: &[f64]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let p = design.p();
    let mut header: Vec<String> = (1..=p).map(|j| format!("x{j}")).collect();
    header.push("y".into());
    w.write_record(&header)?;
    for i in 0..design.n() {
        let mut rec: Vec<String> = design.row(i).iter().map(|&v| fmt17(v)).collect();
        rec.push(fmt17(y[i]));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
