//! CSV input: one observation per row, taken from a single column.

use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use npcpt_core::TimeSeries;

use crate::error::{CliError, Result};

/// Which column holds the observations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSpec {
    Name(String),
    /// Zero-based.
    Index(usize),
    Last,
}

impl FromStr for ColumnSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(CliError::Usage("empty column name".into()));
        }
        Ok(match s.parse::<usize>() {
            Ok(i) => ColumnSpec::Index(i),
            Err(_) => ColumnSpec::Name(s.to_string()),
        })
    }
}

/// Whether the first row is a header.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum HeaderMode {
    Yes,
    No,
    /// A header is assumed when some cell of the first row is not a number.
    Auto,
}

fn parse_value(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Reads one column of a CSV file. Row numbers in errors count every line of
/// the file from 1, header included.
pub fn ingest_csv(path: &Path, column: &ColumnSpec, header: HeaderMode) -> Result<TimeSeries> {
    let file = File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(file);
    let rows = reader.records().enumerate();

    let mut values = Vec::new();
    let mut index: Option<usize> = None;
    let mut first = true;
    for (i, rec) in rows {
        let row = i + 1;
        let rec = rec.map_err(|e| CliError::Data(format!("row {row}: {e}")))?;
        if rec.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        if first {
            first = false;
            let is_header = match header {
                HeaderMode::Yes => true,
                HeaderMode::No => false,
                HeaderMode::Auto => rec.iter().any(|c| c.trim().parse::<f64>().is_err()),
            };
            if is_header {
                index = Some(match column {
                    ColumnSpec::Name(name) => rec.iter().position(|c| c.trim() == name).ok_or_else(|| {
                        let have: Vec<&str> = rec.iter().map(str::trim).collect();
                        CliError::Data(format!("no column '{name}' in header [{}]", have.join(", ")))
                    })?,
                    ColumnSpec::Index(k) => *k,
                    ColumnSpec::Last => rec.len() - 1,
                });
                continue;
            }
            if let ColumnSpec::Name(name) = column {
                return Err(CliError::Data(format!("column '{name}' requested but the file has no header")));
            }
        }
        let k = *index.get_or_insert(match column {
            ColumnSpec::Index(k) => *k,
            _ => rec.len() - 1,
        });
        let cell = rec
            .get(k)
            .ok_or_else(|| CliError::Data(format!("row {row}: no column {k} (row has {} cells)", rec.len())))?;
        let v = parse_value(cell)
            .ok_or_else(|| CliError::Data(format!("row {row}: '{}' is not a finite number", cell.trim())))?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(CliError::Data("empty series".into()));
    }
    Ok(TimeSeries::new(values)?)
}

/// Writes a single-column CSV with every value at 17 significant digits.
pub fn write_series_csv(path: &Path, name: &str, values: &[f64]) -> Result<()> {
    let mut f = File::create(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mut out = format!("{name}\n");
    for v in values {
        out.push_str(&format!("{v:.16e}\n"));
    }
    f.write_all(out.as_bytes()).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}
