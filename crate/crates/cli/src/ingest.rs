//! CSV input: one categorical column, plus the full table for passthrough.

use std::path::Path;

use stringcat_core::textprep;

use crate::error::{CliError, CliResult};

/// Header and records of a CSV file with a header row.
#[derive(Debug, Clone)]
pub struct Table {
    pub headers: Vec<String>,
    pub records: Vec<Vec<String>>,
}

pub fn read_table(path: &Path) -> CliResult<Table> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::new("io", format!("cannot open {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let headers = reader.headers()?.iter().map(str::to_owned).collect();
    let mut records = Vec::new();
    for rec in reader.records() {
        records.push(rec?.iter().map(str::to_owned).collect());
    }
    Ok(Table { headers, records })
}

impl Table {
    /// Position of a column given by name, or by zero-based index when no
    /// header matches.
    pub fn column_index(&self, column: &str) -> CliResult<usize> {
        if let Some(i) = self.headers.iter().position(|h| h == column) {
            return Ok(i);
        }
        match column.parse::<usize>() {
            Ok(i) if i < self.headers.len() => Ok(i),
            _ => Err(CliError::config(format!(
                "unknown column {column:?} (available: {})",
                self.headers.join(", ")
            ))),
        }
    }

    /// The column's values: missing cells read as `"nan"`, everything is
    /// normalized.
    pub fn categories(&self, index: usize) -> Vec<String> {
        self.records
            .iter()
            .map(|r| match r.get(index).map(String::as_str) {
                None | Some("") => "nan".to_owned(),
                Some(v) => textprep::normalize(v),
            })
            .collect()
    }
}
