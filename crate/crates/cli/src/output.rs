//! CSV reports: a header row, data rows, then `#`-prefixed metadata lines.

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Renders the table followed by one `# key: value` line per metadata entry.
/// Newlines inside values are flattened so every entry stays on one line.
pub fn render(table: &Table, metadata: &[(String, String)]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.header).map_err(csv_err)?;
    for row in &table.rows {
        w.write_record(row).map_err(csv_err)?;
    }
    let mut out = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    for (k, v) in metadata {
        let v = v.replace(['\n', '\r'], " ");
        out.extend_from_slice(format!("# {k}: {v}\n").as_bytes());
    }
    Ok(out)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e.to_string()))
}

/// Shortest round-trip form; scientific notation for very small or large magnitudes.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}
