//! CSV emission and parsing.
//!
//! Layout: '#'-prefixed metadata lines (key: value pairs, the first one
//! carrying the schema tag), one header row, then numeric data rows. Empty
//! cells encode missing values.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv has no header row")]
    MissingHeader,
    #[error("csv has no data rows")]
    Empty,
    #[error("row {row} has {got} cells, expected {expected}")]
    RaggedRow { row: usize, got: usize, expected: usize },
    #[error("row {row}, column {col}: {cell:?} is not a number")]
    BadNumber { row: usize, col: usize, cell: String },
}

/// An in-memory CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub metadata: Vec<(String, String)>,
    pub header: Vec<String>,
    /// Row-major cells; `None` encodes an empty cell.
    pub rows: Vec<Vec<Option<f64>>>,
}

impl CsvTable {
    pub fn new(schema: &str, header: Vec<String>) -> Self {
        Self { metadata: vec![("schema".into(), schema.into())], header, rows: Vec::new() }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.into(), value.to_string()));
    }

    pub fn push_row(&mut self, row: Vec<Option<f64>>) {
        assert_eq!(row.len(), self.header.len(), "row width must match header");
        self.rows.push(row);
    }

    /// Serializes the table; float formatting is the shortest
    /// round-trippable form, so identical data yields identical bytes.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> =
                row.iter().map(|c| c.map(|v| format!("{v}")).unwrap_or_default()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &std::path::Path) -> Result<(), CsvError> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CsvError::Io { path: path.display().to_string(), source: e })?;
        }
        std::fs::write(path, self.to_csv_string())
            .map_err(|e| CsvError::Io { path: path.display().to_string(), source: e })
    }

    /// Parses CSV text back into a table; tolerant of blank lines, strict
    /// about width and numeric cells.
    pub fn parse(text: &str) -> Result<Self, CsvError> {
        let mut metadata = Vec::new();
        let mut header: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(comment) = trimmed.strip_prefix('#') {
                if let Some((k, v)) = comment.split_once(':') {
                    metadata.push((k.trim().to_string(), v.trim().to_string()));
                }
                continue;
            }
            match &header {
                None => header = Some(trimmed.split(',').map(|s| s.trim().to_string()).collect()),
                Some(cols) => {
                    let cells: Vec<&str> = trimmed.split(',').collect();
                    if cells.len() != cols.len() {
                        return Err(CsvError::RaggedRow {
                            row: line_no + 1,
                            got: cells.len(),
                            expected: cols.len(),
                        });
                    }
                    let mut parsed = Vec::with_capacity(cells.len());
                    for (col, cell) in cells.iter().enumerate() {
                        let cell = cell.trim();
                        if cell.is_empty() {
                            parsed.push(None);
                        } else {
                            let v: f64 = cell.parse().map_err(|_| CsvError::BadNumber {
                                row: line_no + 1,
                                col: col + 1,
                                cell: cell.to_string(),
                            })?;
                            parsed.push(Some(v));
                        }
                    }
                    rows.push(parsed);
                }
            }
        }
        let header = header.ok_or(CsvError::MissingHeader)?;
        if rows.is_empty() {
            return Err(CsvError::Empty);
        }
        Ok(Self { metadata, header, rows })
    }

    pub fn read(path: &std::path::Path) -> Result<Self, CsvError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CsvError::Io { path: path.display().to_string(), source: e })?;
        Self::parse(&text)
    }
}
