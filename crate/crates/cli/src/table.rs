//! Result tables and their CSV form.
//!
//! A CSV starts with a `#` block (tool version, command, seed, trials,
//! config hash and the full config echo), then a header row and one row
//! per sweep point. Rows that failed carry NaNs and a message in the
//! trailing `error` column.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};
use wpnet_core::netmodel::NetworkConfig;

use crate::config::emit_config;

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub errors: Vec<Option<String>>,
    pub metadata: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
            errors: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
        self.errors.push(None);
    }

    pub fn push_error(&mut self, x: f64, message: impl Into<String>) {
        let mut row = vec![f64::NAN; self.columns.len()];
        row[0] = x;
        self.rows.push(row);
        self.errors.push(Some(message.into()));
    }

    pub fn has_errors(&self) -> bool {
        self.errors.iter().any(Option::is_some)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    /// Records everything needed to re-run the table bit for bit.
    pub fn stamp(&mut self, command: &str, cfg: &NetworkConfig, seed: u64, trials: Option<usize>) {
        self.meta("tool", format!("wpnet {}", env!("CARGO_PKG_VERSION")));
        self.meta("command", command);
        self.meta("seed", seed);
        self.meta("trials", trials.map_or("none".to_string(), |t| t.to_string()));
        let text = emit_config(cfg);
        self.meta("config_sha256", config_hash(&text));
        for line in text.lines() {
            self.meta("config", line);
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let with_err = self.has_errors();
        out.push_str(&self.columns.join(","));
        if with_err {
            out.push_str(",error");
        }
        out.push('\n');
        for (row, err) in self.rows.iter().zip(&self.errors) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&cells.join(","));
            if with_err {
                out.push(',');
                if let Some(e) = err {
                    out.push('"');
                    out.push_str(&e.replace('"', "'"));
                    out.push('"');
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_csv())
    }
}

pub fn config_hash(emitted: &str) -> String {
    Sha256::digest(emitted.as_bytes())
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

/// Data rows of a CSV: everything after the `#` block and the header.
pub fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}
