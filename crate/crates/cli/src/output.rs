//! Tabular output as CSV or JSON, with a run manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            // re-parsed from the printed digits so CSV and JSON carry the same values
            Cell::Float(x) => format_float(*x).parse::<f64>().map(|v| json!(v)).unwrap_or(Value::Null),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

/// Scientific notation with 12 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.11e}")
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Trailing `# key,value` lines in CSV; a `footer` object in JSON.
    pub footer: Vec<(String, Cell)>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        for (key, value) in &self.footer {
            let _ = writeln!(out, "# {key},{}", value.csv());
        }
        out
    }

    /// The data part of the JSON document, without the manifest.
    pub fn to_json_data(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let footer: serde_json::Map<String, Value> =
            self.footer.iter().map(|(k, v)| (k.clone(), v.json())).collect();
        json!({ "columns": self.columns, "rows": rows, "footer": footer })
    }
}

/// Provenance written next to (CSV) or inside (JSON) every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool: &'static str,
    pub version: &'static str,
    pub timestamp: String,
    pub format: Format,
    pub config: Value,
    /// SHA-256 of the data payload: the CSV text, or the compact JSON of the
    /// `data` member.
    pub output_checksum_sha256: String,
}

impl RunManifest {
    pub fn new(command: &str, config: Value, format: Format) -> Self {
        RunManifest {
            command: command.to_string(),
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            format,
            config,
            output_checksum_sha256: String::new(),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Path of the manifest that accompanies a CSV file.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Writes `table` to `out` (or stdout) in `format`, with its manifest.
///
/// CSV files get a `<out>.manifest.json` companion; JSON output embeds the
/// manifest. CSV on stdout is written bare.
pub fn emit(table: &Table, mut manifest: RunManifest, out: Option<&Path>) -> Result<(), CliError> {
    match manifest.format {
        Format::Csv => {
            let payload = table.to_csv();
            manifest.output_checksum_sha256 = sha256_hex(payload.as_bytes());
            match out {
                Some(path) => {
                    std::fs::write(path, &payload)?;
                    let text = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
                    std::fs::write(manifest_path(path), text + "\n")?;
                }
                None => print!("{payload}"),
            }
        }
        Format::Json => {
            let data = table.to_json_data();
            manifest.output_checksum_sha256 = sha256_hex(data.to_string().as_bytes());
            let doc = json!({ "manifest": manifest, "data": data });
            let text = serde_json::to_string_pretty(&doc).expect("document serialises") + "\n";
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}
