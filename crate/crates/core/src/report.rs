//! Machine-readable run reports: a manifest describing the resolved
//! configuration plus uniform rows of named cells, written atomically as JSON
//! (one object with "manifest" and "rows") or as RFC-4180-style CSV with a
//! JSON manifest sidecar. Field order is fixed by insertion; floats carry 12
//! significant digits; integers are exact.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => csv_quote(s),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => json_string(s),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

/// 12 significant digits, scientific notation. Valid as a JSON number.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0.0".to_string();
    }
    format!("{x:.11e}")
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// One report row: ordered named cells. All rows of a report share one schema.
#[derive(Debug, Clone, Default)]
pub struct Row {
    fields: Vec<(&'static str, Cell)>,
}

impl Row {
    pub fn new() -> Self {
        Row { fields: Vec::new() }
    }

    pub fn int(mut self, name: &'static str, v: impl Into<i128>) -> Self {
        self.fields.push((name, Cell::Int(v.into())));
        self
    }

    pub fn float(mut self, name: &'static str, v: f64) -> Self {
        self.fields.push((name, Cell::Float(v)));
        self
    }

    pub fn text(mut self, name: &'static str, v: impl Into<String>) -> Self {
        self.fields.push((name, Cell::Text(v.into())));
        self
    }

    pub fn bool(mut self, name: &'static str, v: bool) -> Self {
        self.fields.push((name, Cell::Bool(v)));
        self
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.fields.iter().map(|(n, _)| *n).collect()
    }

    pub fn get(&self, name: &str) -> Option<&Cell> {
        self.fields.iter().find(|(n, _)| *n == name).map(|(_, c)| c)
    }
}

/// Resolved run description carried with every report.
#[derive(Debug, Clone)]
pub struct Manifest {
    pub subcommand: String,
    pub version: String,
    pub seed: u64,
    /// Flag name / resolved value pairs, in a fixed order.
    pub config: Vec<(String, String)>,
    pub checks_passed: usize,
    pub checks_failed: usize,
}

impl Manifest {
    fn json(&self) -> String {
        let config: Vec<String> = self
            .config
            .iter()
            .map(|(k, v)| format!("{}:{}", json_string(k), json_string(v)))
            .collect();
        format!(
            "{{\"subcommand\":{},\"version\":{},\"seed\":{},\"config\":{{{}}},\"checks_passed\":{},\"checks_failed\":{}}}",
            json_string(&self.subcommand),
            json_string(&self.version),
            self.seed,
            config.join(","),
            self.checks_passed,
            self.checks_failed,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub manifest: Manifest,
    rows: Vec<Row>,
}

impl Report {
    pub fn new(manifest: Manifest) -> Self {
        Report {
            manifest,
            rows: Vec::new(),
        }
    }

    /// Appends a row; panics if its schema differs from the first row's.
    pub fn push(&mut self, row: Row) {
        if let Some(first) = self.rows.first() {
            assert_eq!(first.names(), row.names(), "report rows must share a schema");
        }
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    fn to_json(&self) -> String {
        let mut out = String::new();
        out.push_str("{\"manifest\":");
        out.push_str(&self.manifest.json());
        out.push_str(",\"rows\":[");
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push('{');
            for (j, (name, cell)) in row.fields.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&json_string(name));
                out.push(':');
                out.push_str(&cell.json());
            }
            out.push('}');
        }
        out.push_str("]}\n");
        out
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        if let Some(first) = self.rows.first() {
            out.push_str(&first.names().join(","));
            out.push('\n');
        }
        for row in &self.rows {
            let cells: Vec<String> = row.fields.iter().map(|(_, c)| c.csv()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Writes the report atomically (temp file + rename). Returns every path
    /// written: the report itself and, for CSV, the manifest sidecar.
    pub fn write(&self, path: &Path, format: Format) -> io::Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        match format {
            Format::Json => {
                atomic_write(path, self.to_json().as_bytes())?;
                written.push(path.to_path_buf());
            }
            Format::Csv => {
                atomic_write(path, self.to_csv().as_bytes())?;
                written.push(path.to_path_buf());
                let sidecar = sidecar_path(path);
                let manifest = format!("{{\"manifest\":{}}}\n", self.manifest.json());
                atomic_write(&sidecar, manifest.as_bytes())?;
                written.push(sidecar);
            }
        }
        Ok(written)
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    path.with_file_name(name)
}

fn atomic_write(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut tmp = path.file_name().unwrap_or_default().to_os_string();
    tmp.push(".tmp");
    let tmp_path = path.with_file_name(tmp);
    {
        let mut file = fs::File::create(&tmp_path)?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    fs::rename(&tmp_path, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest() -> Manifest {
        Manifest {
            subcommand: "group".into(),
            version: "0.1.0".into(),
            seed: 7,
            config: vec![("p".into(), "3".into()), ("r".into(), "2".into())],
            checks_passed: 1,
            checks_failed: 0,
        }
    }

    #[test]
    fn float_formatting() {
        assert_eq!(format_float(0.0), "0.0");
        let s = format_float(1.0 / 3.0);
        assert!(s.starts_with("3.33333333333"), "{s}");
        let parsed: f64 = format_float(123.456).parse().unwrap();
        assert!((parsed - 123.456).abs() < 1e-9);
    }

    #[test]
    fn empty_report_is_valid() {
        let report = Report::new(manifest());
        let json = report.to_json();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["manifest"]["subcommand"], "group");
        assert_eq!(value["rows"].as_array().unwrap().len(), 0);
        assert_eq!(report.to_csv(), "");
    }

    #[test]
    fn csv_round_trip() {
        let mut report = Report::new(manifest());
        report.push(Row::new().text("check", "order").int("value", 12).bool("pass", true));
        report.push(Row::new().text("check", "oracle").int("value", 12).bool("pass", true));
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "check,value,pass");
        assert_eq!(lines.next().unwrap(), "order,12,true");
        assert_eq!(lines.next().unwrap(), "oracle,12,true");
    }

    #[test]
    fn json_parses_and_is_stable() {
        let mut report = Report::new(manifest());
        report.push(Row::new().text("check", "gap").float("value", 0.5).bool("pass", true));
        let a = report.to_json();
        let b = report.to_json();
        assert_eq!(a, b);
        let value: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(value["rows"][0]["value"], 0.5);
    }

    #[test]
    fn atomic_write_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        let mut report = Report::new(manifest());
        report.push(Row::new().text("check", "x").bool("pass", true));
        let written = report.write(&path, Format::Csv).unwrap();
        assert_eq!(written.len(), 2);
        assert!(written[0].exists());
        assert!(written[1].ends_with("out.csv.manifest.json"));
        let manifest_text = fs::read_to_string(&written[1]).unwrap();
        serde_json::from_str::<serde_json::Value>(&manifest_text).unwrap();
    }
}
