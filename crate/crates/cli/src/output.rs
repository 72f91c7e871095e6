use crate::CliResult;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Twelve significant digits in exponent form with trailing zeros trimmed,
/// `nan` for missing values.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.11e}");
    let (mant, exp) = s.split_once('e').expect("exponent form");
    let mant = if mant.contains('.') { mant.trim_end_matches('0').trim_end_matches('.') } else { mant };
    format!("{mant}e{exp}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => fmt_float(*x),
            Cell::I(i) => i.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// CSV bytes: `#` comment lines, one header row, LF line endings.
    pub fn to_csv(&self, comments: &[String]) -> CliResult<Vec<u8>> {
        let mut buf = Vec::new();
        for c in comments {
            buf.extend_from_slice(b"# ");
            buf.extend_from_slice(c.as_bytes());
            buf.push(b'\n');
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(buf);
        let io = |e: csv::Error| crate::CliError::Io(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render)).map_err(io)?;
        }
        w.into_inner().map_err(|e| crate::CliError::Io(e.to_string()))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PointRecord {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub param: Option<f64>,
    pub flag: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl PointRecord {
    pub fn ok(index: usize, param: Option<f64>, flag: &str) -> Self {
        Self { index, param, flag: flag.into(), message: None }
    }
    pub fn failed(index: usize, param: Option<f64>, message: String) -> Self {
        Self { index, param, flag: "failed".into(), message: Some(message) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputRecord {
    pub path: PathBuf,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub status: String,
    pub exit_code: u8,
    pub config: Value,
    pub wall_time_s: f64,
    pub points: Vec<PointRecord>,
    pub outputs: Vec<OutputRecord>,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

pub fn write_output(path: &Path, bytes: &[u8]) -> CliResult<OutputRecord> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, bytes)?;
    Ok(OutputRecord { path: path.to_path_buf(), sha256: hex_digest(bytes), bytes: bytes.len() })
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_manifest(output: &Path, m: &Manifest) -> CliResult<()> {
    let text = serde_json::to_string_pretty(m).map_err(|e| crate::CliError::Io(e.to_string()))?;
    std::fs::write(manifest_path(output), text + "\n")?;
    Ok(())
}
