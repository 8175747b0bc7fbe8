//! Deterministic CSV and JSON output writers.

use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// Floating-point formatting with 17 significant digits (lossless f64
/// round-trip).
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize, Clone, Debug)]
pub struct Assertion {
    pub name: String,
    /// Identity or bound being tested, mirroring the library operation.
    pub anchor: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
}

impl Assertion {
    pub fn le(name: &str, anchor: &str, value: f64, tolerance: f64) -> Self {
        Assertion { name: name.into(), anchor: anchor.into(), passed: value <= tolerance, value, tolerance }
    }
    pub fn ge(name: &str, anchor: &str, value: f64, floor: f64) -> Self {
        Assertion { name: name.into(), anchor: anchor.into(), passed: value >= floor, value, tolerance: floor }
    }
}

#[derive(Serialize)]
pub struct Summary {
    pub tool: String,
    pub version: String,
    pub task: String,
    pub config_hash: String,
    pub seed: u64,
    pub jobs: usize,
    pub entries: usize,
    pub numerical_failures: usize,
    pub status: String,
    pub assertions: Vec<Assertion>,
    pub fitted: Vec<(String, f64)>,
}

/// RFC-4180 CSV with CRLF record separators and a header row.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()
}

pub fn write_summary(path: &Path, summary: &Summary) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    let text = serde_json::to_string_pretty(summary).expect("serializable summary");
    f.write_all(text.as_bytes())?;
    f.write_all(b"\n")
}
