use std::path::Path;

use serde::Serialize;

use super::{Estimate, HarnessError};

pub const CSV_HEADER: &str = "p,s,L,theta,stderr,n,seed";

/// One line of the results table. Wall times are left out so that the table
/// depends only on the configuration and the seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CsvRow {
    pub p: f64,
    pub s: f64,
    #[serde(rename = "L")]
    pub l: usize,
    pub theta: f64,
    pub stderr: f64,
    pub n: u64,
    pub seed: u64,
}

impl CsvRow {
    pub fn new(p: f64, s: f64, l: usize, e: &Estimate) -> Self {
        CsvRow { p, s, l, theta: e.value, stderr: e.stderr, n: e.n_samples, seed: e.seed }
    }
}

pub fn csv_string(rows: &[CsvRow]) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(',')).map_err(|e| HarnessError::Output(e.to_string()))?;
    }
    for row in rows {
        w.serialize(row).map_err(|e| HarnessError::Output(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| HarnessError::Output(e.to_string()))
}

/// Writes `results.csv` and `summary.json` into `dir`.
pub fn write_outputs<S: Serialize>(dir: &Path, rows: &[CsvRow], summary: &S) -> Result<(), HarnessError> {
    let io = |e: std::io::Error| HarnessError::Output(e.to_string());
    std::fs::create_dir_all(dir).map_err(io)?;
    std::fs::write(dir.join("results.csv"), csv_string(rows)?).map_err(io)?;
    let json = serde_json::to_string_pretty(summary).map_err(|e| HarnessError::Output(e.to_string()))?;
    std::fs::write(dir.join("summary.json"), json + "\n").map_err(io)?;
    Ok(())
}
