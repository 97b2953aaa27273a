//! Suite reports: per-check records with measured value, threshold and
//! verdict, serialized to CSV (stable column order) and versioned JSON.
//! The timestamp lives in a wrapper object so the report body is
//! byte-reproducible for a fixed configuration and seed.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, measured: f64, threshold: f64, pass: bool) -> Self {
        CheckRecord {
            name: name.into(),
            measured,
            threshold,
            pass,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SuiteReport {
    pub schema: u32,
    pub suite: String,
    pub seed: u64,
    pub non_default_thresholds: bool,
    pub records: Vec<CheckRecord>,
    pub overall_pass: bool,
    pub runtime_seconds: f64,
}

impl SuiteReport {
    pub fn new(suite: &str, seed: u64, non_default: bool, records: Vec<CheckRecord>) -> Self {
        let overall = records.iter().all(|r| r.pass);
        SuiteReport {
            schema: 1,
            suite: suite.to_string(),
            seed,
            non_default_thresholds: non_default,
            records,
            overall_pass: overall,
            runtime_seconds: 0.0,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(["name", "measured", "threshold", "pass"])
            .unwrap();
        for r in &self.records {
            wtr.write_record([
                r.name.clone(),
                format!("{:.12e}", r.measured),
                format!("{:.12e}", r.threshold),
                r.pass.to_string(),
            ])
            .unwrap();
        }
        String::from_utf8(wtr.into_inner().unwrap()).unwrap()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable report")
    }
}

/// Wrapper holding the volatile timestamp outside the reproducible body.
#[derive(Debug, Serialize, Deserialize)]
pub struct TimestampedReport {
    pub timestamp_unix: u64,
    pub report: SuiteReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Writes the report files into the output directory and returns the paths.
pub fn emit_report(
    report: &SuiteReport,
    dir: &Path,
    formats: &[ReportFormat],
) -> std::io::Result<Vec<std::path::PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for f in formats {
        match f {
            ReportFormat::Csv => {
                let p = dir.join(format!("{}_report.csv", report.suite));
                fs::write(&p, report.to_csv())?;
                written.push(p);
            }
            ReportFormat::Json => {
                let stamped = TimestampedReport {
                    timestamp_unix: std::time::SystemTime::now()
                        .duration_since(std::time::UNIX_EPOCH)
                        .map(|d| d.as_secs())
                        .unwrap_or(0),
                    report: report.clone(),
                };
                let p = dir.join(format!("{}_report.json", report.suite));
                fs::write(&p, serde_json::to_string_pretty(&stamped).unwrap())?;
                written.push(p);
            }
        }
    }
    Ok(written)
}
