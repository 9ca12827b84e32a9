//! Machine-readable run reports.
//!
//! One JSON report per run plus optional CSV tables. Serialization is
//! deterministic: struct fields in declaration order, maps sorted, floats
//! in shortest round-trip form, no timestamps. Running the same scenario
//! with the same seed yields byte-identical output. The JSON layout is
//! versioned in `docs/report.schema.json`.

use crate::error::Result;
use crate::scenario::Tolerances;
use serde::Serialize;
use std::path::Path;

pub const TOOL_NAME: &str = "ctxprob";
pub const REPORT_SCHEMA_VERSION: u32 = 1;

pub fn tool_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

#[derive(Debug, Clone, Serialize)]
pub struct ToleranceOut {
    pub float_abs: f64,
    pub verify: f64,
}

impl From<Tolerances> for ToleranceOut {
    fn from(t: Tolerances) -> Self {
        ToleranceOut {
            float_abs: t.float_abs,
            verify: t.verify,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskReport {
    pub task: String,
    pub pass: bool,
    pub detail: serde_json::Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub schema: u32,
    pub scenario: String,
    pub seed: u64,
    pub tolerances: ToleranceOut,
    pub tasks: Vec<TaskReport>,
    pub pass: bool,
}

impl Report {
    pub fn to_json_bytes(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("report serializes");
        bytes.push(b'\n');
        bytes
    }

    pub fn failed_tasks(&self) -> Vec<String> {
        self.tasks
            .iter()
            .filter(|t| !t.pass)
            .map(|t| t.task.clone())
            .collect()
    }
}

/// A named CSV table emitted next to the JSON report.
#[derive(Debug, Clone)]
pub struct CsvTable {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn write_to(&self, path: &Path) -> Result<()> {
        let mut writer = csv::Writer::from_path(path).map_err(csv_io)?;
        writer.write_record(&self.header).map_err(csv_io)?;
        for row in &self.rows {
            writer.write_record(row).map_err(csv_io)?;
        }
        writer.flush()?;
        Ok(())
    }
}

fn csv_io(e: csv::Error) -> crate::error::Error {
    crate::error::Error::Scenario(format!("csv write failed: {e}"))
}
