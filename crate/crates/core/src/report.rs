//! Probe records and run reports.

use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::Result;
use crate::solvers::SolveReport;

/// One probe evaluation. Assertion records decide the exit status; the others are informational.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeRecord {
    pub probe: String,
    /// Name of the inequality or identity the probe measures.
    pub reference: String,
    pub inputs: serde_json::Value,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub assertion: bool,
}

impl ProbeRecord {
    pub fn check(probe: &str, reference: &str, inputs: serde_json::Value, value: f64, tolerance: f64, pass: bool) -> Self {
        Self {
            probe: probe.into(),
            reference: reference.into(),
            inputs,
            value,
            tolerance,
            pass,
            assertion: true,
        }
    }

    pub fn info(probe: &str, reference: &str, inputs: serde_json::Value, value: f64) -> Self {
        Self {
            probe: probe.into(),
            reference: reference.into(),
            inputs,
            value,
            tolerance: f64::NAN,
            pass: true,
            assertion: false,
        }
    }

    /// Passes when value ≥ −tolerance.
    pub fn slack(probe: &str, reference: &str, inputs: serde_json::Value, value: f64, tolerance: f64) -> Self {
        Self::check(probe, reference, inputs, value, tolerance, value >= -tolerance)
    }

    /// Passes when value ≤ tolerance.
    pub fn below(probe: &str, reference: &str, inputs: serde_json::Value, value: f64, tolerance: f64) -> Self {
        Self::check(probe, reference, inputs, value, tolerance, value <= tolerance)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub config: RunConfig,
    pub records: Vec<ProbeRecord>,
    pub solves: Vec<SolveReport>,
    pub notes: Vec<String>,
    pub files: Vec<String>,
}

impl RunReport {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Self {
            command: command.into(),
            config: config.clone(),
            records: Vec::new(),
            solves: Vec::new(),
            notes: Vec::new(),
            files: Vec::new(),
        }
    }

    pub fn push(&mut self, r: ProbeRecord) {
        self.records.push(r);
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| !r.assertion || r.pass)
    }

    pub fn failures(&self) -> Vec<&ProbeRecord> {
        self.records.iter().filter(|r| r.assertion && !r.pass).collect()
    }

    /// Writes `name` into `dir` and lists it in the report.
    pub fn write_file(&mut self, dir: &Path, name: &str, contents: &str) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(name), contents)?;
        self.files.push(name.into());
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("run.json"), serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}
