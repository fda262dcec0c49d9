//! Persistence: CSV time series, JSON reports with a versioned schema,
//! JSON-lines event logs, and a plain-text summary.
//!
//! Everything written here is a regression fixture, so outputs carry no
//! timestamps, hostnames, or absolute paths: identical config + seed must
//! reproduce the bytes exactly.

use std::fs;
use std::io::{self, Write as _};
use std::path::Path;

use serde::Serialize;

use crate::solver::{EventRecord, Profile, RunStatus};

pub const SCHEMA_VERSION: u32 = 1;

/// One named verdict inside a scenario report.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub details: String,
}

/// One named scalar worth aggregating across runs.
#[derive(Debug, Clone, Serialize)]
pub struct Scalar {
    pub name: String,
    pub value: f64,
}

/// Top-level JSON report for one scenario run.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub schema_version: u32,
    pub scenario: String,
    pub k: u32,
    pub grid_n: usize,
    pub horizon: f64,
    pub seed: u64,
    pub status: RunStatus,
    pub checks: Vec<CheckResult>,
    pub scalars: Vec<Scalar>,
}

impl ScenarioReport {
    pub fn new(scenario: &str, k: u32, grid_n: usize, horizon: f64, seed: u64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            scenario: scenario.to_string(),
            k,
            grid_n,
            horizon,
            seed,
            status: RunStatus::Running,
            checks: Vec::new(),
            scalars: Vec::new(),
        }
    }

    pub fn check(&mut self, name: &str, passed: bool, details: impl Into<String>) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            passed,
            details: details.into(),
        });
    }

    pub fn scalar(&mut self, name: &str, value: f64) {
        self.scalars.push(Scalar {
            name: name.to_string(),
            value,
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Aggregated JSON table for a parameter sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub axis: String,
    pub cells: Vec<SweepCell>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepCell {
    pub label: String,
    pub passed: bool,
    pub status: RunStatus,
    pub scalars: Vec<Scalar>,
}

impl SweepReport {
    pub fn new(axis: &str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            axis: axis.to_string(),
            cells: Vec::new(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.cells.iter().all(|c| c.passed)
    }
}

/// Shortest round-trip decimal form; what every emitter below uses.
pub fn fmt_float(x: f64) -> String {
    format!("{x}")
}

/// Snapshot matrix: header row is "time" followed by node radii, each
/// following row is a snapshot time and the profile values at the nodes.
pub fn write_snapshot_csv(path: &Path, snaps: &[Profile]) -> io::Result<()> {
    let mut out = String::new();
    if let Some(first) = snaps.first() {
        out.push_str("time");
        for r in first.grid.nodes() {
            out.push(',');
            out.push_str(&fmt_float(*r));
        }
        out.push('\n');
        for snap in snaps {
            assert_eq!(
                snap.grid.nodes(),
                first.grid.nodes(),
                "snapshot CSV needs one fixed grid"
            );
            out.push_str(&fmt_float(snap.time));
            for v in &snap.values {
                out.push(',');
                out.push_str(&fmt_float(*v));
            }
            out.push('\n');
        }
    }
    fs::write(path, out)
}

/// Generic column-per-name series (energy ledger, fronts, gradient
/// statistics): one row per record.
pub fn write_series_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> io::Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        assert_eq!(row.len(), header.len(), "row width must match header");
        let cells: Vec<String> = row.iter().map(|v| fmt_float(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    fs::write(path, out)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)
}

/// Solver event log as JSON lines, one record per line.
pub fn write_event_log(path: &Path, events: &[EventRecord]) -> io::Result<()> {
    let mut file = fs::File::create(path)?;
    for e in events {
        serde_json::to_writer(&mut file, e)?;
        file.write_all(b"\n")?;
    }
    Ok(())
}

pub fn render_summary(report: &ScenarioReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("scenario: {}\n", report.scenario));
    out.push_str(&format!(
        "k = {}, grid n = {}, horizon = {}, seed = {}\n",
        report.k,
        report.grid_n,
        fmt_float(report.horizon),
        report.seed
    ));
    out.push_str(&format!(
        "status: {}\n",
        serde_json::to_value(report.status)
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_default()
    ));
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    out.push_str(&format!(
        "checks: {} passed, {} failed\n",
        report.checks.len() - failed,
        failed
    ));
    for c in &report.checks {
        let mark = if c.passed { "pass" } else { "FAIL" };
        out.push_str(&format!("  [{mark}] {}: {}\n", c.name, c.details));
    }
    if !report.scalars.is_empty() {
        out.push_str("scalars:\n");
        for s in &report.scalars {
            out.push_str(&format!("  {} = {}\n", s.name, fmt_float(s.value)));
        }
    }
    out.push_str(if report.all_passed() {
        "verdict: ok\n"
    } else {
        "verdict: FAILED\n"
    });
    out
}

pub fn write_summary(path: &Path, report: &ScenarioReport) -> io::Result<()> {
    fs::write(path, render_summary(report))
}
