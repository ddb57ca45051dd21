//! Machine-readable reports and plot data.

use std::fmt::Write as _;
use std::path::Path;

use crate::cli::config::ExperimentConfig;
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Warn,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct CheckRecord {
    pub name: String,
    /// The identity or inequality the check evaluates.
    pub anchor: String,
    pub status: Status,
    pub value: f64,
    pub target: f64,
    pub tol: f64,
    /// Wall-clock milliseconds, recorded only when timings are requested.
    pub ms: Option<u64>,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub measure: &'static str,
}

pub const HEADER: Header = Header {
    tool: env!("CARGO_PKG_NAME"),
    version: env!("CARGO_PKG_VERSION"),
    measure: "nu(cylinder of x) = 1 / (2k (2k-1)^(|x|-1)); orthonormal basis 1_w / sqrt(nu_n)",
};

#[derive(Clone, Debug, serde::Serialize)]
pub struct Report {
    pub header: Header,
    pub config: ExperimentConfig,
    pub checks: Vec<CheckRecord>,
}

impl Report {
    pub fn new(config: ExperimentConfig) -> Self {
        Self { header: HEADER, config, checks: Vec::new() }
    }

    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.status == Status::Pass).count()
    }

    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| c.status == Status::Fail).count()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// A CSV table with a header row.
#[derive(Clone, Debug)]
pub struct Table {
    pub file: &'static str,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: &'static str, header: &[&'static str]) -> Self {
        Self { file, header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            let _ = writeln!(s, "{}", row.join(","));
        }
        s
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::write(dir.join(self.file), self.render())?;
        Ok(())
    }
}

/// Shortest round-trip formatting, so tables are reproducible byte for byte.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}
