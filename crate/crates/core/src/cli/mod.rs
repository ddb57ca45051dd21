//! Command line driver: configuration, suites and the JSON report.

pub mod config;
pub mod report;
pub mod suites;

use std::path::Path;

use crate::error::Result;
use config::ExperimentConfig;
use report::Report;
use suites::{Context, SUITES};

/// Runs `subcommand` (one of [`SUITES`] or `all`) and returns the finished report.
pub fn run(subcommand: &str, cfg: ExperimentConfig) -> Result<(Report, Vec<report::Table>)> {
    let mut ctx = Context::new(cfg)?;
    if subcommand == "all" {
        for name in SUITES {
            ctx.run_suite(name)?;
        }
    } else {
        ctx.run_suite(subcommand)?;
    }
    Ok((ctx.report, ctx.tables))
}

/// Writes `report.json` and the CSV tables into `dir`.
pub fn write_outputs(dir: &Path, report: &Report, tables: &[report::Table]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), report.to_json()?)?;
    for table in tables {
        table.write(dir)?;
    }
    Ok(())
}
