//! `preflight`: run the four repository-suitability checks and report
//! pass/fail per check.

use std::path::PathBuf;

use anyhow::{Context, Result};
use testimate_core::harness;

use crate::table;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Measurement config file (repository path, snapshots, commands).
    #[arg(long)]
    pub config: PathBuf,
    /// Minimum history depth the repository must offer.
    #[arg(long, default_value_t = 2)]
    pub min_history: usize,
}

pub fn run(args: &Args) -> Result<i32> {
    let config = harness::read_config(&args.config)
        .with_context(|| format!("cannot load config {}", args.config.display()))?;
    let report = harness::preflight(&config, args.min_history);

    let rows: Vec<Vec<String>> = report
        .checks
        .iter()
        .map(|check| {
            vec![
                check.name.to_string(),
                table::pass_fail(check.passed),
                check.detail.clone(),
            ]
        })
        .collect();
    print!("{}", table::render(&["check", "result", "detail"], &rows));

    if report.passed() {
        println!("repository is ready for data collection");
        Ok(0)
    } else {
        let failed = report.checks.iter().filter(|c| !c.passed).count();
        eprintln!("error: {failed} of {} preflight checks failed", report.checks.len());
        Ok(1)
    }
}
