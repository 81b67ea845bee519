//! `collect`: check out each configured snapshot, build it, time the test
//! suite, and write `timings.csv`.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use testimate_core::harness::{self, TimingRecord};

use crate::table;

use super::{ensure_out_dir, TIMINGS_CSV};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Measurement config file (repository path, snapshots, commands).
    #[arg(long)]
    pub config: PathBuf,
    /// Directory that receives the artifacts.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &Args) -> Result<i32> {
    let config = harness::read_config(&args.config)
        .with_context(|| format!("cannot load config {}", args.config.display()))?;
    if config.snapshots.is_empty() {
        bail!("config lists no snapshots to measure");
    }
    ensure_out_dir(&args.out)?;

    let results = harness::walk_history(&config, |snapshot, _| {
        eprintln!("measuring snapshot `{}`...", snapshot.id);
        harness::time_tests(&config, &snapshot.id).map_err(|e| e.to_string())
    })?;

    let mut records: Vec<TimingRecord> = Vec::new();
    for (snapshot, outcome) in results {
        match outcome {
            Ok(record) => {
                for warning in &record.warnings {
                    eprintln!("warning: snapshot `{}`: {warning}", snapshot.id);
                }
                records.push(record);
            }
            Err(err) => eprintln!("warning: snapshot `{}` skipped: {err}", snapshot.id),
        }
    }
    if records.is_empty() {
        bail!("no snapshot produced a timing record");
    }

    let csv_path = args.out.join(TIMINGS_CSV);
    harness::write_timings_csv(&records, &csv_path)
        .with_context(|| format!("cannot write {}", csv_path.display()))?;

    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.snapshot.clone(),
                format!("{:.2}", r.build_seconds),
                format!("{:.2}", r.test_seconds),
                r.exit_status.to_string(),
            ]
        })
        .collect();
    print!("{}", table::render(&["snapshot", "build (s)", "test (s)", "exit"], &rows));
    println!("{} timing records -> {}", records.len(), csv_path.display());
    Ok(0)
}
