//! `plot`: render the evaluation report as an SVG bar chart.

use std::path::PathBuf;

use anyhow::{Context, Result};
use testimate_core::regress::EvalReport;

use crate::chart::render_chart;

use super::{ensure_out_dir, CHART_SVG, REPORT_JSON};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Directory holding `report.json`; receives the chart.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &Args) -> Result<i32> {
    let report_path = args.out.join(REPORT_JSON);
    let text = std::fs::read_to_string(&report_path)
        .with_context(|| format!("cannot read {} (run `evaluate` first)", report_path.display()))?;
    let report: EvalReport = serde_json::from_str(&text)
        .with_context(|| format!("{} is not a valid evaluation report", report_path.display()))?;
    let svg = render_chart(&report)?;
    ensure_out_dir(&args.out)?;
    let svg_path = args.out.join(CHART_SVG);
    std::fs::write(&svg_path, svg)
        .with_context(|| format!("cannot write {}", svg_path.display()))?;
    println!("chart with {} bars -> {}", report.models.len(), svg_path.display());
    Ok(0)
}
