//! `predict`: score every Java file in the candidate working tree against
//! the persisted model, reporting predicted suite runtime, the baseline,
//! and the delta.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use testimate_core::harness;
use testimate_core::stylometry::extract_file;

use crate::model_file;
use crate::table;

use super::{ensure_out_dir, java_files, read_sources, MODEL_TXT, PREDICTIONS_CSV};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Measurement config file (names the candidate working tree).
    #[arg(long)]
    pub config: PathBuf,
    /// Directory holding `model.txt`; receives the predictions.
    #[arg(long)]
    pub out: PathBuf,
    /// Baseline suite runtime in seconds; defaults to the model's training
    /// target mean.
    #[arg(long)]
    pub baseline: Option<f64>,
}

pub fn run(args: &Args) -> Result<i32> {
    let model_path = args.out.join(MODEL_TXT);
    let saved = model_file::read_model(&model_path)
        .with_context(|| format!("cannot read {} (run `evaluate` first)", model_path.display()))?;
    let config = harness::read_config(&args.config)
        .with_context(|| format!("cannot load config {}", args.config.display()))?;
    ensure_out_dir(&args.out)?;

    let needs_corpus = saved.schema.enable_ast_tfidf || saved.schema.enable_embedding;
    if needs_corpus && saved.corpus.is_none() {
        bail!(
            "model uses schema `{}` but the model file carries no corpus statistics",
            saved.schema.name
        );
    }

    let files = java_files(&config.repo_path)?;
    let sources = read_sources(&files);
    if sources.is_empty() {
        bail!("no Java source files found under {}", config.repo_path.display());
    }

    let mut names: Vec<String> = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (rel, text) in &sources {
        match extract_file(text, rel, &saved.schema, saved.corpus.as_ref()) {
            Ok(vector) => {
                names.push(rel.clone());
                rows.push(vector.values);
            }
            Err(err) => eprintln!("warning: skipping {rel}: {err}"),
        }
    }
    if rows.is_empty() {
        bail!("none of the {} Java files could be processed", sources.len());
    }

    let predicted = saved.model.predict(&rows)?;
    let baseline = args.baseline.unwrap_or(saved.model.target_mean);
    if !(baseline.is_finite() && baseline > 0.0) {
        bail!("baseline must be a positive number of seconds, got {baseline}");
    }

    let csv_path = args.out.join(PREDICTIONS_CSV);
    let mut writer = csv::Writer::from_path(&csv_path)
        .with_context(|| format!("cannot write {}", csv_path.display()))?;
    writer.write_record([
        "file",
        "predicted_seconds",
        "baseline_seconds",
        "delta_seconds",
        "delta_percent",
    ])?;
    let mut console_rows = Vec::with_capacity(names.len());
    for (name, pred) in names.iter().zip(&predicted) {
        let delta = pred - baseline;
        let percent = delta / baseline * 100.0;
        writer.write_record([
            name.clone(),
            pred.to_string(),
            baseline.to_string(),
            delta.to_string(),
            percent.to_string(),
        ])?;
        console_rows.push(vec![
            name.clone(),
            format!("{pred:.2}"),
            format!("{delta:+.2}"),
            format!("{percent:+.2}"),
        ]);
    }
    writer.flush()?;

    print!(
        "{}",
        table::render(&["file", "predicted (s)", "delta (s)", "delta (%)"], &console_rows)
    );
    println!(
        "baseline {baseline:.2}s ({}) -> {}",
        if args.baseline.is_some() { "from --baseline" } else { "training mean" },
        csv_path.display()
    );
    Ok(0)
}
