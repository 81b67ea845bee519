//! `evaluate`: cross-validate all six regression models on a dataset,
//! write the evaluation report, and persist the best model for `predict`.

use std::path::PathBuf;

use anyhow::{Context, Result};
use testimate_core::dataset::{self, Dataset, FoldPlan};
use testimate_core::regress::{self, EvalReport, ModelKind, ModelSpec};

use crate::model_file::{self, SavedModel};
use crate::table;

use super::{CORPUS_TXT, DATASET_CSV, MODEL_TXT, REPORT_JSON};

/// How rows are grouped into cross-validation folds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GroupSplit {
    /// Target-stratified at the row level (the default).
    Row,
    /// All rows of a snapshot share a fold, so no snapshot leaks across
    /// the train/test boundary.
    Snapshot,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Directory holding `dataset.csv`; receives the report and model.
    #[arg(long)]
    pub out: PathBuf,
    /// Number of cross-validation folds.
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Seed for fold assignment and model training.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Fold grouping: `row` (stratified) or `snapshot` (no snapshot leaks
    /// across folds).
    #[arg(long, value_enum, default_value_t = GroupSplit::Row)]
    pub group_split: GroupSplit,
}

pub fn run(args: &Args) -> Result<i32> {
    let dataset_path = args.out.join(DATASET_CSV);
    let dataset = dataset::read_csv(&dataset_path).with_context(|| {
        format!("cannot read {} (run `build-dataset` first)", dataset_path.display())
    })?;

    let plan: FoldPlan = match args.group_split {
        GroupSplit::Row => dataset::kfold_stratified(&dataset, args.k, args.seed)?,
        GroupSplit::Snapshot => dataset::kfold_by_snapshot(&dataset, args.k, args.seed)?,
    };
    let folds = plan.folds();
    let x = dataset.feature_matrix();
    let report = regress::evaluate_all(
        &x,
        &dataset.targets,
        &folds,
        args.k,
        args.seed,
        &dataset.digest(),
    )?;

    let report_path = args.out.join(REPORT_JSON);
    std::fs::write(&report_path, report.to_json())
        .with_context(|| format!("cannot write {}", report_path.display()))?;

    print_report(&report);

    let best = best_kind(&report);
    let model = regress::fit(&ModelSpec::default_for(best, args.seed), &x, &dataset.targets)
        .context("cannot refit the best model on the full dataset")?;
    let saved = SavedModel {
        corpus: load_corpus_if_needed(args, &dataset)?,
        schema: dataset.schema.clone(),
        model,
    };
    let model_path = args.out.join(MODEL_TXT);
    model_file::write_model(&model_path, &saved)
        .with_context(|| format!("cannot write {}", model_path.display()))?;

    println!("report -> {}", report_path.display());
    println!("best model ({}) -> {}", best.name(), model_path.display());
    Ok(0)
}

/// The kind with the lowest mean MAE; earlier entries win ties.
fn best_kind(report: &EvalReport) -> ModelKind {
    let best = report
        .models
        .iter()
        .min_by(|a, b| {
            a.mean_mae_seconds
                .partial_cmp(&b.mean_mae_seconds)
                .expect("MAE values are finite")
        })
        .expect("report covers all model kinds");
    ModelKind::from_name(&best.kind).expect("report kinds are canonical")
}

/// Corpus-dependent schemas need the corpus statistics from
/// `build-dataset` so `predict` can rebuild the same feature pipeline.
fn load_corpus_if_needed(
    args: &Args,
    dataset: &Dataset,
) -> Result<Option<testimate_core::stylometry::CorpusArtifacts>> {
    if !(dataset.schema.enable_ast_tfidf || dataset.schema.enable_embedding) {
        return Ok(None);
    }
    let path = args.out.join(CORPUS_TXT);
    let corpus = model_file::read_corpus(&path).with_context(|| {
        format!(
            "cannot read {} (run `build-dataset --schema {}` first)",
            path.display(),
            dataset.schema.name
        )
    })?;
    Ok(Some(corpus))
}

fn print_report(report: &EvalReport) {
    let rows: Vec<Vec<String>> = report
        .models
        .iter()
        .map(|m| {
            vec![
                m.kind.clone(),
                format!("{:.4}", m.mean_mae_seconds),
                m.relative_mae_percent
                    .map(|v| format!("{v:.2}"))
                    .unwrap_or_else(|| "n/a".to_string()),
            ]
        })
        .collect();
    print!(
        "{}",
        table::render(&["model", "mean MAE (s)", "relative MAE (%)"], &rows)
    );
}
