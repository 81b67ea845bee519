//! One module per subcommand, plus the helpers they share.

pub mod build_dataset;
pub mod collect;
pub mod evaluate;
pub mod extract;
pub mod plot;
pub mod predict;
pub mod preflight;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use testimate_core::ast::{parse_java, Ast, NodeKind};
use testimate_core::astbe::{build_corpus, train_cbow, CbowConfig, SELECTED_KINDS};
use testimate_core::stylometry::{extract_syntactic, CorpusArtifacts, FeatureSchema};

// Artifact file names inside the --out directory. Commands communicate
// through these, so each step can be re-run independently.
pub const FEATURES_CSV: &str = "features.csv";
pub const TIMINGS_CSV: &str = "timings.csv";
pub const DATASET_CSV: &str = "dataset.csv";
pub const CORPUS_TXT: &str = "corpus.txt";
pub const EMBEDDING_CSV: &str = "embedding.csv";
pub const REPORT_JSON: &str = "report.json";
pub const MODEL_TXT: &str = "model.txt";
pub const PREDICTIONS_CSV: &str = "predictions.csv";
pub const CHART_SVG: &str = "chart.svg";

pub fn ensure_out_dir(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)
        .with_context(|| format!("cannot create output directory {}", out.display()))
}

/// Resolves a schema name or fails with the list of valid names.
pub fn schema_by_name(name: &str) -> Result<FeatureSchema> {
    FeatureSchema::by_name(name)
        .ok_or_else(|| anyhow::anyhow!("unknown schema `{name}` (expected `paper13` or `full`)"))
}

/// All `.java` files under `root` as (repository-relative path, absolute
/// path), sorted by relative path so output order never depends on
/// directory-walk order. Hidden directories (`.git` and friends) are
/// skipped.
pub fn java_files(root: &Path) -> Result<Vec<(String, PathBuf)>> {
    let mut files = Vec::new();
    let walker = walkdir::WalkDir::new(root).into_iter().filter_entry(|e| {
        !(e.depth() > 0 && e.file_name().to_string_lossy().starts_with('.'))
    });
    for entry in walker {
        let entry = entry.with_context(|| format!("cannot walk {}", root.display()))?;
        if !entry.file_type().is_file() {
            continue;
        }
        if entry.path().extension().and_then(|e| e.to_str()) != Some("java") {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(root)
            .expect("walked path is under root")
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        files.push((rel, entry.path().to_path_buf()));
    }
    files.sort();
    Ok(files)
}

/// Reads every file as UTF-8 text, warning (on stderr) and skipping files
/// that cannot be read.
pub fn read_sources(files: &[(String, PathBuf)]) -> Vec<(String, String)> {
    let mut sources = Vec::with_capacity(files.len());
    for (rel, path) in files {
        match std::fs::read_to_string(path) {
            Ok(text) => sources.push((rel.clone(), text)),
            Err(err) => eprintln!("warning: skipping {rel}: {err}"),
        }
    }
    sources
}

/// Corpus statistics over a set of parsed files: document frequencies
/// always, plus trained node-kind embeddings when the schema wants them.
/// Files that fail to parse are reported and left out.
pub fn build_corpus_artifacts(
    sources: &[(String, String)],
    schema: &FeatureSchema,
    seed: u64,
) -> Result<CorpusArtifacts> {
    let mut asts: Vec<Ast> = Vec::new();
    let mut kind_counts: Vec<BTreeMap<NodeKind, u64>> = Vec::new();
    for (rel, text) in sources {
        match parse_java(text) {
            Ok(ast) => {
                kind_counts.push(extract_syntactic(&ast).kind_counts);
                asts.push(ast);
            }
            Err(err) => eprintln!("warning: corpus skips {rel}: {err}"),
        }
    }
    let mut corpus = CorpusArtifacts::from_kind_counts(&kind_counts);
    if schema.enable_embedding {
        let sequences = build_corpus(&asts, &SELECTED_KINDS);
        let config = CbowConfig { seed, ..CbowConfig::default() };
        let matrix = train_cbow(&sequences, &config)
            .context("cannot train node-kind embeddings for this corpus")?;
        corpus.embedding = Some(matrix);
    }
    Ok(corpus)
}
