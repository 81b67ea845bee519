//! `extract`: compute stylometric features for every Java file in the
//! working tree or in one configured snapshot, writing `features.csv`.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use testimate_core::ast;
use testimate_core::harness::{self, RunConfig};
use testimate_core::stylometry::{extract_file, FeatureSchema, FeatureVector};

use super::{
    build_corpus_artifacts, ensure_out_dir, java_files, read_sources, schema_by_name,
    FEATURES_CSV,
};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Measurement config file (repository path, snapshots, commands).
    #[arg(long)]
    pub config: PathBuf,
    /// Feature schema: `paper13` or `full`.
    #[arg(long, default_value = "paper13")]
    pub schema: String,
    /// Directory that receives the artifacts.
    #[arg(long)]
    pub out: PathBuf,
    /// Extract from this configured snapshot instead of the working tree.
    #[arg(long)]
    pub snapshot: Option<String>,
    /// Also write each file's syntax tree under `<out>/ast/`.
    #[arg(long)]
    pub dump_ast: bool,
}

pub fn run(args: &Args) -> Result<i32> {
    let config = harness::read_config(&args.config)
        .with_context(|| format!("cannot load config {}", args.config.display()))?;
    let schema = schema_by_name(&args.schema)?;
    ensure_out_dir(&args.out)?;

    // (label for the snapshot column, file sources) for the requested tree.
    let (snapshot_label, sources) = match &args.snapshot {
        Some(id) => (id.clone(), snapshot_sources(&config, id)?),
        None => {
            let files = java_files(&config.repo_path)?;
            ("worktree".to_string(), read_sources(&files))
        }
    };
    if sources.is_empty() {
        bail!("no Java source files found under {}", config.repo_path.display());
    }

    // Corpus-dependent columns (tf-idf, embeddings) are computed against
    // the extraction set itself.
    let corpus = if schema.enable_ast_tfidf || schema.enable_embedding {
        Some(build_corpus_artifacts(&sources, &schema, 42)?)
    } else {
        None
    };

    let mut vectors: Vec<FeatureVector> = Vec::new();
    let mut skipped = 0usize;
    for (rel, text) in &sources {
        match extract_file(text, rel, &schema, corpus.as_ref()) {
            Ok(vector) => {
                if args.dump_ast {
                    dump_ast_file(&args.out, rel, text)?;
                }
                vectors.push(vector);
            }
            Err(err) => {
                eprintln!("warning: skipping {rel}: {err}");
                skipped += 1;
            }
        }
    }
    if vectors.is_empty() {
        bail!("none of the {} Java files could be processed", sources.len());
    }

    let csv_path = args.out.join(FEATURES_CSV);
    write_features_csv(&csv_path, &schema, &snapshot_label, &vectors)?;
    println!(
        "extracted {} files ({skipped} skipped) at snapshot `{snapshot_label}` -> {}",
        vectors.len(),
        csv_path.display()
    );
    Ok(0)
}

/// Checks out the configured snapshot (restoring the original head
/// afterwards) and reads all Java sources from it.
fn snapshot_sources(config: &RunConfig, id: &str) -> Result<Vec<(String, String)>> {
    let snapshot = config
        .snapshots
        .iter()
        .find(|s| s.id == id)
        .ok_or_else(|| anyhow::anyhow!("snapshot `{id}` is not in the config"))?;
    let single = RunConfig { snapshots: vec![snapshot.clone()], ..config.clone() };
    let mut results = harness::walk_history(&single, |_, repo| {
        let files = java_files(repo).map_err(|e| e.to_string())?;
        Ok(read_sources(&files))
    })?;
    let (_, outcome) = results.pop().expect("one snapshot walked");
    outcome.with_context(|| format!("cannot read snapshot `{id}`"))
}

fn write_features_csv(
    path: &Path,
    schema: &FeatureSchema,
    snapshot: &str,
    vectors: &[FeatureVector],
) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    let mut header = vec!["file".to_string(), "snapshot".to_string()];
    header.extend(schema.column_names().iter().map(|c| c.to_string()));
    writer.write_record(&header)?;
    for vector in vectors {
        let mut record = vec![vector.file_path.clone(), snapshot.to_string()];
        record.extend(vector.values.iter().map(f64::to_string));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes the file's syntax tree to `<out>/ast/<relative path>.ast`.
fn dump_ast_file(out: &Path, rel: &str, source: &str) -> Result<()> {
    let ast = ast::parse_java(source).expect("extract_file already parsed this source");
    let path = out.join("ast").join(format!("{rel}.ast"));
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("cannot create {}", parent.display()))?;
    }
    std::fs::write(&path, ast::dump(&ast))
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}
