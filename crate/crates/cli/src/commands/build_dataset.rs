//! `build-dataset`: join per-file features across snapshots with measured
//! test times into `dataset.csv` (plus its provenance sidecar).

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};
use testimate_core::astbe::write_embedding_csv;
use testimate_core::dataset;
use testimate_core::harness::{self, TimingRecord};
use testimate_core::stylometry::{extract_file, FeatureVector};

use crate::model_file;

use super::{
    build_corpus_artifacts, ensure_out_dir, java_files, read_sources, schema_by_name,
    CORPUS_TXT, DATASET_CSV, EMBEDDING_CSV, TIMINGS_CSV,
};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Measurement config file (repository path, snapshots, commands).
    #[arg(long)]
    pub config: PathBuf,
    /// Feature schema: `paper13` or `full`.
    #[arg(long, default_value = "paper13")]
    pub schema: String,
    /// Seed for embedding training.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Directory that receives the artifacts.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &Args) -> Result<i32> {
    let config = harness::read_config(&args.config)
        .with_context(|| format!("cannot load config {}", args.config.display()))?;
    let schema = schema_by_name(&args.schema)?;
    ensure_out_dir(&args.out)?;

    let timings_path = args.out.join(TIMINGS_CSV);
    let timings: BTreeMap<String, TimingRecord> = harness::read_timings_csv(&timings_path)
        .with_context(|| {
            format!("cannot read {} (run `collect` first)", timings_path.display())
        })?
        .into_iter()
        .map(|r| (r.snapshot.clone(), r))
        .collect();

    // Pull every snapshot's Java sources in one history walk.
    let results = harness::walk_history(&config, |_, repo| {
        let files = java_files(repo).map_err(|e| e.to_string())?;
        Ok(read_sources(&files))
    })?;
    let mut sources_by_snapshot: Vec<(String, Vec<(String, String)>)> = Vec::new();
    for (snapshot, outcome) in results {
        match outcome {
            Ok(sources) => sources_by_snapshot.push((snapshot.id, sources)),
            Err(err) => eprintln!("warning: snapshot `{}` skipped: {err}", snapshot.id),
        }
    }
    if sources_by_snapshot.is_empty() {
        bail!("no snapshot could be read");
    }

    // Corpus statistics span every file of every snapshot, so tf-idf and
    // embedding columns are comparable across rows.
    let corpus = if schema.enable_ast_tfidf || schema.enable_embedding {
        let all: Vec<(String, String)> = sources_by_snapshot
            .iter()
            .flat_map(|(snap, sources)| {
                sources.iter().map(move |(rel, text)| {
                    (format!("{snap}:{rel}"), text.clone())
                })
            })
            .collect();
        Some(build_corpus_artifacts(&all, &schema, args.seed)?)
    } else {
        None
    };

    let mut features_by_snapshot: BTreeMap<String, Vec<FeatureVector>> = BTreeMap::new();
    for (snapshot, sources) in &sources_by_snapshot {
        let mut vectors = Vec::with_capacity(sources.len());
        for (rel, text) in sources {
            match extract_file(text, rel, &schema, corpus.as_ref()) {
                Ok(vector) => vectors.push(vector),
                Err(err) => eprintln!("warning: snapshot `{snapshot}`: skipping {rel}: {err}"),
            }
        }
        features_by_snapshot.insert(snapshot.clone(), vectors);
    }

    let (mut dataset, warnings) = dataset::assemble(&features_by_snapshot, &timings, &schema)?;
    for warning in &warnings {
        eprintln!("warning: {warning}");
    }
    if dataset.is_empty() {
        bail!("the joined dataset has no rows");
    }
    dataset.provenance = provenance(args)?;

    let csv_path = args.out.join(DATASET_CSV);
    dataset::write_csv(&dataset, &csv_path)
        .with_context(|| format!("cannot write {}", csv_path.display()))?;
    if let Some(corpus) = &corpus {
        model_file::write_corpus(&args.out.join(CORPUS_TXT), corpus)
            .context("cannot write corpus statistics")?;
        if let Some(matrix) = &corpus.embedding {
            let file = std::fs::File::create(args.out.join(EMBEDDING_CSV))
                .context("cannot write embedding table")?;
            write_embedding_csv(matrix, file)?;
        }
    }

    println!(
        "dataset: {} rows x {} features ({}) -> {}",
        dataset.len(),
        dataset.schema.columns.len(),
        dataset.schema.name,
        csv_path.display()
    );
    println!("digest: {}", dataset.digest());
    Ok(0)
}

/// Provenance for the sidecar: everything needed to trace a dataset back
/// to its inputs. The timestamp lives only here, never in the CSV.
fn provenance(args: &Args) -> Result<BTreeMap<String, String>> {
    let config_bytes = std::fs::read(&args.config)
        .with_context(|| format!("cannot read config {}", args.config.display()))?;
    let created = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .expect("system clock is after 1970")
        .as_secs();
    let mut provenance = BTreeMap::new();
    provenance.insert("schema".to_string(), args.schema.clone());
    provenance.insert("seed".to_string(), args.seed.to_string());
    provenance.insert(
        "config_digest".to_string(),
        hex::encode(Sha256::digest(&config_bytes)),
    );
    provenance.insert("created_unix".to_string(), created.to_string());
    provenance.insert("tool_version".to_string(), env!("CARGO_PKG_VERSION").to_string());
    Ok(provenance)
}
