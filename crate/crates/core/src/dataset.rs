//! Tabular dataset assembly: joins per-file feature vectors with
//! snapshot-level timing targets, persists the table as CSV (with a
//! plain-text provenance sidecar), and produces stratified or grouped
//! k-fold split plans.

use std::collections::BTreeMap;
use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::harness::TimingRecord;
use crate::stylometry::{FeatureSchema, FeatureVector};

/// One observation: a file at a snapshot, with its feature values.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRow {
    pub file_path: String,
    pub snapshot: String,
    /// Aligned with the schema's columns.
    pub values: Vec<f64>,
}

/// The assembled table: one row per (file, snapshot), each with its
/// snapshot's measured test time as the target.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub schema: FeatureSchema,
    pub rows: Vec<DatasetRow>,
    /// `Test(sec)` values aligned with `rows`.
    pub targets: Vec<f64>,
    /// Run metadata (config digest, timestamps); persisted in the `.meta`
    /// sidecar, never in the CSV itself.
    pub provenance: BTreeMap<String, String>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Feature matrix view for model fitting.
    pub fn feature_matrix(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.values.clone()).collect()
    }

    /// SHA-256 of the canonical CSV serialization, hex-encoded. Stable
    /// across runs because the CSV bytes are.
    pub fn digest(&self) -> String {
        let text = csv_text(self).expect("in-memory CSV serialization cannot fail");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// A k-fold assignment aligned with a dataset's rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    /// `assignments[row]` is that row's test fold, in `0..k`.
    pub assignments: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    /// Row indices assigned to `fold`.
    pub fn test_rows(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| f == fold)
            .map(|(i, _)| i)
            .collect()
    }

    /// All folds' test rows, in fold order — the shape cross-validation
    /// consumes.
    pub fn folds(&self) -> Vec<Vec<usize>> {
        (0..self.k).map(|f| self.test_rows(f)).collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AssembleError {
    #[error("snapshot `{0}` has features but no timing record")]
    MissingTiming(String),
    #[error("feature vector {file} in `{snapshot}` uses schema `{got}`, expected `{expected}`")]
    SchemaMismatch { file: String, snapshot: String, expected: String, got: String },
    #[error("non-finite feature value for {file} in `{snapshot}`")]
    NonFiniteValue { file: String, snapshot: String },
    #[error("duplicate row for {file} in `{snapshot}`")]
    DuplicateRow { file: String, snapshot: String },
}

#[derive(Debug, thiserror::Error)]
pub enum DatasetCsvError {
    #[error("dataset CSV: {0}")]
    Io(#[from] std::io::Error),
    #[error("dataset CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("dataset CSV header does not match any known schema: {0}")]
    SchemaMismatch(String),
    #[error("dataset CSV row {row}: {message}")]
    Field { row: usize, message: String },
}

#[derive(Debug, thiserror::Error)]
pub enum SplitError {
    #[error("cannot split {rows} rows into {k} folds")]
    TooFewRows { k: usize, rows: usize },
    #[error("cannot split {groups} groups into {k} folds")]
    TooFewGroups { k: usize, groups: usize },
    #[error("k must be at least 2, got {0}")]
    InvalidK(usize),
}

/// Join features and timings into one row per (file, snapshot). Rows are
/// ordered by snapshot id, then by the feature list's own order; every
/// row's target is its snapshot's measured `test_seconds`. Snapshots
/// whose timing failed (non-zero exit) or that produced no feature
/// vectors are excluded with a warning; a snapshot with features but no
/// timing record at all is an error.
pub fn assemble(
    features_by_snapshot: &BTreeMap<String, Vec<FeatureVector>>,
    timings: &BTreeMap<String, TimingRecord>,
    schema: &FeatureSchema,
) -> Result<(Dataset, Vec<String>), AssembleError> {
    let mut rows = Vec::new();
    let mut targets = Vec::new();
    let mut warnings = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (snapshot, vectors) in features_by_snapshot {
        let timing = timings
            .get(snapshot)
            .ok_or_else(|| AssembleError::MissingTiming(snapshot.clone()))?;
        if timing.exit_status != 0 {
            warnings.push(format!(
                "excluding snapshot `{snapshot}`: timing run exited with status {}",
                timing.exit_status
            ));
            continue;
        }
        if vectors.is_empty() {
            warnings.push(format!("excluding snapshot `{snapshot}`: no parseable files"));
            continue;
        }
        for vector in vectors {
            if vector.schema != schema.name {
                return Err(AssembleError::SchemaMismatch {
                    file: vector.file_path.clone(),
                    snapshot: snapshot.clone(),
                    expected: schema.name.clone(),
                    got: vector.schema.clone(),
                });
            }
            if vector.values.iter().any(|v| !v.is_finite()) || !timing.test_seconds.is_finite() {
                return Err(AssembleError::NonFiniteValue {
                    file: vector.file_path.clone(),
                    snapshot: snapshot.clone(),
                });
            }
            if !seen.insert((vector.file_path.clone(), snapshot.clone())) {
                return Err(AssembleError::DuplicateRow {
                    file: vector.file_path.clone(),
                    snapshot: snapshot.clone(),
                });
            }
            rows.push(DatasetRow {
                file_path: vector.file_path.clone(),
                snapshot: snapshot.clone(),
                values: vector.values.clone(),
            });
            targets.push(timing.test_seconds);
        }
    }
    let dataset = Dataset {
        schema: schema.clone(),
        rows,
        targets,
        provenance: BTreeMap::new(),
    };
    Ok((dataset, warnings))
}

/// Collapse each snapshot to a single row whose features are the column
/// means of that snapshot's files (the target is shared already). The
/// file column becomes `*`.
pub fn aggregate_by_snapshot(dataset: &Dataset) -> Dataset {
    let mut by_snapshot: BTreeMap<&str, (Vec<f64>, f64, usize)> = BTreeMap::new();
    let width = dataset.schema.columns.len();
    for (row, &target) in dataset.rows.iter().zip(&dataset.targets) {
        let entry = by_snapshot
            .entry(row.snapshot.as_str())
            .or_insert_with(|| (vec![0.0; width], target, 0));
        for (sum, v) in entry.0.iter_mut().zip(&row.values) {
            *sum += v;
        }
        entry.2 += 1;
    }
    let mut rows = Vec::with_capacity(by_snapshot.len());
    let mut targets = Vec::with_capacity(by_snapshot.len());
    for (snapshot, (sums, target, count)) in by_snapshot {
        rows.push(DatasetRow {
            file_path: "*".to_string(),
            snapshot: snapshot.to_string(),
            values: sums.iter().map(|s| s / count as f64).collect(),
        });
        targets.push(target);
    }
    Dataset {
        schema: dataset.schema.clone(),
        rows,
        targets,
        provenance: dataset.provenance.clone(),
    }
}

// ----- CSV persistence ---------------------------------------------------------

fn expected_header(schema: &FeatureSchema) -> Vec<String> {
    let mut header = vec!["file".to_string(), "snapshot".to_string()];
    header.extend(schema.column_names().iter().map(|n| n.to_string()));
    header.push("Test(sec)".to_string());
    header
}

/// The dataset's canonical CSV bytes: header then one row per
/// observation, RFC-4180 quoting, `\n` line endings, floats in Rust's
/// shortest round-trip notation.
fn csv_text(dataset: &Dataset) -> Result<String, csv::Error> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(expected_header(&dataset.schema))?;
    for (row, target) in dataset.rows.iter().zip(&dataset.targets) {
        let mut record = Vec::with_capacity(row.values.len() + 3);
        record.push(row.file_path.clone());
        record.push(row.snapshot.clone());
        record.extend(row.values.iter().map(|v| v.to_string()));
        record.push(target.to_string());
        writer.write_record(&record)?;
    }
    let bytes = writer.into_inner().expect("vec writer cannot fail to flush");
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

/// Write the dataset CSV plus a `<path>.meta` sidecar holding the
/// provenance as `key = value` lines. Timestamps belong in the sidecar
/// so the CSV itself stays byte-identical across reruns.
pub fn write_csv(dataset: &Dataset, path: &Path) -> Result<(), DatasetCsvError> {
    std::fs::write(path, csv_text(dataset)?)?;
    let mut meta = String::new();
    for (key, value) in &dataset.provenance {
        meta.push_str(&format!("{key} = {value}\n"));
    }
    std::fs::write(meta_path(path), meta)?;
    Ok(())
}

fn meta_path(path: &Path) -> std::path::PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta");
    path.with_file_name(name)
}

/// Read a dataset CSV written by [`write_csv`], inferring the schema
/// from the header (it must match one of the known schemas exactly).
pub fn read_csv(path: &Path) -> Result<Dataset, DatasetCsvError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_path(path)?;
    let mut records = reader.records();
    let header = records.next().transpose()?.ok_or_else(|| {
        DatasetCsvError::SchemaMismatch("file is empty".to_string())
    })?;
    let got: Vec<String> = header.iter().map(str::to_string).collect();
    let schema = [FeatureSchema::paper13(), FeatureSchema::full()]
        .into_iter()
        .find(|s| expected_header(s) == got)
        .ok_or_else(|| {
            DatasetCsvError::SchemaMismatch(format!("header starts `{}`", got.join(",")))
        })?;

    let width = schema.columns.len();
    let mut rows = Vec::new();
    let mut targets = Vec::new();
    for (index, record) in records.enumerate() {
        let record = record?;
        let row_no = index + 2; // header is row 1
        if record.len() != width + 3 {
            return Err(DatasetCsvError::Field {
                row: row_no,
                message: format!("expected {} fields, got {}", width + 3, record.len()),
            });
        }
        let number = |i: usize| -> Result<f64, DatasetCsvError> {
            let raw = record.get(i).unwrap_or("");
            let value: f64 = raw.parse().map_err(|_| DatasetCsvError::Field {
                row: row_no,
                message: format!("unparseable number `{raw}`"),
            })?;
            if !value.is_finite() {
                return Err(DatasetCsvError::Field {
                    row: row_no,
                    message: format!("non-finite value `{raw}`"),
                });
            }
            Ok(value)
        };
        let values = (2..2 + width).map(number).collect::<Result<Vec<f64>, _>>()?;
        rows.push(DatasetRow {
            file_path: record.get(0).unwrap_or("").to_string(),
            snapshot: record.get(1).unwrap_or("").to_string(),
            values,
        });
        targets.push(number(width + 2)?);
    }

    let mut provenance = BTreeMap::new();
    let sidecar = meta_path(path);
    if sidecar.exists() {
        for line in std::fs::read_to_string(&sidecar)?.lines() {
            if let Some((key, value)) = line.split_once('=') {
                provenance.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
    }
    Ok(Dataset { schema, rows, targets, provenance })
}

// ----- fold plans ---------------------------------------------------------------

/// Stratified k-fold assignment for a continuous target: rows are sorted
/// into `min(k, distinct targets)` quantile bins, shuffled within each
/// bin by a seeded generator, and dealt round-robin to folds with one
/// global counter, so fold sizes differ by at most 1.
pub fn kfold_stratified(dataset: &Dataset, k: usize, seed: u64) -> Result<FoldPlan, SplitError> {
    let n = dataset.len();
    if k < 2 {
        return Err(SplitError::InvalidK(k));
    }
    if k > n {
        return Err(SplitError::TooFewRows { k, rows: n });
    }

    // stable order by (target, original index) for reproducible bins
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        dataset.targets[a]
            .partial_cmp(&dataset.targets[b])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut distinct = 1;
    for pair in order.windows(2) {
        if dataset.targets[pair[0]] != dataset.targets[pair[1]] {
            distinct += 1;
        }
    }
    let bins = k.min(distinct);

    // near-equal contiguous chunks of the sorted order are quantile bins
    let base = n / bins;
    let remainder = n % bins;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut assignments = vec![0usize; n];
    let mut start = 0;
    let mut counter = 0usize;
    for bin in 0..bins {
        let size = base + usize::from(bin < remainder);
        let mut members = order[start..start + size].to_vec();
        start += size;
        members.shuffle(&mut rng);
        for row in members {
            assignments[row] = counter % k;
            counter += 1;
        }
    }
    Ok(FoldPlan { k, assignments, seed })
}

/// Grouped k-fold assignment: whole snapshots are shuffled and dealt
/// round-robin, so every row of a snapshot lands in the same fold.
pub fn kfold_by_snapshot(dataset: &Dataset, k: usize, seed: u64) -> Result<FoldPlan, SplitError> {
    if k < 2 {
        return Err(SplitError::InvalidK(k));
    }
    let mut snapshots: Vec<&str> = dataset.rows.iter().map(|r| r.snapshot.as_str()).collect();
    snapshots.sort_unstable();
    snapshots.dedup();
    if k > snapshots.len() {
        return Err(SplitError::TooFewGroups { k, groups: snapshots.len() });
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    snapshots.shuffle(&mut rng);
    let fold_of: BTreeMap<&str, usize> = snapshots
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, i % k))
        .collect();
    let assignments = dataset
        .rows
        .iter()
        .map(|r| fold_of[r.snapshot.as_str()])
        .collect();
    Ok(FoldPlan { k, assignments, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stylometry::FeatureSchema;

    fn vector(schema: &FeatureSchema, file: &str, fill: f64) -> FeatureVector {
        FeatureVector {
            schema: schema.name.clone(),
            file_path: file.to_string(),
            values: vec![fill; schema.columns.len()],
            raw_counts: BTreeMap::new(),
            file_length_chars: 100,
        }
    }

    fn timing(snapshot: &str, test_seconds: f64, exit_status: i32) -> TimingRecord {
        TimingRecord {
            snapshot: snapshot.to_string(),
            build_seconds: 1.0,
            test_seconds,
            per_test_seconds: None,
            repetition_values: vec![test_seconds],
            exit_status,
            warnings: Vec::new(),
        }
    }

    fn toy_dataset(files: usize, snapshots: usize) -> Dataset {
        let schema = FeatureSchema::paper13();
        let mut features = BTreeMap::new();
        let mut timings = BTreeMap::new();
        for s in 0..snapshots {
            let id = format!("snap{s}");
            let vectors: Vec<FeatureVector> = (0..files)
                .map(|f| vector(&schema, &format!("src/File{f}.java"), f as f64 + s as f64 / 10.0))
                .collect();
            timings.insert(id.clone(), timing(&id, 10.0 + s as f64, 0));
            features.insert(id, vectors);
        }
        let (dataset, warnings) = assemble(&features, &timings, &schema).unwrap();
        assert!(warnings.is_empty());
        dataset
    }

    // --- assemble ---

    #[test]
    fn assemble_fans_out_files_by_snapshots() {
        let dataset = toy_dataset(42, 5);
        assert_eq!(dataset.len(), 210);
        // every row of a snapshot carries that snapshot's test time
        for (row, &target) in dataset.rows.iter().zip(&dataset.targets) {
            let index: usize = row.snapshot.strip_prefix("snap").unwrap().parse().unwrap();
            assert_eq!(target, 10.0 + index as f64);
        }
    }

    #[test]
    fn assemble_single_file_single_snapshot() {
        let schema = FeatureSchema::paper13();
        let features =
            BTreeMap::from([("only".to_string(), vec![vector(&schema, "A.java", 1.0)])]);
        let timings = BTreeMap::from([("only".to_string(), timing("only", 7.25, 0))]);
        let (dataset, warnings) = assemble(&features, &timings, &schema).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(dataset.len(), 1);
        assert_eq!(dataset.targets, vec![7.25]);
        assert_eq!(dataset.rows[0].file_path, "A.java");
    }

    #[test]
    fn assemble_excludes_failed_timings_with_a_warning() {
        let schema = FeatureSchema::paper13();
        let mut features = BTreeMap::new();
        let mut timings = BTreeMap::new();
        for (id, status) in [("a", 0), ("b", 1), ("c", 0)] {
            features.insert(id.to_string(), vec![vector(&schema, "F.java", 1.0)]);
            timings.insert(id.to_string(), timing(id, 5.0, status));
        }
        let (dataset, warnings) = assemble(&features, &timings, &schema).unwrap();
        assert_eq!(dataset.len(), 2);
        assert!(dataset.rows.iter().all(|r| r.snapshot != "b"));
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains('b'));
    }

    #[test]
    fn assemble_warns_on_snapshot_without_parseable_files() {
        let schema = FeatureSchema::paper13();
        let features = BTreeMap::from([
            ("empty".to_string(), Vec::new()),
            ("full".to_string(), vec![vector(&schema, "F.java", 1.0)]),
        ]);
        let timings = BTreeMap::from([
            ("empty".to_string(), timing("empty", 5.0, 0)),
            ("full".to_string(), timing("full", 5.0, 0)),
        ]);
        let (dataset, warnings) = assemble(&features, &timings, &schema).unwrap();
        assert_eq!(dataset.len(), 1);
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("no parseable files"));
    }

    #[test]
    fn assemble_requires_a_timing_record() {
        let schema = FeatureSchema::paper13();
        let features =
            BTreeMap::from([("lonely".to_string(), vec![vector(&schema, "F.java", 1.0)])]);
        let timings = BTreeMap::new();
        match assemble(&features, &timings, &schema) {
            Err(AssembleError::MissingTiming(s)) => assert_eq!(s, "lonely"),
            other => panic!("expected MissingTiming, got {other:?}"),
        }
    }

    #[test]
    fn assemble_rejects_duplicates_and_schema_drift() {
        let schema = FeatureSchema::paper13();
        let duplicated = vec![vector(&schema, "F.java", 1.0), vector(&schema, "F.java", 2.0)];
        let features = BTreeMap::from([("a".to_string(), duplicated)]);
        let timings = BTreeMap::from([("a".to_string(), timing("a", 5.0, 0))]);
        assert!(matches!(
            assemble(&features, &timings, &schema),
            Err(AssembleError::DuplicateRow { .. })
        ));

        let mut foreign = vector(&schema, "F.java", 1.0);
        foreign.schema = "full".to_string();
        let features = BTreeMap::from([("a".to_string(), vec![foreign])]);
        assert!(matches!(
            assemble(&features, &timings, &schema),
            Err(AssembleError::SchemaMismatch { .. })
        ));
    }

    // --- CSV ---

    #[test]
    fn csv_round_trips_bit_for_bit() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dataset.csv");
        let mut dataset = toy_dataset(3, 2);
        dataset
            .provenance
            .insert("config_digest".to_string(), "abc".to_string());
        write_csv(&dataset, &path).unwrap();
        let back = read_csv(&path).unwrap();
        assert_eq!(back, dataset);
        // writing the read-back dataset reproduces identical bytes
        let second = dir.path().join("again.csv");
        write_csv(&back, &second).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&second).unwrap()
        );
    }

    #[test]
    fn csv_header_and_line_count() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dataset.csv");
        let dataset = toy_dataset(42, 5);
        write_csv(&dataset, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("file,snapshot,lex_imports,"));
        assert!(header.ends_with(",Test(sec)"));
        assert_eq!(header.split(',').count(), 2 + 13 + 1);
        // 210 rows → 211 lines, each `\n`-terminated
        assert_eq!(text.lines().count(), 211);
        assert!(text.ends_with('\n'));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn csv_quotes_fields_with_commas() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dataset.csv");
        let mut dataset = toy_dataset(1, 1);
        dataset.rows[0].file_path = "weird,name.java".to_string();
        write_csv(&dataset, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"weird,name.java\""));
        let back = read_csv(&path).unwrap();
        assert_eq!(back.rows[0].file_path, "weird,name.java");
    }

    #[test]
    fn csv_rejects_shuffled_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dataset.csv");
        let dataset = toy_dataset(2, 1);
        write_csv(&dataset, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let shuffled = text.replacen("file,snapshot", "snapshot,file", 1);
        std::fs::write(&path, shuffled).unwrap();
        assert!(matches!(read_csv(&path), Err(DatasetCsvError::SchemaMismatch(_))));
    }

    #[test]
    fn csv_reports_bad_values_with_row_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dataset.csv");
        let dataset = toy_dataset(2, 1);
        write_csv(&dataset, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        let mut broken = lines.clone();
        // corrupt the first feature cell of the second data row
        let mut cells: Vec<&str> = lines[2].split(',').collect();
        cells[2] = "zero";
        let tampered = cells.join(",");
        broken[2] = &tampered;
        std::fs::write(&path, broken.join("\n") + "\n").unwrap();
        match read_csv(&path) {
            Err(DatasetCsvError::Field { row, .. }) => assert_eq!(row, 3),
            other => panic!("expected a field error, got {other:?}"),
        }
    }

    #[test]
    fn digest_is_stable_and_content_sensitive() {
        let dataset = toy_dataset(3, 2);
        let a = dataset.digest();
        assert_eq!(a, dataset.digest());
        assert_eq!(a.len(), 64);
        let mut changed = dataset.clone();
        changed.targets[0] += 0.001;
        assert_ne!(a, changed.digest());
        // provenance is not part of the digest (it lives in the sidecar)
        let mut stamped = dataset.clone();
        stamped.provenance.insert("created".to_string(), "now".to_string());
        assert_eq!(a, stamped.digest());
    }

    // --- stratified folds ---

    #[test]
    fn kfold_even_split_with_distinct_targets() {
        let mut dataset = toy_dataset(10, 1);
        dataset.targets = (0..10).map(|i| i as f64).collect();
        let plan = kfold_stratified(&dataset, 5, 42).unwrap();
        assert_eq!(plan.fold_sizes(), vec![2, 2, 2, 2, 2]);
    }

    #[test]
    fn kfold_210_rows_balances_sizes_and_means() {
        let dataset = toy_dataset(42, 5);
        let plan = kfold_stratified(&dataset, 10, 42).unwrap();
        assert_eq!(plan.fold_sizes(), vec![21; 10]);
        let global: f64 = dataset.targets.iter().sum::<f64>() / 210.0;
        for fold in 0..10 {
            let rows = plan.test_rows(fold);
            let mean: f64 =
                rows.iter().map(|&r| dataset.targets[r]).sum::<f64>() / rows.len() as f64;
            let deviation = (mean - global).abs() / global;
            assert!(deviation <= 0.10, "fold {fold} mean {mean} vs global {global}");
        }
    }

    #[test]
    fn kfold_constant_target_still_balances() {
        let mut dataset = toy_dataset(11, 1);
        dataset.targets = vec![4.0; 11];
        let plan = kfold_stratified(&dataset, 3, 1).unwrap();
        let sizes = plan.fold_sizes();
        assert_eq!(sizes.iter().sum::<usize>(), 11);
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    #[test]
    fn kfold_is_deterministic_per_seed() {
        let dataset = toy_dataset(20, 3);
        let a = kfold_stratified(&dataset, 4, 7).unwrap();
        let b = kfold_stratified(&dataset, 4, 7).unwrap();
        assert_eq!(a, b);
        let c = kfold_stratified(&dataset, 4, 8).unwrap();
        assert_ne!(a.assignments, c.assignments);
    }

    #[test]
    fn kfold_rejects_bad_k() {
        let dataset = toy_dataset(3, 1);
        assert!(matches!(kfold_stratified(&dataset, 1, 0), Err(SplitError::InvalidK(1))));
        assert!(matches!(
            kfold_stratified(&dataset, 4, 0),
            Err(SplitError::TooFewRows { k: 4, rows: 3 })
        ));
    }

    // --- grouped folds ---

    #[test]
    fn grouped_folds_keep_snapshots_together() {
        let dataset = toy_dataset(6, 4);
        let plan = kfold_by_snapshot(&dataset, 2, 9).unwrap();
        let mut fold_of = BTreeMap::new();
        for (row, &fold) in dataset.rows.iter().zip(&plan.assignments) {
            let previous = fold_of.insert(row.snapshot.clone(), fold);
            if let Some(previous) = previous {
                assert_eq!(previous, fold, "snapshot {} split across folds", row.snapshot);
            }
        }
        // 4 snapshots over 2 folds → 2 each
        let sizes = plan.fold_sizes();
        assert_eq!(sizes, vec![12, 12]);
    }

    #[test]
    fn grouped_folds_need_enough_groups() {
        let dataset = toy_dataset(6, 2);
        assert!(matches!(
            kfold_by_snapshot(&dataset, 3, 0),
            Err(SplitError::TooFewGroups { k: 3, groups: 2 })
        ));
    }

    // --- aggregation ---

    #[test]
    fn aggregate_means_features_per_snapshot() {
        let schema = FeatureSchema::paper13();
        let width = schema.columns.len();
        let mut features = BTreeMap::new();
        features.insert(
            "s1".to_string(),
            vec![
                FeatureVector {
                    schema: schema.name.clone(),
                    file_path: "A.java".to_string(),
                    values: vec![1.0; width],
                    raw_counts: BTreeMap::new(),
                    file_length_chars: 10,
                },
                FeatureVector {
                    schema: schema.name.clone(),
                    file_path: "B.java".to_string(),
                    values: vec![3.0; width],
                    raw_counts: BTreeMap::new(),
                    file_length_chars: 10,
                },
            ],
        );
        let timings = BTreeMap::from([("s1".to_string(), timing("s1", 6.0, 0))]);
        let (dataset, _) = assemble(&features, &timings, &schema).unwrap();
        let aggregated = aggregate_by_snapshot(&dataset);
        assert_eq!(aggregated.len(), 1);
        assert_eq!(aggregated.rows[0].file_path, "*");
        assert!(aggregated.rows[0].values.iter().all(|&v| v == 2.0));
        assert_eq!(aggregated.targets, vec![6.0]);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn folds_partition_rows_exactly(
                n in 4usize..120,
                k in 2usize..8,
                seed in 0u64..1000,
            ) {
                prop_assume!(k <= n);
                let mut dataset = toy_dataset(n, 1);
                let mut rng = ChaCha20Rng::seed_from_u64(seed);
                dataset.targets = (0..n).map(|_| rng.random_range(1.0..100.0)).collect();
                let plan = kfold_stratified(&dataset, k, seed).unwrap();
                // union of test folds is all rows, each exactly once
                let mut all: Vec<usize> = plan.folds().into_iter().flatten().collect();
                all.sort_unstable();
                prop_assert_eq!(all, (0..n).collect::<Vec<usize>>());
                let sizes = plan.fold_sizes();
                prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            }

            #[test]
            fn assemble_row_count_is_sum_of_file_counts(
                counts in proptest::collection::vec(0usize..6, 1..5)
            ) {
                let schema = FeatureSchema::paper13();
                let mut features = BTreeMap::new();
                let mut timings = BTreeMap::new();
                for (s, &count) in counts.iter().enumerate() {
                    let id = format!("s{s}");
                    let vectors: Vec<FeatureVector> = (0..count)
                        .map(|f| vector(&schema, &format!("F{f}.java"), f as f64))
                        .collect();
                    timings.insert(id.clone(), timing(&id, 1.0, 0));
                    features.insert(id, vectors);
                }
                let (dataset, _) = assemble(&features, &timings, &schema).unwrap();
                prop_assert_eq!(dataset.len(), counts.iter().sum::<usize>());
            }
        }
    }
}
