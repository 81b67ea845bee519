//! Plain-text persistence for trained models and corpus statistics.
//!
//! A model file is line-oriented and self-describing:
//!
//! ```text
//! testimate model v1
//! kind = ridge
//! schema = paper13
//! seed = 42
//! n_features = 13
//! target_mean = 32.5
//! [coefficients]
//! intercept = 1.25
//! weight 0 = 0.5
//! ...
//! [scaler]
//! mean 0 = 10
//! ...
//! sd 0 = 2
//! ...
//! ```
//!
//! Tree models use a `[tree]` section with one `node i = leaf <value>` or
//! `node i = split <feature> <threshold> <left> <right>` line per node;
//! forests declare `forest_trees = N` followed by `[tree 0]` .. `[tree N-1]`
//! sections. Models trained on the full schema append `[corpus]` (document
//! frequencies) and `[embedding]` (node-kind vectors) sections so prediction
//! can rebuild the exact feature pipeline. Floats are written with Rust's
//! shortest round-trip formatting, so parsing restores them bit for bit.
//!
//! A standalone corpus file (`testimate corpus v1`) holds just the
//! `[corpus]` and `[embedding]` sections.

use std::fmt::Write as _;
use std::path::Path;

use testimate_core::ast::NodeKind;
use testimate_core::astbe::{CbowConfig, EmbeddingMatrix, NodeVocabulary};
use testimate_core::regress::{
    FittedParams, ModelKind, ModelSpec, Scaler, TrainedModel, Tree, TreeNode,
};
use testimate_core::stylometry::{CorpusArtifacts, FeatureSchema};
use thiserror::Error;

const MODEL_MAGIC: &str = "testimate model v1";
const CORPUS_MAGIC: &str = "testimate corpus v1";

/// Everything prediction needs: the feature schema, the fitted model, and
/// (for schemas with corpus-dependent columns) the corpus statistics.
#[derive(Debug, Clone)]
pub struct SavedModel {
    pub schema: FeatureSchema,
    pub model: TrainedModel,
    pub corpus: Option<CorpusArtifacts>,
}

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn parse_err(line: usize, message: impl Into<String>) -> ModelFileError {
    ModelFileError::Parse { line, message: message.into() }
}

// ----- serialization --------------------------------------------------------

fn push_kv(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key} = {value}");
}

fn push_coefficients(out: &mut String, weights: &[f64], intercept: f64) {
    out.push_str("[coefficients]\n");
    push_kv(out, "intercept", intercept);
    for (i, w) in weights.iter().enumerate() {
        push_kv(out, &format!("weight {i}"), w);
    }
}

fn push_scaler(out: &mut String, scaler: &Scaler) {
    out.push_str("[scaler]\n");
    for (i, m) in scaler.means.iter().enumerate() {
        push_kv(out, &format!("mean {i}"), m);
    }
    for (i, s) in scaler.sds.iter().enumerate() {
        push_kv(out, &format!("sd {i}"), s);
    }
}

fn push_tree_nodes(out: &mut String, tree: &Tree) {
    for (i, node) in tree.nodes().iter().enumerate() {
        match node {
            TreeNode::Leaf { value } => {
                let _ = writeln!(out, "node {i} = leaf {value}");
            }
            TreeNode::Split { feature, threshold, left, right } => {
                let _ = writeln!(out, "node {i} = split {feature} {threshold} {left} {right}");
            }
        }
    }
}

fn push_corpus_sections(out: &mut String, corpus: &CorpusArtifacts) {
    out.push_str("[corpus]\n");
    push_kv(out, "files", corpus.n_files);
    for (kind, idf) in NodeKind::ALL.iter().zip(&corpus.idf) {
        push_kv(out, &format!("idf {}", kind.name()), idf);
    }
    if let Some(matrix) = &corpus.embedding {
        out.push_str("[embedding]\n");
        push_kv(out, "dim", matrix.config.embedding_dim);
        for (kind, row) in matrix.vocabulary.kinds.iter().zip(&matrix.input_vectors) {
            let values: Vec<String> = row.iter().map(f64::to_string).collect();
            let _ = writeln!(out, "vector {} = {}", kind.name(), values.join(" "));
        }
    }
}

/// Serializes a saved model to the documented text format.
pub fn serialize_model(saved: &SavedModel) -> String {
    let mut out = String::new();
    out.push_str(MODEL_MAGIC);
    out.push('\n');
    push_kv(&mut out, "kind", saved.model.spec.kind.name());
    push_kv(&mut out, "schema", &saved.schema.name);
    push_kv(&mut out, "seed", saved.model.spec.seed);
    push_kv(&mut out, "n_features", saved.model.n_features);
    push_kv(&mut out, "target_mean", saved.model.target_mean);
    match &saved.model.params {
        FittedParams::Linear { weights, intercept } => {
            push_coefficients(&mut out, weights, *intercept);
        }
        FittedParams::Scaled { weights, intercept, scaler } => {
            push_coefficients(&mut out, weights, *intercept);
            push_scaler(&mut out, scaler);
        }
        FittedParams::Tree { tree } => {
            out.push_str("[tree]\n");
            push_tree_nodes(&mut out, tree);
        }
        FittedParams::Forest { trees } => {
            push_kv(&mut out, "forest_trees", trees.len());
            for (i, tree) in trees.iter().enumerate() {
                let _ = writeln!(out, "[tree {i}]");
                push_tree_nodes(&mut out, tree);
            }
        }
    }
    if let Some(corpus) = &saved.corpus {
        push_corpus_sections(&mut out, corpus);
    }
    out
}

/// Serializes corpus statistics alone (the `corpus.txt` artifact).
pub fn serialize_corpus(corpus: &CorpusArtifacts) -> String {
    let mut out = String::new();
    out.push_str(CORPUS_MAGIC);
    out.push('\n');
    push_corpus_sections(&mut out, corpus);
    out
}

// ----- parsing --------------------------------------------------------------

/// Cursor over non-blank lines, remembering 1-based line numbers for errors.
struct Cursor<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        Cursor { lines, pos: 0 }
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.lines.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let item = self.peek();
        if item.is_some() {
            self.pos += 1;
        }
        item
    }

    /// Line number to blame when input ends unexpectedly.
    fn eof_line(&self) -> usize {
        self.lines.last().map(|(n, _)| *n).unwrap_or(0)
    }

    /// Consumes the next line, requiring `key = value`, and returns the value.
    fn expect_kv(&mut self, key: &str) -> Result<(usize, &'a str), ModelFileError> {
        let eof = self.eof_line();
        let (line, text) = self
            .next()
            .ok_or_else(|| parse_err(eof, format!("expected `{key} = ...`, found end of file")))?;
        let (k, v) = text
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("expected `{key} = ...`, found `{text}`")))?;
        if k.trim() != key {
            return Err(parse_err(
                line,
                format!("expected `{key} = ...`, found `{}`", k.trim()),
            ));
        }
        Ok((line, v.trim()))
    }

    /// Consumes `key = value` lines while the next line starts with `prefix `,
    /// returning the parsed values in order. Indices must count 0, 1, 2, ...
    fn indexed_floats(&mut self, prefix: &str) -> Result<Vec<f64>, ModelFileError> {
        let mut values = Vec::new();
        while let Some((line, text)) = self.peek() {
            let Some(rest) = text.strip_prefix(prefix) else { break };
            let Some(rest) = rest.strip_prefix(' ') else { break };
            self.pos += 1;
            let (idx_text, value_text) = rest
                .split_once('=')
                .ok_or_else(|| parse_err(line, format!("expected `{prefix} <i> = <value>`")))?;
            let idx: usize = idx_text
                .trim()
                .parse()
                .map_err(|_| parse_err(line, format!("bad {prefix} index `{}`", idx_text.trim())))?;
            if idx != values.len() {
                return Err(parse_err(
                    line,
                    format!("{prefix} indices must count upward; expected {} got {idx}", values.len()),
                ));
            }
            values.push(parse_float(line, value_text.trim())?);
        }
        Ok(values)
    }
}

fn parse_float(line: usize, text: &str) -> Result<f64, ModelFileError> {
    text.parse::<f64>()
        .map_err(|_| parse_err(line, format!("bad number `{text}`")))
}

fn parse_usize(line: usize, text: &str) -> Result<usize, ModelFileError> {
    text.parse::<usize>()
        .map_err(|_| parse_err(line, format!("bad integer `{text}`")))
}

fn parse_tree_nodes(cursor: &mut Cursor<'_>) -> Result<Tree, ModelFileError> {
    let mut nodes = Vec::new();
    let mut last_line = cursor.eof_line();
    while let Some((line, text)) = cursor.peek() {
        if !text.starts_with("node ") {
            break;
        }
        cursor.pos += 1;
        last_line = line;
        let rest = &text["node ".len()..];
        let (idx_text, value_text) = rest
            .split_once('=')
            .ok_or_else(|| parse_err(line, "expected `node <i> = ...`"))?;
        let idx = parse_usize(line, idx_text.trim())?;
        if idx != nodes.len() {
            return Err(parse_err(
                line,
                format!("node indices must count upward; expected {} got {idx}", nodes.len()),
            ));
        }
        let parts: Vec<&str> = value_text.split_whitespace().collect();
        let node = match parts.as_slice() {
            ["leaf", value] => TreeNode::Leaf { value: parse_float(line, value)? },
            ["split", feature, threshold, left, right] => TreeNode::Split {
                feature: parse_usize(line, feature)?,
                threshold: parse_float(line, threshold)?,
                left: parse_usize(line, left)?,
                right: parse_usize(line, right)?,
            },
            _ => {
                return Err(parse_err(
                    line,
                    "expected `leaf <value>` or `split <feature> <threshold> <left> <right>`",
                ))
            }
        };
        nodes.push(node);
    }
    Tree::from_nodes(nodes).map_err(|message| parse_err(last_line, message))
}

fn parse_corpus_body(cursor: &mut Cursor<'_>) -> Result<CorpusArtifacts, ModelFileError> {
    let (line, files_text) = cursor.expect_kv("files")?;
    let n_files = parse_usize(line, files_text)?;
    let mut idf = vec![f64::NAN; NodeKind::ALL.len()];
    let mut seen = 0usize;
    let mut last_line = line;
    while let Some((line, text)) = cursor.peek() {
        let Some(rest) = text.strip_prefix("idf ") else { break };
        cursor.pos += 1;
        last_line = line;
        let (kind_text, value_text) = rest
            .split_once('=')
            .ok_or_else(|| parse_err(line, "expected `idf <kind> = <value>`"))?;
        let kind = NodeKind::from_name(kind_text.trim())
            .ok_or_else(|| parse_err(line, format!("unknown node kind `{}`", kind_text.trim())))?;
        let slot = NodeKind::ALL.iter().position(|k| *k == kind).unwrap();
        if !idf[slot].is_nan() {
            return Err(parse_err(line, format!("duplicate idf entry for {}", kind.name())));
        }
        idf[slot] = parse_float(line, value_text.trim())?;
        seen += 1;
    }
    if seen != NodeKind::ALL.len() {
        return Err(parse_err(
            last_line,
            format!("corpus lists {seen} idf entries, expected {}", NodeKind::ALL.len()),
        ));
    }

    let mut embedding = None;
    if let Some((_, "[embedding]")) = cursor.peek() {
        cursor.pos += 1;
        let (line, dim_text) = cursor.expect_kv("dim")?;
        let dim = parse_usize(line, dim_text)?;
        let mut rows: Vec<(NodeKind, Vec<f64>)> = Vec::new();
        while let Some((line, text)) = cursor.peek() {
            let Some(rest) = text.strip_prefix("vector ") else { break };
            cursor.pos += 1;
            let (kind_text, values_text) = rest
                .split_once('=')
                .ok_or_else(|| parse_err(line, "expected `vector <kind> = <values>`"))?;
            let kind = NodeKind::from_name(kind_text.trim()).ok_or_else(|| {
                parse_err(line, format!("unknown node kind `{}`", kind_text.trim()))
            })?;
            let values = values_text
                .split_whitespace()
                .map(|v| parse_float(line, v))
                .collect::<Result<Vec<f64>, _>>()?;
            if values.len() != dim {
                return Err(parse_err(
                    line,
                    format!("vector for {} has {} values, expected {dim}", kind.name(), values.len()),
                ));
            }
            if rows.iter().any(|(k, _)| *k == kind) {
                return Err(parse_err(line, format!("duplicate vector for {}", kind.name())));
            }
            rows.push((kind, values));
        }
        let kinds: Vec<NodeKind> = rows.iter().map(|(k, _)| *k).collect();
        let vocabulary = NodeVocabulary::from_sequences(&[kinds]);
        let mut input_vectors = vec![vec![0.0; dim]; vocabulary.len()];
        for (kind, values) in rows {
            input_vectors[vocabulary.index_of(kind).unwrap()] = values;
        }
        let len = vocabulary.len();
        embedding = Some(EmbeddingMatrix {
            vocabulary,
            input_vectors,
            output_vectors: vec![vec![0.0; dim]; len],
            config: CbowConfig { embedding_dim: dim, ..CbowConfig::default() },
            epoch_losses: Vec::new(),
            warnings: Vec::new(),
        });
    }
    Ok(CorpusArtifacts { n_files, idf, embedding })
}

/// Parses the documented model text format.
pub fn parse_model(text: &str) -> Result<SavedModel, ModelFileError> {
    let mut cursor = Cursor::new(text);
    match cursor.next() {
        Some((_, line)) if line == MODEL_MAGIC => {}
        Some((line, text)) => {
            return Err(parse_err(line, format!("expected `{MODEL_MAGIC}`, found `{text}`")))
        }
        None => return Err(parse_err(1, "empty model file")),
    }
    let (line, kind_text) = cursor.expect_kv("kind")?;
    let kind = ModelKind::from_name(kind_text)
        .ok_or_else(|| parse_err(line, format!("unknown model kind `{kind_text}`")))?;
    let (line, schema_text) = cursor.expect_kv("schema")?;
    let schema = FeatureSchema::by_name(schema_text)
        .ok_or_else(|| parse_err(line, format!("unknown schema `{schema_text}`")))?;
    let (line, seed_text) = cursor.expect_kv("seed")?;
    let seed: u64 = seed_text
        .parse()
        .map_err(|_| parse_err(line, format!("bad integer `{seed_text}`")))?;
    let (line, nf_text) = cursor.expect_kv("n_features")?;
    let n_features = parse_usize(line, nf_text)?;
    let (line, mean_text) = cursor.expect_kv("target_mean")?;
    let target_mean = parse_float(line, mean_text)?;

    let mut coefficients: Option<(Vec<f64>, f64)> = None;
    let mut scaler: Option<Scaler> = None;
    let mut single_tree: Option<Tree> = None;
    let mut forest: Option<Vec<Tree>> = None;
    let mut corpus: Option<CorpusArtifacts> = None;

    while let Some((line, text)) = cursor.peek() {
        if text == "[coefficients]" {
            cursor.pos += 1;
            let (line, v) = cursor.expect_kv("intercept")?;
            let intercept = parse_float(line, v)?;
            let weights = cursor.indexed_floats("weight")?;
            coefficients = Some((weights, intercept));
        } else if text == "[scaler]" {
            cursor.pos += 1;
            let means = cursor.indexed_floats("mean")?;
            let sds = cursor.indexed_floats("sd")?;
            if means.len() != sds.len() {
                return Err(parse_err(
                    line,
                    format!("scaler has {} means but {} sds", means.len(), sds.len()),
                ));
            }
            scaler = Some(Scaler { means, sds });
        } else if text == "[tree]" {
            cursor.pos += 1;
            single_tree = Some(parse_tree_nodes(&mut cursor)?);
        } else if text.starts_with("forest_trees") {
            let (line, v) = cursor.expect_kv("forest_trees")?;
            let count = parse_usize(line, v)?;
            let mut trees = Vec::with_capacity(count);
            for i in 0..count {
                let header = format!("[tree {i}]");
                match cursor.next() {
                    Some((_, text)) if text == header => {}
                    Some((line, text)) => {
                        return Err(parse_err(line, format!("expected `{header}`, found `{text}`")))
                    }
                    None => {
                        return Err(parse_err(
                            cursor.eof_line(),
                            format!("expected `{header}`, found end of file"),
                        ))
                    }
                }
                trees.push(parse_tree_nodes(&mut cursor)?);
            }
            forest = Some(trees);
        } else if text == "[corpus]" {
            cursor.pos += 1;
            corpus = Some(parse_corpus_body(&mut cursor)?);
        } else {
            return Err(parse_err(line, format!("unexpected line `{text}`")));
        }
    }

    let params = match (coefficients, scaler, single_tree, forest) {
        (Some((weights, intercept)), None, None, None) => {
            if weights.len() != n_features {
                return Err(parse_err(
                    1,
                    format!("{} weights for {n_features} features", weights.len()),
                ));
            }
            FittedParams::Linear { weights, intercept }
        }
        (Some((weights, intercept)), Some(scaler), None, None) => {
            if weights.len() != n_features || scaler.means.len() != n_features {
                return Err(parse_err(
                    1,
                    format!("{} weights for {n_features} features", weights.len()),
                ));
            }
            FittedParams::Scaled { weights, intercept, scaler }
        }
        (None, None, Some(tree), None) => FittedParams::Tree { tree },
        (None, None, None, Some(trees)) => FittedParams::Forest { trees },
        _ => {
            return Err(parse_err(
                1,
                "model file must contain exactly one of: coefficients, \
                 coefficients+scaler, a tree, or a forest",
            ))
        }
    };

    Ok(SavedModel {
        schema,
        model: TrainedModel {
            spec: ModelSpec::default_for(kind, seed),
            params,
            target_mean,
            n_features,
        },
        corpus,
    })
}

/// Parses a standalone corpus file.
pub fn parse_corpus(text: &str) -> Result<CorpusArtifacts, ModelFileError> {
    let mut cursor = Cursor::new(text);
    match cursor.next() {
        Some((_, line)) if line == CORPUS_MAGIC => {}
        Some((line, text)) => {
            return Err(parse_err(line, format!("expected `{CORPUS_MAGIC}`, found `{text}`")))
        }
        None => return Err(parse_err(1, "empty corpus file")),
    }
    match cursor.next() {
        Some((_, "[corpus]")) => {}
        Some((line, text)) => {
            return Err(parse_err(line, format!("expected `[corpus]`, found `{text}`")))
        }
        None => return Err(parse_err(cursor.eof_line(), "expected `[corpus]` section")),
    }
    let corpus = parse_corpus_body(&mut cursor)?;
    if let Some((line, text)) = cursor.peek() {
        return Err(parse_err(line, format!("unexpected line `{text}`")));
    }
    Ok(corpus)
}

// ----- file I/O -------------------------------------------------------------

pub fn write_model(path: &Path, saved: &SavedModel) -> std::io::Result<()> {
    std::fs::write(path, serialize_model(saved))
}

pub fn read_model(path: &Path) -> Result<SavedModel, ModelFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| ModelFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_model(&text)
}

pub fn write_corpus(path: &Path, corpus: &CorpusArtifacts) -> std::io::Result<()> {
    std::fs::write(path, serialize_corpus(corpus))
}

pub fn read_corpus(path: &Path) -> Result<CorpusArtifacts, ModelFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| ModelFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_corpus(&text)
}
