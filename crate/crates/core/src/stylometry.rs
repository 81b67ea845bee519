//! Stylometric feature extraction for Java source files.
//!
//! Features fall into three families: lexical (token- and regex-based,
//! computable on any text), layout (line shape and whitespace), and
//! syntactic (node counts over a parsed tree). Count-valued features pass
//! through the log-ratio transform [`fe_transform`]; ratio and statistic
//! features (average line length, whitespace ratio, ...) are kept raw.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use regex::Regex;

use crate::ast::{self, Ast, NodeKind, ParseError, TokenKind};
use crate::astbe::EmbeddingMatrix;

/// Feature scaling transform: `log10((count + 1) / file_len)`.
///
/// The add-one smoothing keeps zero counts finite; the transform is
/// strictly increasing in `count` and strictly decreasing in `file_len`.
/// `file_len` is the file length in characters (Unicode scalars).
///
/// # Panics
///
/// Panics when `file_len` is zero; callers must skip empty files.
pub fn fe_transform(count: u64, file_len: usize) -> f64 {
    assert!(file_len >= 1, "fe_transform requires a positive file length");
    ((count + 1) as f64 / file_len as f64).log10()
}

/// Column category, used for schema bookkeeping and reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureCategory {
    Lexical,
    Layout,
    Syntactic,
    Embedding,
}

/// One named feature column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub category: FeatureCategory,
}

/// An ordered feature column catalog plus the flags that control the
/// optional blocks (identifier unigrams, node tf-idf, tree embeddings).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSchema {
    pub name: String,
    pub columns: Vec<Column>,
    pub enable_unigrams: bool,
    pub enable_ast_tfidf: bool,
    pub enable_embedding: bool,
}

fn col(name: &str, category: FeatureCategory) -> Column {
    Column { name: name.to_string(), category }
}

impl FeatureSchema {
    /// The default 13-column profile: six lexical, four layout, three
    /// syntactic columns.
    pub fn paper13() -> Self {
        use FeatureCategory::*;
        FeatureSchema {
            name: "paper13".to_string(),
            columns: vec![
                col("lex_imports", Lexical),
                col("lex_line_comments", Lexical),
                col("lex_block_comments", Lexical),
                col("lex_doc_comments", Lexical),
                col("lex_keywords", Lexical),
                col("lex_methods", Lexical),
                col("lay_avg_line_len", Layout),
                col("lay_sd_line_len", Layout),
                col("lay_empty_lines", Layout),
                col("lay_ws_ratio", Layout),
                col("syn_conditionals", Syntactic),
                col("syn_literals", Syntactic),
                col("syn_loops", Syntactic),
            ],
            enable_unigrams: false,
            enable_ast_tfidf: false,
            enable_embedding: false,
        }
    }

    /// Every available column: the paper13 set plus identifier unigrams,
    /// tab count, total node count, a tf-idf column per node kind, and the
    /// 16 embedding dimensions. Columns are grouped by category.
    pub fn full() -> Self {
        use FeatureCategory::*;
        let mut columns = vec![
            col("lex_imports", Lexical),
            col("lex_line_comments", Lexical),
            col("lex_block_comments", Lexical),
            col("lex_doc_comments", Lexical),
            col("lex_keywords", Lexical),
            col("lex_methods", Lexical),
            col("lex_unigrams_total", Lexical),
            col("lex_unigrams_distinct", Lexical),
            col("lay_avg_line_len", Layout),
            col("lay_sd_line_len", Layout),
            col("lay_empty_lines", Layout),
            col("lay_ws_ratio", Layout),
            col("lay_tabs", Layout),
            col("syn_conditionals", Syntactic),
            col("syn_literals", Syntactic),
            col("syn_loops", Syntactic),
            col("syn_nodes", Syntactic),
        ];
        for kind in NodeKind::ALL {
            columns.push(col(&format!("syn_tfidf_{}", snake_case(kind.name())), Syntactic));
        }
        for dim in 0..16 {
            columns.push(col(&format!("emb_{dim}"), Embedding));
        }
        FeatureSchema {
            name: "full".to_string(),
            columns,
            enable_unigrams: true,
            enable_ast_tfidf: true,
            enable_embedding: true,
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "paper13" => Some(Self::paper13()),
            "full" => Some(Self::full()),
            _ => None,
        }
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    /// Whether extraction under this schema needs a parsed tree.
    fn needs_ast(&self) -> bool {
        self.columns.iter().any(|c| c.category == FeatureCategory::Syntactic)
            || self.enable_embedding
    }
}

fn snake_case(name: &str) -> String {
    let mut out = String::with_capacity(name.len() + 4);
    for (i, c) in name.chars().enumerate() {
        if c.is_uppercase() {
            if i > 0 {
                out.push('_');
            }
            out.extend(c.to_lowercase());
        } else {
            out.push(c);
        }
    }
    out
}

/// One file's extracted features under a schema.
#[derive(Debug, Clone)]
pub struct FeatureVector {
    pub schema: String,
    pub file_path: String,
    /// Transformed values, aligned with the schema's columns.
    pub values: Vec<f64>,
    /// Pre-transform counts for every count-backed column. Columns present
    /// here are exactly the ones whose value is `fe_transform(count, len)`.
    pub raw_counts: BTreeMap<String, u64>,
    pub file_length_chars: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum ExtractError {
    #[error("empty file: the feature transform requires at least one character")]
    EmptyFile,
    #[error(transparent)]
    Parse(#[from] ParseError),
}

// ----- lexical ------------------------------------------------------------

/// Raw lexical counts for one file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LexicalCounts {
    pub imports: u64,
    pub line_comments: u64,
    pub block_comments: u64,
    pub doc_comments: u64,
    pub keywords: u64,
    pub methods: u64,
    pub unigrams_total: u64,
    pub unigrams_distinct: u64,
}

fn comment_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"/\*(.|[\r\n])*?\*/|//.*").unwrap())
}

fn import_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?m)^\s*import\s").unwrap())
}

/// Count comments by running the comment pattern over the raw text and
/// classifying each match: `//...` is a line comment; `/*...*/` is a doc
/// comment when it opens with `/**` and is long enough to have a body
/// (so the four-character `/**/` stays a plain block comment), otherwise
/// a block comment. The three classes partition the matches.
pub fn count_comments(source: &str) -> (u64, u64, u64) {
    let mut line = 0;
    let mut block = 0;
    let mut doc = 0;
    for m in comment_pattern().find_iter(source) {
        let text = m.as_str();
        if text.starts_with("//") {
            line += 1;
        } else if text.starts_with("/**") && text.len() >= 5 {
            doc += 1;
        } else {
            block += 1;
        }
    }
    (line, block, doc)
}

/// Lexical counts from raw text plus, when available, a parsed tree.
/// Comments and imports are plain pattern matches over the raw source;
/// keywords and unigrams come from the token stream; the method count
/// uses the tree when one is supplied and a token heuristic otherwise.
pub fn extract_lexical(source: &str, ast: Option<&Ast>) -> LexicalCounts {
    let (line_comments, block_comments, doc_comments) = count_comments(source);
    let imports = import_pattern().find_iter(source).count() as u64;

    let tokens = ast::lex(source);
    let mut keywords = 0u64;
    let mut unigrams_total = 0u64;
    let mut distinct: BTreeSet<&str> = BTreeSet::new();
    for t in &tokens {
        match t.kind {
            TokenKind::Keyword => keywords += 1,
            TokenKind::Identifier => {
                unigrams_total += 1;
                distinct.insert(t.text(source));
            }
            _ => {}
        }
    }

    let methods = match ast {
        Some(ast) => {
            let counts = ast::count_kinds(ast);
            counts.get(&NodeKind::MethodDeclaration).copied().unwrap_or(0) as u64
        }
        None => method_token_heuristic(source, &tokens),
    };

    LexicalCounts {
        imports,
        line_comments,
        block_comments,
        doc_comments,
        keywords,
        methods,
        unigrams_total,
        unigrams_distinct: distinct.len() as u64,
    }
}

/// Fallback method count for unparseable files: a name followed by a
/// parenthesized list, an optional `throws` clause, and an opening brace
/// looks like a method or constructor definition.
fn method_token_heuristic(source: &str, tokens: &[ast::Token]) -> u64 {
    let toks: Vec<&ast::Token> = tokens.iter().filter(|t| !t.kind.is_comment()).collect();
    let mut count = 0u64;
    for i in 0..toks.len() {
        if toks[i].kind != TokenKind::Identifier {
            continue;
        }
        let Some(open) = toks.get(i + 1) else { continue };
        if open.kind != TokenKind::Punct || open.text(source) != "(" {
            continue;
        }
        // find the matching close paren
        let mut depth = 0usize;
        let mut j = i + 1;
        let mut close = None;
        while let Some(t) = toks.get(j) {
            if t.kind == TokenKind::Punct {
                match t.text(source) {
                    "(" => depth += 1,
                    ")" => {
                        depth -= 1;
                        if depth == 0 {
                            close = Some(j);
                            break;
                        }
                    }
                    _ => {}
                }
            }
            j += 1;
        }
        let Some(mut j) = close else { continue };
        j += 1;
        // optional `throws A, B`
        if toks.get(j).is_some_and(|t| t.kind == TokenKind::Keyword && t.text(source) == "throws")
        {
            j += 1;
            while toks.get(j).is_some_and(|t| {
                t.kind == TokenKind::Identifier
                    || (t.kind == TokenKind::Punct && matches!(t.text(source), "." | ","))
            }) {
                j += 1;
            }
        }
        if toks.get(j).is_some_and(|t| t.kind == TokenKind::Punct && t.text(source) == "{") {
            count += 1;
        }
    }
    count
}

// ----- layout ---------------------------------------------------------------

/// Raw layout statistics for one file. The averages are taken over
/// non-empty lines; an empty line is one with zero characters after
/// stripping a trailing carriage return.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LayoutStats {
    pub avg_line_len: f64,
    pub sd_line_len: f64,
    pub empty_lines: u64,
    pub ws_ratio: f64,
    pub tabs: u64,
}

/// Split on `\n`, strip a trailing `\r` from each line, and ignore the
/// phantom empty line after a trailing newline.
fn split_lines(source: &str) -> Vec<&str> {
    let mut lines: Vec<&str> = source
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .collect();
    if source.ends_with('\n') {
        lines.pop();
    }
    lines
}

pub fn extract_layout(source: &str) -> LayoutStats {
    let lines = split_lines(source);
    let lengths: Vec<f64> = lines
        .iter()
        .filter(|l| !l.is_empty())
        .map(|l| l.chars().count() as f64)
        .collect();
    let empty_lines = (lines.len() - lengths.len()) as u64;

    let (avg, sd) = if lengths.is_empty() {
        (0.0, 0.0)
    } else {
        let n = lengths.len() as f64;
        let mean = lengths.iter().sum::<f64>() / n;
        let var = lengths.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / n;
        (mean, var.sqrt())
    };

    let total_chars = source.chars().count();
    let ws_chars = source.chars().filter(|c| c.is_whitespace()).count();
    let ws_ratio = if total_chars == 0 {
        0.0
    } else {
        ws_chars as f64 / total_chars as f64
    };
    let tabs = source.chars().filter(|&c| c == '\t').count() as u64;

    LayoutStats { avg_line_len: avg, sd_line_len: sd, empty_lines, ws_ratio, tabs }
}

// ----- syntactic ------------------------------------------------------------

/// Raw node-count features for one parsed file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SyntacticCounts {
    pub conditionals: u64,
    pub literals: u64,
    pub loops: u64,
    pub nodes: u64,
    /// Count per node kind, for the tf-idf block.
    pub kind_counts: BTreeMap<NodeKind, u64>,
}

pub fn extract_syntactic(ast: &Ast) -> SyntacticCounts {
    let counts = ast::count_kinds(ast);
    let get = |k: NodeKind| counts.get(&k).copied().unwrap_or(0) as u64;
    let conditionals = get(NodeKind::IfStatement)
        + get(NodeKind::SwitchStatement)
        + get(NodeKind::ConditionalExpression);
    let loops = get(NodeKind::ForStatement)
        + get(NodeKind::ForEachStatement)
        + get(NodeKind::WhileStatement)
        + get(NodeKind::DoStatement);
    let literals = get(NodeKind::Literal);
    let kind_counts: BTreeMap<NodeKind, u64> =
        counts.iter().map(|(&k, &v)| (k, v as u64)).collect();
    let nodes = kind_counts.values().sum();
    SyntacticCounts { conditionals, literals, loops, nodes, kind_counts }
}

// ----- corpus artifacts -----------------------------------------------------

/// Corpus-level state the optional feature blocks depend on: the inverse
/// document frequency of each node kind and, when embeddings are enabled,
/// the trained embedding matrix. Persisted next to datasets and inside
/// model files so prediction reproduces the training feature space.
#[derive(Debug, Clone)]
pub struct CorpusArtifacts {
    pub n_files: usize,
    /// Aligned with [`NodeKind::ALL`].
    pub idf: Vec<f64>,
    pub embedding: Option<EmbeddingMatrix>,
}

impl CorpusArtifacts {
    /// Compute inverse document frequencies from per-file kind counts:
    /// `ln(n_files / (1 + files containing the kind)) + 1`.
    pub fn from_kind_counts(per_file: &[BTreeMap<NodeKind, u64>]) -> Self {
        let n_files = per_file.len();
        let idf = NodeKind::ALL
            .iter()
            .map(|kind| {
                let df = per_file
                    .iter()
                    .filter(|counts| counts.get(kind).copied().unwrap_or(0) > 0)
                    .count();
                (n_files as f64 / (1 + df) as f64).ln() + 1.0
            })
            .collect();
        CorpusArtifacts { n_files, idf, embedding: None }
    }
}

// ----- composition ------------------------------------------------------------

/// Extract every column of `schema` for one file. Pure in
/// `(source, schema, corpus)`; `corpus` is required exactly when the
/// schema enables tf-idf or embedding columns.
///
/// Parse failures are errors only when the schema needs the tree;
/// lexical- and layout-only schemas extract from any text.
pub fn extract_file(
    source: &str,
    file_path: &str,
    schema: &FeatureSchema,
    corpus: Option<&CorpusArtifacts>,
) -> Result<FeatureVector, ExtractError> {
    let file_length_chars = source.chars().count();
    if file_length_chars == 0 {
        return Err(ExtractError::EmptyFile);
    }
    let ast = if schema.needs_ast() {
        Some(ast::parse_java(source)?)
    } else {
        None
    };
    let lexical = extract_lexical(source, ast.as_ref());
    let layout = extract_layout(source);
    let syntactic = ast.as_ref().map(extract_syntactic).unwrap_or_default();
    let embedding = if schema.enable_embedding {
        let matrix = corpus
            .and_then(|c| c.embedding.as_ref())
            .expect("embedding columns require a trained embedding");
        let ast = ast.as_ref().expect("embedding columns require a parsed tree");
        Some(crate::astbe::embed_file(ast, matrix))
    } else {
        None
    };

    let mut values = Vec::with_capacity(schema.columns.len());
    let mut raw_counts = BTreeMap::new();
    let len = file_length_chars;
    let counted = |name: &str, count: u64, raw: &mut BTreeMap<String, u64>| {
        raw.insert(name.to_string(), count);
        fe_transform(count, len)
    };

    for column in &schema.columns {
        let name = column.name.as_str();
        let value = match name {
            "lex_imports" => counted(name, lexical.imports, &mut raw_counts),
            "lex_line_comments" => counted(name, lexical.line_comments, &mut raw_counts),
            "lex_block_comments" => counted(name, lexical.block_comments, &mut raw_counts),
            "lex_doc_comments" => counted(name, lexical.doc_comments, &mut raw_counts),
            "lex_keywords" => counted(name, lexical.keywords, &mut raw_counts),
            "lex_methods" => counted(name, lexical.methods, &mut raw_counts),
            "lex_unigrams_total" => counted(name, lexical.unigrams_total, &mut raw_counts),
            "lex_unigrams_distinct" => {
                counted(name, lexical.unigrams_distinct, &mut raw_counts)
            }
            "lay_avg_line_len" => layout.avg_line_len,
            "lay_sd_line_len" => layout.sd_line_len,
            "lay_empty_lines" => counted(name, layout.empty_lines, &mut raw_counts),
            "lay_ws_ratio" => layout.ws_ratio,
            "lay_tabs" => counted(name, layout.tabs, &mut raw_counts),
            "syn_conditionals" => counted(name, syntactic.conditionals, &mut raw_counts),
            "syn_literals" => counted(name, syntactic.literals, &mut raw_counts),
            "syn_loops" => counted(name, syntactic.loops, &mut raw_counts),
            "syn_nodes" => counted(name, syntactic.nodes, &mut raw_counts),
            _ if name.starts_with("syn_tfidf_") => {
                let corpus = corpus.expect("tf-idf columns require corpus artifacts");
                let idx = NodeKind::ALL
                    .iter()
                    .position(|k| format!("syn_tfidf_{}", snake_case(k.name())) == name)
                    .expect("tf-idf column names a known node kind");
                let kind = NodeKind::ALL[idx];
                let count = syntactic.kind_counts.get(&kind).copied().unwrap_or(0);
                let tf = if syntactic.nodes == 0 {
                    0.0
                } else {
                    count as f64 / syntactic.nodes as f64
                };
                tf * corpus.idf[idx]
            }
            _ if name.starts_with("emb_") => {
                let dim: usize = name["emb_".len()..]
                    .parse()
                    .expect("embedding column names its dimension");
                embedding.as_ref().expect("embedding computed above").values[dim]
            }
            other => panic!("schema names an unknown column: {other}"),
        };
        values.push(value);
    }

    debug_assert!(values.iter().all(|v| v.is_finite()));
    Ok(FeatureVector {
        schema: schema.name.clone(),
        file_path: file_path.to_string(),
        values,
        raw_counts,
        file_length_chars,
    })
}
