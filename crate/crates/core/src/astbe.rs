//! Tree-based embeddings: node-kind sequences from preorder traversals,
//! a CBOW model with negative sampling trained over them, and per-file
//! embedding vectors by mean pooling.
//!
//! Training is single-threaded and fully determined by the seed;
//! reproducibility outranks speed at the corpus sizes this tool sees.

use std::collections::BTreeMap;
use std::io::{self, Write};

use rand::distr::weighted::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha20Rng;

use crate::ast::{preorder, Ast, NodeKind};

/// Node kinds admitted into embedding sequences: statement- and
/// declaration-level kinds plus the expression kinds that carry style.
pub const SELECTED_KINDS: [NodeKind; 14] = [
    NodeKind::MethodDeclaration,
    NodeKind::VariableDeclaration,
    NodeKind::BlockStatement,
    NodeKind::IfStatement,
    NodeKind::SwitchStatement,
    NodeKind::ForStatement,
    NodeKind::ForEachStatement,
    NodeKind::WhileStatement,
    NodeKind::DoStatement,
    NodeKind::ReturnStatement,
    NodeKind::MethodCall,
    NodeKind::BinaryExpression,
    NodeKind::Literal,
    NodeKind::Identifier,
];

/// Hyperparameters for CBOW training.
#[derive(Debug, Clone, PartialEq)]
pub struct CbowConfig {
    pub embedding_dim: usize,
    pub window: usize,
    pub negative_samples: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for CbowConfig {
    fn default() -> Self {
        CbowConfig {
            embedding_dim: 16,
            window: 2,
            negative_samples: 5,
            epochs: 50,
            learning_rate: 0.025,
            seed: 42,
        }
    }
}

/// The kinds that actually occur in a corpus, in catalog order, with a
/// dense index for matrix rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeVocabulary {
    pub kinds: Vec<NodeKind>,
    index: BTreeMap<NodeKind, usize>,
}

impl NodeVocabulary {
    /// Vocabulary over the kinds present in `sequences`, ordered by the
    /// node-kind catalog so indices are stable across runs.
    pub fn from_sequences(sequences: &[Vec<NodeKind>]) -> Self {
        let mut present = [false; NodeKind::ALL.len()];
        for seq in sequences {
            for kind in seq {
                present[NodeKind::ALL.iter().position(|k| k == kind).unwrap()] = true;
            }
        }
        let kinds: Vec<NodeKind> = NodeKind::ALL
            .iter()
            .copied()
            .filter(|k| present[NodeKind::ALL.iter().position(|x| x == k).unwrap()])
            .collect();
        let index = kinds.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        NodeVocabulary { kinds, index }
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn index_of(&self, kind: NodeKind) -> Option<usize> {
        self.index.get(&kind).copied()
    }
}

/// Trained (or initialized) CBOW parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    pub vocabulary: NodeVocabulary,
    /// `|V| × d`; these rows are the embeddings.
    pub input_vectors: Vec<Vec<f64>>,
    /// `|V| × d`; the output (context-prediction) side, kept for
    /// inspection and reproducibility.
    pub output_vectors: Vec<Vec<f64>>,
    pub config: CbowConfig,
    /// Mean example loss per epoch, evaluated after the epoch's updates.
    /// The negative term is the exact expectation under the sampling
    /// distribution, so the series is deterministic and smooth.
    pub epoch_losses: Vec<f64>,
    /// Non-fatal conditions observed while training.
    pub warnings: Vec<String>,
}

impl EmbeddingMatrix {
    /// Seeded initialization: input vectors uniform in `[-0.5/d, 0.5/d]`,
    /// output vectors zero.
    pub fn initialize(vocabulary: NodeVocabulary, config: CbowConfig) -> Self {
        let d = config.embedding_dim;
        let bound = 0.5 / d as f64;
        let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
        let input_vectors = (0..vocabulary.len())
            .map(|_| (0..d).map(|_| rng.random_range(-bound..bound)).collect())
            .collect();
        let output_vectors = vec![vec![0.0; d]; vocabulary.len()];
        EmbeddingMatrix {
            vocabulary,
            input_vectors,
            output_vectors,
            config,
            epoch_losses: Vec::new(),
            warnings: Vec::new(),
        }
    }
}

/// One file's pooled embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct FileEmbedding {
    pub file_path: String,
    pub values: Vec<f64>,
    /// True when the file had no selected nodes and the vector is the
    /// zero fallback.
    pub empty: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum TrainError {
    #[error("empty corpus: no sequence contains a selected node")]
    EmptyCorpus,
}

/// Preorder node-kind sequences, one per tree, filtered to `selected`.
/// Empty sequences are retained so callers can flag the files.
pub fn build_corpus(asts: &[Ast], selected: &[NodeKind]) -> Vec<Vec<NodeKind>> {
    asts.iter()
        .map(|ast| {
            preorder(ast)
                .map(|n| n.kind)
                .filter(|k| selected.contains(k))
                .collect()
        })
        .collect()
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Loss of one training example: predict `center` from the mean of the
/// context input vectors against the given negatives.
///
/// `L = -ln σ(h·u_c) - Σ_n ln σ(-h·u_n)` with `h` the context mean.
pub fn example_loss(
    matrix: &EmbeddingMatrix,
    center: usize,
    context: &[usize],
    negatives: &[usize],
) -> f64 {
    let d = matrix.config.embedding_dim;
    let mut h = vec![0.0; d];
    for &c in context {
        for (hi, vi) in h.iter_mut().zip(&matrix.input_vectors[c]) {
            *hi += vi;
        }
    }
    let inv_c = 1.0 / context.len() as f64;
    for hi in h.iter_mut() {
        *hi *= inv_c;
    }
    let dot = |u: &[f64]| h.iter().zip(u).map(|(a, b)| a * b).sum::<f64>();
    let mut loss = -sigmoid(dot(&matrix.output_vectors[center])).ln();
    for &n in negatives {
        loss -= sigmoid(-dot(&matrix.output_vectors[n])).ln();
    }
    loss
}

/// Analytic gradients of [`example_loss`], aggregated per parameter row.
/// The input-side gradient carries the exact `1/|context|` factor from
/// the mean, so it matches finite differences of the loss.
pub struct ExampleGradients {
    /// (vocabulary row, d-length gradient) for input vectors.
    pub d_input: Vec<(usize, Vec<f64>)>,
    /// (vocabulary row, d-length gradient) for output vectors.
    pub d_output: Vec<(usize, Vec<f64>)>,
}

pub fn example_gradients(
    matrix: &EmbeddingMatrix,
    center: usize,
    context: &[usize],
    negatives: &[usize],
) -> ExampleGradients {
    let d = matrix.config.embedding_dim;
    let mut h = vec![0.0; d];
    for &c in context {
        for (hi, vi) in h.iter_mut().zip(&matrix.input_vectors[c]) {
            *hi += vi;
        }
    }
    let inv_c = 1.0 / context.len() as f64;
    for hi in h.iter_mut() {
        *hi *= inv_c;
    }
    let dot = |u: &[f64]| h.iter().zip(u).map(|(a, b)| a * b).sum::<f64>();

    // dL/dh accumulates over the positive and negative terms;
    // dL/du_j = g_j · h with g = σ(h·u) − label.
    let mut d_h = vec![0.0; d];
    let mut d_output: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let mut add_term = |row: usize, label: f64, d_h: &mut Vec<f64>| {
        let g = sigmoid(dot(&matrix.output_vectors[row])) - label;
        let entry = d_output.entry(row).or_insert_with(|| vec![0.0; d]);
        for ((e, hi), ui) in entry.iter_mut().zip(&h).zip(&matrix.output_vectors[row]) {
            *e += g * hi;
            let _ = ui;
        }
        for (dhi, ui) in d_h.iter_mut().zip(&matrix.output_vectors[row]) {
            *dhi += g * ui;
        }
    };
    add_term(center, 1.0, &mut d_h);
    for &n in negatives {
        add_term(n, 0.0, &mut d_h);
    }

    // each context row receives (occurrences/|context|) · dL/dh
    let mut d_input: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for &c in context {
        let entry = d_input.entry(c).or_insert_with(|| vec![0.0; d]);
        for (e, dhi) in entry.iter_mut().zip(&d_h) {
            *e += inv_c * dhi;
        }
    }

    ExampleGradients {
        d_input: d_input.into_iter().collect(),
        d_output: d_output.into_iter().collect(),
    }
}

/// Train CBOW with negative sampling over node-kind sequences.
///
/// Deterministic in `(corpus, config)`: initialization, negative draws,
/// and iteration order all derive from the seed. The learning rate decays
/// linearly from `learning_rate` to 10% of it across epochs. Negatives
/// are drawn from the unigram distribution raised to 3/4; draws equal to
/// the center token are skipped, as is conventional.
pub fn train_cbow(
    corpus: &[Vec<NodeKind>],
    config: &CbowConfig,
) -> Result<EmbeddingMatrix, TrainError> {
    if corpus.iter().all(|s| s.is_empty()) {
        return Err(TrainError::EmptyCorpus);
    }
    let vocabulary = NodeVocabulary::from_sequences(corpus);
    let sequences: Vec<Vec<usize>> = corpus
        .iter()
        .map(|seq| seq.iter().map(|&k| vocabulary.index_of(k).unwrap()).collect())
        .collect();

    let mut counts = vec![0u64; vocabulary.len()];
    for seq in &sequences {
        for &t in seq {
            counts[t] += 1;
        }
    }

    let mut matrix = EmbeddingMatrix::initialize(vocabulary, config.clone());
    let weights: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(0.75)).collect();
    let weight_sum: f64 = weights.iter().sum();
    let neg_probs: Vec<f64> = weights.iter().map(|w| w / weight_sum).collect();

    if matrix.vocabulary.len() == 1 {
        // nothing to contrast against: keep the initialization
        matrix.warnings.push(
            "degenerate vocabulary: a single node kind; embedding left at initialization"
                .to_string(),
        );
        let loss = expected_corpus_loss(&matrix, &sequences, &neg_probs);
        matrix.epoch_losses.push(loss);
        return Ok(matrix);
    }

    let sampler = WeightedIndex::new(&weights).expect("non-degenerate unigram weights");
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);

    let window = config.window as isize;
    for epoch in 0..config.epochs {
        let lr = if config.epochs == 1 {
            config.learning_rate
        } else {
            config.learning_rate
                * (1.0 - 0.9 * epoch as f64 / (config.epochs - 1) as f64)
        };
        for seq in &sequences {
            for (i, &center) in seq.iter().enumerate() {
                let lo = (i as isize - window).max(0) as usize;
                let hi = (i + config.window).min(seq.len() - 1);
                let context: Vec<usize> = (lo..=hi).filter(|&j| j != i).map(|j| seq[j]).collect();
                if context.is_empty() {
                    continue;
                }
                let negatives: Vec<usize> = (0..config.negative_samples)
                    .map(|_| sampler.sample(&mut rng))
                    .filter(|&n| n != center)
                    .collect();
                let grads = example_gradients(&matrix, center, &context, &negatives);
                for (row, g) in &grads.d_input {
                    for (w, gi) in matrix.input_vectors[*row].iter_mut().zip(g) {
                        *w -= lr * gi;
                    }
                }
                for (row, g) in &grads.d_output {
                    for (w, gi) in matrix.output_vectors[*row].iter_mut().zip(g) {
                        *w -= lr * gi;
                    }
                }
            }
        }
        matrix
            .epoch_losses
            .push(expected_corpus_loss(&matrix, &sequences, &neg_probs));
    }
    Ok(matrix)
}

/// Mean example loss over the corpus with the negative term taken in
/// expectation over the sampling distribution:
/// `E[L] = -ln σ(h·u_c) - k · Σ_{j≠c} q_j · ln σ(-h·u_j)`.
/// This is exactly what the sampled updates minimize on average, and it
/// is a deterministic function of the parameters.
fn expected_corpus_loss(
    matrix: &EmbeddingMatrix,
    sequences: &[Vec<usize>],
    neg_probs: &[f64],
) -> f64 {
    let d = matrix.config.embedding_dim;
    let window = matrix.config.window;
    let k = matrix.config.negative_samples as f64;
    let mut sum = 0.0;
    let mut n = 0u64;
    for seq in sequences {
        for (i, &center) in seq.iter().enumerate() {
            let lo = i.saturating_sub(window);
            let hi = (i + window).min(seq.len().saturating_sub(1));
            let context: Vec<usize> = (lo..=hi).filter(|&j| j != i).map(|j| seq[j]).collect();
            if context.is_empty() {
                continue;
            }
            let mut h = vec![0.0; d];
            for &c in &context {
                for (hi, vi) in h.iter_mut().zip(&matrix.input_vectors[c]) {
                    *hi += vi;
                }
            }
            let inv_c = 1.0 / context.len() as f64;
            for hi in h.iter_mut() {
                *hi *= inv_c;
            }
            let dot = |u: &[f64]| h.iter().zip(u).map(|(a, b)| a * b).sum::<f64>();
            let mut loss = -sigmoid(dot(&matrix.output_vectors[center])).ln();
            for (j, &q) in neg_probs.iter().enumerate() {
                if j != center {
                    loss -= k * q * sigmoid(-dot(&matrix.output_vectors[j])).ln();
                }
            }
            sum += loss;
            n += 1;
        }
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Mean of the input vectors of the file's selected-node sequence.
/// Out-of-vocabulary kinds are skipped; a file with no in-vocabulary
/// nodes embeds as the zero vector with `empty` set.
pub fn embed_file(ast: &Ast, matrix: &EmbeddingMatrix) -> FileEmbedding {
    let d = matrix.config.embedding_dim;
    let mut sum = vec![0.0; d];
    let mut n = 0usize;
    for node in preorder(ast) {
        if !SELECTED_KINDS.contains(&node.kind) {
            continue;
        }
        let Some(row) = matrix.vocabulary.index_of(node.kind) else { continue };
        for (s, v) in sum.iter_mut().zip(&matrix.input_vectors[row]) {
            *s += v;
        }
        n += 1;
    }
    if n == 0 {
        return FileEmbedding { file_path: String::new(), values: sum, empty: true };
    }
    for s in sum.iter_mut() {
        *s /= n as f64;
    }
    FileEmbedding { file_path: String::new(), values: sum, empty: false }
}

/// Format a value with nine significant digits, the precision used by
/// the persisted embedding artifacts.
pub fn format_9sig(v: f64) -> String {
    format!("{v:.8e}")
}

/// Write the embedding matrix as CSV: `kind,dim_0..dim_{d-1}`, one row
/// per vocabulary kind, nine significant digits.
pub fn write_embedding_csv(matrix: &EmbeddingMatrix, mut w: impl Write) -> io::Result<()> {
    let d = matrix.config.embedding_dim;
    let mut header = String::from("kind");
    for i in 0..d {
        header.push_str(&format!(",dim_{i}"));
    }
    writeln!(w, "{header}")?;
    for (kind, row) in matrix.vocabulary.kinds.iter().zip(&matrix.input_vectors) {
        let mut line = kind.name().to_string();
        for v in row {
            line.push(',');
            line.push_str(&format_9sig(*v));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::parse_java;
    use approx::assert_abs_diff_eq;

    fn fixture_asts() -> Vec<Ast> {
        [
            "class Main { public static void main(String[] args) { for (int i = 0; i < 10; i++) { System.out.println(i); } } }",
            "class Tiny { int x = 1; }",
            "class Util { static int clamp(int v, int lo, int hi) { if (v < lo) return lo; return v > hi ? hi : v; } }",
            "class Wide { void w() { while (true) { break; } do { } while (false); } }",
            "class Doc { void documented() { } }",
        ]
        .iter()
        .map(|s| parse_java(s).unwrap())
        .collect()
    }

    fn small_config(seed: u64) -> CbowConfig {
        CbowConfig { embedding_dim: 8, epochs: 20, seed, ..CbowConfig::default() }
    }

    #[test]
    fn corpus_keeps_preorder_and_drops_unselected() {
        let src = "class Sample { public boolean checkPositive(int integer) { if (integer > 0) return true; else return false; } }";
        let ast = parse_java(src).unwrap();
        let seqs = build_corpus(&[ast], &SELECTED_KINDS);
        let seq = &seqs[0];
        let pos = |k: NodeKind| seq.iter().position(|&x| x == k).unwrap();
        assert!(pos(NodeKind::MethodDeclaration) < pos(NodeKind::IfStatement));
        let returns: Vec<usize> = seq
            .iter()
            .enumerate()
            .filter(|(_, &k)| k == NodeKind::ReturnStatement)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(returns.len(), 2);
        assert!(pos(NodeKind::IfStatement) < returns[0]);
        // nothing outside the selection survives
        assert!(seq
            .iter()
            .all(|k| SELECTED_KINDS.contains(k)));
    }

    #[test]
    fn empty_class_gives_empty_sequence() {
        let ast = parse_java("class A {}").unwrap();
        let seqs = build_corpus(&[ast], &SELECTED_KINDS);
        assert!(seqs[0].is_empty());
    }

    #[test]
    fn corpus_matches_independent_traversal() {
        // oracle: filter an independent recursive walk
        fn walk(node: &crate::ast::AstNode, out: &mut Vec<NodeKind>) {
            if SELECTED_KINDS.contains(&node.kind) {
                out.push(node.kind);
            }
            for c in &node.children {
                walk(c, out);
            }
        }
        for ast in fixture_asts() {
            let mut expected = Vec::new();
            walk(&ast.root, &mut expected);
            let got = build_corpus(std::slice::from_ref(&ast), &SELECTED_KINDS);
            assert_eq!(got[0], expected);
        }
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let asts = vec![parse_java("class A {}").unwrap()];
        let corpus = build_corpus(&asts, &SELECTED_KINDS);
        assert!(matches!(
            train_cbow(&corpus, &CbowConfig::default()),
            Err(TrainError::EmptyCorpus)
        ));
    }

    #[test]
    fn single_kind_vocabulary_degenerates_gracefully() {
        let corpus = vec![vec![NodeKind::Identifier; 6]];
        let matrix = train_cbow(&corpus, &small_config(7)).unwrap();
        assert_eq!(matrix.vocabulary.len(), 1);
        assert_eq!(matrix.warnings.len(), 1);
        assert!(matrix.epoch_losses[0].is_finite());
    }

    #[test]
    fn training_is_deterministic_in_the_seed() {
        let corpus = build_corpus(&fixture_asts(), &SELECTED_KINDS);
        let a = train_cbow(&corpus, &small_config(42)).unwrap();
        let b = train_cbow(&corpus, &small_config(42)).unwrap();
        assert_eq!(a.input_vectors, b.input_vectors);
        assert_eq!(a.output_vectors, b.output_vectors);
        assert_eq!(a.epoch_losses, b.epoch_losses);
        let c = train_cbow(&corpus, &small_config(43)).unwrap();
        assert_ne!(a.input_vectors, c.input_vectors);
    }

    #[test]
    fn epoch_loss_non_increasing_over_five_epoch_windows() {
        let corpus = build_corpus(&fixture_asts(), &SELECTED_KINDS);
        let config = CbowConfig::default();
        let matrix = train_cbow(&corpus, &config).unwrap();
        assert_eq!(matrix.epoch_losses.len(), config.epochs);
        assert!(matrix.epoch_losses.iter().all(|l| l.is_finite()));
        for e in 0..matrix.epoch_losses.len() - 4 {
            assert!(
                matrix.epoch_losses[e + 4] <= matrix.epoch_losses[e] + 1e-9,
                "loss rose over epochs {}..{}: {} -> {}",
                e,
                e + 4,
                matrix.epoch_losses[e],
                matrix.epoch_losses[e + 4]
            );
        }
    }

    #[test]
    fn all_values_finite_after_training() {
        let corpus = build_corpus(&fixture_asts(), &SELECTED_KINDS);
        let matrix = train_cbow(&corpus, &CbowConfig::default()).unwrap();
        assert!(matrix.input_vectors.iter().flatten().all(|v| v.is_finite()));
        assert!(matrix.output_vectors.iter().flatten().all(|v| v.is_finite()));
    }

    #[test]
    fn gradients_match_central_finite_differences() {
        // three-kind vocabulary with non-trivial parameters on both sides
        let corpus = vec![vec![
            NodeKind::IfStatement,
            NodeKind::ReturnStatement,
            NodeKind::Literal,
        ]];
        let vocab = NodeVocabulary::from_sequences(&corpus);
        let config = CbowConfig { embedding_dim: 4, seed: 5, ..CbowConfig::default() };
        let mut matrix = EmbeddingMatrix::initialize(vocab, config);
        let mut rng = ChaCha20Rng::seed_from_u64(99);
        for row in matrix.output_vectors.iter_mut() {
            for v in row.iter_mut() {
                *v = rng.random_range(-0.3..0.3);
            }
        }

        let center = 0usize;
        let context = vec![1usize, 2, 1]; // duplicate on purpose
        let negatives = vec![2usize, 1];
        let grads = example_gradients(&matrix, center, &context, &negatives);

        type Bump = Box<dyn FnMut(&mut EmbeddingMatrix, f64)>;
        let eps = 1e-6;
        let check = |analytic: f64, mut bump: Bump| {
            let mut plus = matrix.clone();
            bump(&mut plus, eps);
            let mut minus = matrix.clone();
            bump(&mut minus, -eps);
            let fd = (example_loss(&plus, center, &context, &negatives)
                - example_loss(&minus, center, &context, &negatives))
                / (2.0 * eps);
            let denom = fd.abs().max(1e-6);
            assert!(
                (analytic - fd).abs() / denom <= 1e-4,
                "gradient mismatch: analytic {analytic}, fd {fd}"
            );
        };
        for (row, g) in &grads.d_input {
            for (dim, &a) in g.iter().enumerate() {
                let (r, k) = (*row, dim);
                check(a, Box::new(move |m, e| m.input_vectors[r][k] += e));
            }
        }
        for (row, g) in &grads.d_output {
            for (dim, &a) in g.iter().enumerate() {
                let (r, k) = (*row, dim);
                check(a, Box::new(move |m, e| m.output_vectors[r][k] += e));
            }
        }
    }

    fn cosine(a: &[f64], b: &[f64]) -> f64 {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        dot / (na * nb)
    }

    #[test]
    fn shared_contexts_pull_kinds_together() {
        // A and B always appear between the same neighbors; C lives in a
        // disjoint context. Distributional similarity should place A
        // closer to B than to C for nearly every seed.
        let a = NodeKind::IfStatement;
        let b = NodeKind::WhileStatement;
        let c = NodeKind::Literal;
        let mut corpus = Vec::new();
        for _ in 0..30 {
            corpus.push(vec![NodeKind::MethodCall, a, NodeKind::ReturnStatement]);
            corpus.push(vec![NodeKind::MethodCall, b, NodeKind::ReturnStatement]);
            corpus.push(vec![NodeKind::Identifier, c, NodeKind::BinaryExpression]);
        }
        let mut wins = 0;
        for seed in 0..10 {
            let config = CbowConfig { seed, ..CbowConfig::default() };
            let m = train_cbow(&corpus, &config).unwrap();
            let va = &m.input_vectors[m.vocabulary.index_of(a).unwrap()];
            let vb = &m.input_vectors[m.vocabulary.index_of(b).unwrap()];
            let vc = &m.input_vectors[m.vocabulary.index_of(c).unwrap()];
            if cosine(va, vb) > cosine(va, vc) {
                wins += 1;
            }
        }
        assert!(wins >= 9, "only {wins}/10 seeds ranked the shared-context pair closer");
    }

    #[test]
    fn file_embedding_is_the_mean_of_member_rows() {
        let corpus = build_corpus(&fixture_asts(), &SELECTED_KINDS);
        let matrix = train_cbow(&corpus, &small_config(1)).unwrap();

        // two-kind file: hand-computed mean of the two rows
        let src = "class T { int x = 1; }";
        let ast = parse_java(src).unwrap();
        let seq = build_corpus(std::slice::from_ref(&ast), &SELECTED_KINDS);
        let emb = embed_file(&ast, &matrix);
        assert!(!emb.empty);
        let mut expected = vec![0.0; matrix.config.embedding_dim];
        for kind in &seq[0] {
            let row = matrix.vocabulary.index_of(*kind).unwrap();
            for (e, v) in expected.iter_mut().zip(&matrix.input_vectors[row]) {
                *e += v;
            }
        }
        for e in expected.iter_mut() {
            *e /= seq[0].len() as f64;
        }
        for (got, want) in emb.values.iter().zip(&expected) {
            assert_abs_diff_eq!(got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_kind_file_embeds_as_that_row() {
        let corpus = vec![
            vec![NodeKind::Identifier, NodeKind::Literal],
            vec![NodeKind::Literal, NodeKind::Identifier],
        ];
        let matrix = train_cbow(&corpus, &small_config(3)).unwrap();
        // a tree whose only selected node kind is Identifier, twice
        let ast = parse_java("class A { Object o = x; Object p = y; }").unwrap();
        let emb = embed_file(&ast, &matrix);
        // selected kinds present: VariableDeclaration (OOV), declarator is
        // unselected, Identifier x and y (in vocab)
        let row = matrix.vocabulary.index_of(NodeKind::Identifier).unwrap();
        for (got, want) in emb.values.iter().zip(&matrix.input_vectors[row]) {
            assert_abs_diff_eq!(got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn empty_selection_embeds_as_zero_with_flag() {
        let corpus = build_corpus(&fixture_asts(), &SELECTED_KINDS);
        let matrix = train_cbow(&corpus, &small_config(1)).unwrap();
        let ast = parse_java("class A {}").unwrap();
        let emb = embed_file(&ast, &matrix);
        assert!(emb.empty);
        assert!(emb.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn embedding_csv_shape_and_precision() {
        let corpus = build_corpus(&fixture_asts(), &SELECTED_KINDS);
        let matrix = train_cbow(&corpus, &small_config(2)).unwrap();
        let mut buf = Vec::new();
        write_embedding_csv(&matrix, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("kind,dim_0,"));
        assert!(header.ends_with(&format!("dim_{}", matrix.config.embedding_dim - 1)));
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), matrix.vocabulary.len());
        // values round-trip to nine significant digits
        for (row, expected) in rows.iter().zip(&matrix.input_vectors) {
            let cells: Vec<&str> = row.split(',').collect();
            for (cell, want) in cells[1..].iter().zip(expected) {
                let parsed: f64 = cell.parse().unwrap();
                let tol = want.abs().max(1e-12) * 1e-8;
                assert!((parsed - want).abs() <= tol, "{cell} vs {want}");
            }
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(16))]

            #[test]
            fn embedding_ignores_sequence_order(seed in 0u64..100) {
                // mean pooling: membership matters, order does not — two
                // sources with the same multiset of selected kinds in
                // different orders embed identically
                let corpus = build_corpus(&fixture_asts(), &SELECTED_KINDS);
                let matrix = train_cbow(&corpus, &small_config(seed)).unwrap();
                // a: declaration+literal inside the method, then return
                // b: the declaration+literal hoisted to a field, before
                //    the method — same multiset, different order
                let a = parse_java("class A { void m() { int x = 1; return; } }").unwrap();
                let b = parse_java("class B { int y = 2; void n() { return; } }").unwrap();
                let mut sa = build_corpus(std::slice::from_ref(&a), &SELECTED_KINDS).remove(0);
                let mut sb = build_corpus(std::slice::from_ref(&b), &SELECTED_KINDS).remove(0);
                prop_assert_ne!(&sa, &sb); // genuinely different orders
                sa.sort();
                sb.sort();
                prop_assert_eq!(sa, sb); // same membership
                let ea = embed_file(&a, &matrix);
                let eb = embed_file(&b, &matrix);
                for (x, y) in ea.values.iter().zip(&eb.values) {
                    prop_assert!((x - y).abs() < 1e-12);
                }
            }
        }
    }
}
