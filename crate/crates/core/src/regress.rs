//! Regression models for runtime prediction: ordinary least squares,
//! squared-loss SGD, ridge, lasso, a variance-reduction decision tree,
//! and a random forest, plus mean-absolute-error scoring and k-fold
//! cross-validated comparison.
//!
//! Every fit is deterministic given its seed; gradient and sampling
//! randomness comes from a seeded ChaCha generator, never from global
//! state.

use rand::prelude::*;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

/// The six model kinds, in the fixed order reports use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Linear,
    Sgd,
    Ridge,
    Lasso,
    DecisionTree,
    RandomForest,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::Linear,
        ModelKind::Sgd,
        ModelKind::Ridge,
        ModelKind::Lasso,
        ModelKind::DecisionTree,
        ModelKind::RandomForest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Linear => "linear",
            ModelKind::Sgd => "sgd",
            ModelKind::Ridge => "ridge",
            ModelKind::Lasso => "lasso",
            ModelKind::DecisionTree => "decision_tree",
            ModelKind::RandomForest => "random_forest",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// A model kind with its hyperparameters. `default_for` supplies the
/// standard configuration; fields are plain so callers can adjust them.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub ridge_alpha: f64,
    pub lasso_alpha: f64,
    pub sgd_learning_rate: f64,
    pub sgd_epochs: usize,
    /// `None` grows the tree until leaves are pure.
    pub tree_max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub forest_trees: usize,
    /// Root is depth 0, so `Some(2)` allows two split levels.
    pub forest_max_depth: Option<usize>,
    /// Per-split feature subset size for the forest; `None` means
    /// `max(1, ceil(p/3))`.
    pub features_per_split: Option<usize>,
    pub bootstrap: bool,
    pub seed: u64,
}

impl ModelSpec {
    pub fn default_for(kind: ModelKind, seed: u64) -> Self {
        ModelSpec {
            kind,
            ridge_alpha: 1.0,
            lasso_alpha: 0.1,
            sgd_learning_rate: 0.01,
            sgd_epochs: 200,
            tree_max_depth: Some(4),
            min_samples_leaf: 1,
            forest_trees: 100,
            forest_max_depth: Some(2),
            features_per_split: None,
            bootstrap: true,
            seed,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FitError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite input: {0}")]
    NonFiniteInput(String),
    #[error("fold {fold}: {source}")]
    InFold {
        fold: usize,
        #[source]
        source: Box<FitError>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum PredictError {
    #[error("dimension mismatch: model expects {expected} features, row has {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, thiserror::Error)]
#[error("length mismatch: {actual} actual vs {predicted} predicted")]
pub struct LengthMismatch {
    pub actual: usize,
    pub predicted: usize,
}

/// Per-feature standardization statistics, learned on the training fold
/// only. Zero-variance features scale by 1 so they pass through centered.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

impl Scaler {
    fn fit(x: &[Vec<f64>]) -> Self {
        let n = x.len() as f64;
        let p = x[0].len();
        let mut means = vec![0.0; p];
        for row in x {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in means.iter_mut() {
            *m /= n;
        }
        let mut sds = vec![0.0; p];
        for row in x {
            for ((s, v), m) in sds.iter_mut().zip(row).zip(&means) {
                *s += (v - m) * (v - m);
            }
        }
        for s in sds.iter_mut() {
            *s = (*s / n).sqrt();
            if *s == 0.0 {
                *s = 1.0;
            }
        }
        Scaler { means, sds }
    }

    fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.means)
            .zip(&self.sds)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }

    fn transform(&self, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
        x.iter().map(|r| self.transform_row(r)).collect()
    }
}

/// A fitted regression tree stored as a flat arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<TreeNode>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf { value: f64 },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

impl Tree {
    fn predict_row(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                TreeNode::Leaf { value } => return *value,
                TreeNode::Split { feature, threshold, left, right } => {
                    i = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    /// Rebuild a tree from its node list (the persistence path). Child
    /// indices must point into the list so prediction cannot escape it.
    pub fn from_nodes(nodes: Vec<TreeNode>) -> Result<Tree, String> {
        if nodes.is_empty() {
            return Err("a tree needs at least one node".to_string());
        }
        for (i, node) in nodes.iter().enumerate() {
            if let TreeNode::Split { left, right, .. } = node {
                if *left >= nodes.len() || *right >= nodes.len() {
                    return Err(format!("node {i} links past the node list"));
                }
            }
        }
        Ok(Tree { nodes })
    }
}

/// A fitted model ready to predict.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub spec: ModelSpec,
    pub params: FittedParams,
    /// Mean of the training targets; reporting uses it as a baseline.
    pub target_mean: f64,
    /// Feature-row width the model was trained on.
    pub n_features: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FittedParams {
    /// Coefficients over raw features.
    Linear { weights: Vec<f64>, intercept: f64 },
    /// Coefficients over standardized features.
    Scaled { weights: Vec<f64>, intercept: f64, scaler: Scaler },
    Tree { tree: Tree },
    Forest { trees: Vec<Tree> },
}

// ----- validation -----------------------------------------------------------

fn validate(x: &[Vec<f64>], y: &[f64]) -> Result<(), FitError> {
    if x.len() < 2 {
        return Err(FitError::DimensionMismatch(format!(
            "need at least 2 rows, got {}",
            x.len()
        )));
    }
    if x.len() != y.len() {
        return Err(FitError::DimensionMismatch(format!(
            "{} feature rows vs {} targets",
            x.len(),
            y.len()
        )));
    }
    let p = x[0].len();
    if p == 0 {
        return Err(FitError::DimensionMismatch("zero-width feature rows".to_string()));
    }
    for (i, row) in x.iter().enumerate() {
        if row.len() != p {
            return Err(FitError::DimensionMismatch(format!(
                "row {i} has {} features, expected {p}",
                row.len()
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(FitError::NonFiniteInput(format!("feature row {i}")));
        }
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(FitError::NonFiniteInput(format!("target {i}")));
    }
    Ok(())
}

// ----- linear algebra -------------------------------------------------------

/// Solve `A·x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot degenerates (singular system).
fn solve_linear_system(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = a.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot_row][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let (upper, below) = a.split_at_mut(col + 1);
        let pivot = &upper[col];
        let pivot_b = b[col];
        for (offset, row) in below.iter_mut().enumerate() {
            let factor = row[col] / pivot[col];
            if factor == 0.0 {
                continue;
            }
            for (value, pivot_value) in row[col..].iter_mut().zip(&pivot[col..]) {
                *value -= factor * pivot_value;
            }
            b[col + 1 + offset] -= factor * pivot_b;
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut sum = b[col];
        for k in col + 1..n {
            sum -= a[col][k] * x[k];
        }
        x[col] = sum / a[col][col];
    }
    Some(x)
}

/// Gram matrix `XᵀX` and moment vector `Xᵀy` for rows `x`.
fn normal_equations(x: &[Vec<f64>], y: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let p = x[0].len();
    let mut gram = vec![vec![0.0; p]; p];
    let mut moment = vec![0.0; p];
    for (row, &target) in x.iter().zip(y) {
        for i in 0..p {
            for j in 0..p {
                gram[i][j] += row[i] * row[j];
            }
            moment[i] += row[i] * target;
        }
    }
    (gram, moment)
}

// ----- model fits -------------------------------------------------------------

/// Ordinary least squares with an intercept column; on a singular Gram
/// matrix the diagonal is nudged by 1e-8 (ridge fallback).
fn fit_linear(x: &[Vec<f64>], y: &[f64]) -> (Vec<f64>, f64) {
    let augmented: Vec<Vec<f64>> = x
        .iter()
        .map(|row| {
            let mut r = row.clone();
            r.push(1.0);
            r
        })
        .collect();
    let (gram, moment) = normal_equations(&augmented, y);
    let solution = solve_linear_system(gram.clone(), moment.clone()).unwrap_or_else(|| {
        let mut ridged = gram;
        for (i, row) in ridged.iter_mut().enumerate() {
            row[i] += 1e-8;
        }
        solve_linear_system(ridged, moment).expect("regularized system is non-singular")
    });
    let intercept = *solution.last().unwrap();
    let weights = solution[..solution.len() - 1].to_vec();
    (weights, intercept)
}

/// Ridge on standardized features with centered targets:
/// `(XᵀX + αI)w = Xᵀ(y - ȳ)`; the unpenalized intercept is `ȳ`.
fn fit_ridge(x_std: &[Vec<f64>], y: &[f64], alpha: f64) -> (Vec<f64>, f64) {
    let y_mean = y.iter().sum::<f64>() / y.len() as f64;
    let centered: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let (mut gram, moment) = normal_equations(x_std, &centered);
    for (i, row) in gram.iter_mut().enumerate() {
        row[i] += alpha;
    }
    let weights = solve_linear_system(gram, moment).expect("ridge system is non-singular");
    (weights, y_mean)
}

/// Lasso by cyclic coordinate descent on standardized features with
/// centered targets, objective `(1/2n)·‖y − Xw‖² + α·Σ|w|`.
fn fit_lasso(x_std: &[Vec<f64>], y: &[f64], alpha: f64) -> (Vec<f64>, f64) {
    let n = x_std.len();
    let p = x_std[0].len();
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = y.iter().map(|v| v - y_mean).collect();

    // column norms z_j = (1/n)·‖x_j‖²
    let mut z = vec![0.0; p];
    for row in x_std {
        for (zj, v) in z.iter_mut().zip(row) {
            *zj += v * v;
        }
    }
    for zj in z.iter_mut() {
        *zj /= n as f64;
    }

    let soft_threshold = |rho: f64, a: f64| {
        if rho > a {
            rho - a
        } else if rho < -a {
            rho + a
        } else {
            0.0
        }
    };

    let mut weights = vec![0.0; p];
    let mut residual = centered; // r = y_c − X·w, maintained incrementally
    for _sweep in 0..1000 {
        let mut max_delta = 0.0f64;
        for j in 0..p {
            if z[j] == 0.0 {
                continue; // constant column: coefficient stays 0
            }
            // rho_j = (1/n)·x_jᵀ(r + x_j·w_j)
            let mut rho = 0.0;
            for (row, r) in x_std.iter().zip(&residual) {
                rho += row[j] * (r + row[j] * weights[j]);
            }
            rho /= n as f64;
            let new_w = soft_threshold(rho, alpha) / z[j];
            let delta = new_w - weights[j];
            if delta != 0.0 {
                for (row, r) in x_std.iter().zip(residual.iter_mut()) {
                    *r -= row[j] * delta;
                }
                weights[j] = new_w;
            }
            max_delta = max_delta.max(delta.abs());
        }
        if max_delta < 1e-6 {
            break;
        }
    }
    (weights, y_mean)
}

/// Half squared error of one SGD example: `½(w·x + b − y)²`.
pub fn sgd_example_loss(weights: &[f64], intercept: f64, x: &[f64], y: f64) -> f64 {
    let pred: f64 = weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + intercept;
    0.5 * (pred - y) * (pred - y)
}

/// Analytic gradient of [`sgd_example_loss`] in `(weights, intercept)`.
pub fn sgd_example_gradient(
    weights: &[f64],
    intercept: f64,
    x: &[f64],
    y: f64,
) -> (Vec<f64>, f64) {
    let err: f64 = weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + intercept - y;
    (x.iter().map(|v| err * v).collect(), err)
}

/// Squared-loss SGD on standardized features: constant learning rate,
/// one pass per epoch in a seeded shuffled order.
fn fit_sgd(x_std: &[Vec<f64>], y: &[f64], lr: f64, epochs: usize, seed: u64) -> (Vec<f64>, f64) {
    let p = x_std[0].len();
    let mut weights = vec![0.0; p];
    let mut intercept = 0.0;
    let mut order: Vec<usize> = (0..x_std.len()).collect();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for _epoch in 0..epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let (dw, db) = sgd_example_gradient(&weights, intercept, &x_std[i], y[i]);
            for (w, g) in weights.iter_mut().zip(&dw) {
                *w -= lr * g;
            }
            intercept -= lr * db;
        }
    }
    (weights, intercept)
}

struct TreeParams {
    max_depth: Option<usize>,
    min_samples_leaf: usize,
    /// Features examined per split; `None` means all.
    features_per_split: Option<usize>,
}

/// Grow a regression tree by exhaustive variance-reduction splits:
/// thresholds are midpoints between consecutive distinct sorted values,
/// the first strictly best (feature, threshold) wins ties.
fn build_tree(
    x: &[Vec<f64>],
    y: &[f64],
    rows: &[usize],
    params: &TreeParams,
    rng: &mut Option<&mut ChaCha20Rng>,
) -> Tree {
    let mut nodes = Vec::new();
    grow(x, y, rows, 0, params, rng, &mut nodes);
    Tree { nodes }
}

fn grow(
    x: &[Vec<f64>],
    y: &[f64],
    rows: &[usize],
    depth: usize,
    params: &TreeParams,
    rng: &mut Option<&mut ChaCha20Rng>,
    nodes: &mut Vec<TreeNode>,
) -> usize {
    let mean = rows.iter().map(|&r| y[r]).sum::<f64>() / rows.len() as f64;
    let depth_reached = params.max_depth.is_some_and(|d| depth >= d);
    if depth_reached || rows.len() < 2 * params.min_samples_leaf || rows.len() < 2 {
        nodes.push(TreeNode::Leaf { value: mean });
        return nodes.len() - 1;
    }

    let p = x[0].len();
    let features: Vec<usize> = match (params.features_per_split, rng.as_deref_mut()) {
        (Some(m), Some(rng)) if m < p => {
            let mut picked = rand::seq::index::sample(rng, p, m).into_vec();
            picked.sort_unstable();
            picked
        }
        _ => (0..p).collect(),
    };

    // sum of squared errors of a segment, from its moments
    let sse = |sum: f64, sumsq: f64, n: f64| sumsq - sum * sum / n;

    let total_sum: f64 = rows.iter().map(|&r| y[r]).sum();
    let total_sumsq: f64 = rows.iter().map(|&r| y[r] * y[r]).sum();
    let n = rows.len() as f64;
    let parent_sse = sse(total_sum, total_sumsq, n);

    let mut best: Option<(f64, usize, f64)> = None; // (sse, feature, threshold)
    for &feature in &features {
        let mut sorted: Vec<usize> = rows.to_vec();
        sorted.sort_by(|&a, &b| x[a][feature].partial_cmp(&x[b][feature]).unwrap());
        let mut left_sum = 0.0;
        let mut left_sumsq = 0.0;
        for i in 1..sorted.len() {
            let prev = sorted[i - 1];
            left_sum += y[prev];
            left_sumsq += y[prev] * y[prev];
            let (v_prev, v_here) = (x[prev][feature], x[sorted[i]][feature]);
            if v_prev == v_here {
                continue;
            }
            if i < params.min_samples_leaf || sorted.len() - i < params.min_samples_leaf {
                continue;
            }
            let right_sum = total_sum - left_sum;
            let right_sumsq = total_sumsq - left_sumsq;
            let split_sse = sse(left_sum, left_sumsq, i as f64)
                + sse(right_sum, right_sumsq, (sorted.len() - i) as f64);
            if best.as_ref().is_none_or(|(b, _, _)| split_sse < *b) {
                best = Some((split_sse, feature, (v_prev + v_here) / 2.0));
            }
        }
    }

    match best {
        // require a strict improvement so constant targets terminate
        Some((split_sse, feature, threshold)) if split_sse < parent_sse - 1e-12 => {
            let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
                rows.iter().partition(|&&r| x[r][feature] <= threshold);
            let index = nodes.len();
            nodes.push(TreeNode::Split { feature, threshold, left: 0, right: 0 });
            let left = grow(x, y, &left_rows, depth + 1, params, rng, nodes);
            let right = grow(x, y, &right_rows, depth + 1, params, rng, nodes);
            if let TreeNode::Split { left: l, right: r, .. } = &mut nodes[index] {
                *l = left;
                *r = right;
            }
            index
        }
        _ => {
            nodes.push(TreeNode::Leaf { value: mean });
            nodes.len() - 1
        }
    }
}

/// Fit one model. Standardization (for sgd/ridge/lasso) is learned from
/// these rows only, so cross-validation never leaks test-fold statistics.
pub fn fit(spec: &ModelSpec, x: &[Vec<f64>], y: &[f64]) -> Result<TrainedModel, FitError> {
    validate(x, y)?;
    let p = x[0].len();
    let target_mean = y.iter().sum::<f64>() / y.len() as f64;
    let params = match spec.kind {
        ModelKind::Linear => {
            let (weights, intercept) = fit_linear(x, y);
            FittedParams::Linear { weights, intercept }
        }
        ModelKind::Sgd => {
            let scaler = Scaler::fit(x);
            let x_std = scaler.transform(x);
            let (weights, intercept) =
                fit_sgd(&x_std, y, spec.sgd_learning_rate, spec.sgd_epochs, spec.seed);
            FittedParams::Scaled { weights, intercept, scaler }
        }
        ModelKind::Ridge => {
            let scaler = Scaler::fit(x);
            let x_std = scaler.transform(x);
            let (weights, intercept) = fit_ridge(&x_std, y, spec.ridge_alpha);
            FittedParams::Scaled { weights, intercept, scaler }
        }
        ModelKind::Lasso => {
            let scaler = Scaler::fit(x);
            let x_std = scaler.transform(x);
            let (weights, intercept) = fit_lasso(&x_std, y, spec.lasso_alpha);
            FittedParams::Scaled { weights, intercept, scaler }
        }
        ModelKind::DecisionTree => {
            let rows: Vec<usize> = (0..x.len()).collect();
            let tree_params = TreeParams {
                max_depth: spec.tree_max_depth,
                min_samples_leaf: spec.min_samples_leaf,
                features_per_split: None,
            };
            let tree = build_tree(x, y, &rows, &tree_params, &mut None);
            FittedParams::Tree { tree }
        }
        ModelKind::RandomForest => {
            let n = x.len();
            let m = spec
                .features_per_split
                .unwrap_or_else(|| ((p as f64) / 3.0).ceil() as usize)
                .max(1);
            let tree_params = TreeParams {
                max_depth: spec.forest_max_depth,
                min_samples_leaf: spec.min_samples_leaf,
                features_per_split: Some(m),
            };
            let mut master = ChaCha20Rng::seed_from_u64(spec.seed);
            let mut trees = Vec::with_capacity(spec.forest_trees);
            for _ in 0..spec.forest_trees {
                let mut tree_rng = ChaCha20Rng::seed_from_u64(master.random());
                let rows: Vec<usize> = if spec.bootstrap {
                    (0..n).map(|_| tree_rng.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                trees.push(build_tree(x, y, &rows, &tree_params, &mut Some(&mut tree_rng)));
            }
            FittedParams::Forest { trees }
        }
    };
    Ok(TrainedModel { spec: spec.clone(), params, target_mean, n_features: p })
}

impl TrainedModel {
    pub fn predict(&self, x: &[Vec<f64>]) -> Result<Vec<f64>, PredictError> {
        let expected = self.n_features;
        for row in x {
            if row.len() != expected {
                return Err(PredictError::DimensionMismatch { expected, got: row.len() });
            }
        }
        let out = match &self.params {
            FittedParams::Linear { weights, intercept } => x
                .iter()
                .map(|row| weights.iter().zip(row).map(|(w, v)| w * v).sum::<f64>() + intercept)
                .collect(),
            FittedParams::Scaled { weights, intercept, scaler } => x
                .iter()
                .map(|row| {
                    let std = scaler.transform_row(row);
                    weights.iter().zip(&std).map(|(w, v)| w * v).sum::<f64>() + intercept
                })
                .collect(),
            FittedParams::Tree { tree } => x.iter().map(|row| tree.predict_row(row)).collect(),
            FittedParams::Forest { trees } => x
                .iter()
                .map(|row| {
                    trees.iter().map(|t| t.predict_row(row)).sum::<f64>() / trees.len() as f64
                })
                .collect(),
        };
        Ok(out)
    }
}

/// Mean absolute error: `(1/n)·Σ|actualᵢ − predictedᵢ|`.
pub fn mae(actual: &[f64], predicted: &[f64]) -> Result<f64, LengthMismatch> {
    if actual.len() != predicted.len() || actual.is_empty() {
        return Err(LengthMismatch { actual: actual.len(), predicted: predicted.len() });
    }
    let sum: f64 = actual.iter().zip(predicted).map(|(a, p)| (a - p).abs()).sum();
    Ok(sum / actual.len() as f64)
}

/// One model's cross-validation outcome.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ModelEval {
    pub kind: String,
    pub fold_mae: Vec<f64>,
    pub mean_mae_seconds: f64,
    /// `mean MAE / mean actual × 100`; absent when the target mean is
    /// not positive (the ratio would be meaningless).
    pub relative_mae_percent: Option<f64>,
}

/// Cross-validated comparison of the six model kinds.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EvalReport {
    pub k: usize,
    pub seed: u64,
    pub dataset_digest: String,
    pub models: Vec<ModelEval>,
}

impl EvalReport {
    /// Pretty-printed JSON with a trailing newline, for stable on-disk
    /// artifacts.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Score one spec across the fold plan: fit on each fold's complement,
/// evaluate MAE on the fold. `folds` holds test-row indices per fold.
pub fn cross_validate(
    spec: &ModelSpec,
    x: &[Vec<f64>],
    y: &[f64],
    folds: &[Vec<usize>],
) -> Result<ModelEval, FitError> {
    let mut fold_mae = Vec::with_capacity(folds.len());
    for (fold_index, test_rows) in folds.iter().enumerate() {
        let in_test = {
            let mut mask = vec![false; x.len()];
            for &r in test_rows {
                mask[r] = true;
            }
            mask
        };
        let mut x_train = Vec::new();
        let mut y_train = Vec::new();
        for (i, row) in x.iter().enumerate() {
            if !in_test[i] {
                x_train.push(row.clone());
                y_train.push(y[i]);
            }
        }
        let model = fit(spec, &x_train, &y_train).map_err(|e| FitError::InFold {
            fold: fold_index,
            source: Box::new(e),
        })?;
        let x_test: Vec<Vec<f64>> = test_rows.iter().map(|&r| x[r].clone()).collect();
        let y_test: Vec<f64> = test_rows.iter().map(|&r| y[r]).collect();
        let predictions = model.predict(&x_test).expect("widths match by construction");
        fold_mae.push(mae(&y_test, &predictions).expect("equal lengths by construction"));
    }
    let mean_mae = fold_mae.iter().sum::<f64>() / fold_mae.len() as f64;
    let target_mean = y.iter().sum::<f64>() / y.len() as f64;
    let relative = if target_mean > 0.0 {
        Some(mean_mae / target_mean * 100.0)
    } else {
        None
    };
    Ok(ModelEval {
        kind: spec.kind.name().to_string(),
        fold_mae,
        mean_mae_seconds: mean_mae,
        relative_mae_percent: relative,
    })
}

/// Cross-validate all six model kinds in their fixed order.
pub fn evaluate_all(
    x: &[Vec<f64>],
    y: &[f64],
    folds: &[Vec<usize>],
    k: usize,
    seed: u64,
    dataset_digest: &str,
) -> Result<EvalReport, FitError> {
    let mut models = Vec::with_capacity(ModelKind::ALL.len());
    for kind in ModelKind::ALL {
        let spec = ModelSpec::default_for(kind, seed);
        models.push(cross_validate(&spec, x, y, folds)?);
    }
    Ok(EvalReport { k, seed, dataset_digest: dataset_digest.to_string(), models })
}
