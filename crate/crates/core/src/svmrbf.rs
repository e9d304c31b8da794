//! Soft-margin SVM with an RBF kernel, trained by SMO with second-order
//! working-set selection, plus stratified k-fold splitting and the five
//! evaluation metrics.

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pairfeat::PairDataset;

const TAU: f64 = 1e-12;

#[inline]
fn sq_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// `exp(−γ‖x − y‖²)`.
pub fn rbf_kernel(x: &[f64], y: &[f64], gamma: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok((-gamma * sq_dist(x, y)).exp())
}

/// How the kernel width is chosen for each training split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaRule {
    /// `1 / (p · var(X))` over all entries of the training matrix.
    Scale,
    Fixed(f64),
}

impl GammaRule {
    pub fn resolve(self, x: &[f64], width: usize) -> f64 {
        match self {
            GammaRule::Fixed(g) => g,
            GammaRule::Scale => {
                if x.is_empty() || width == 0 {
                    return 1.0;
                }
                let n = x.len() as f64;
                let mean = x.iter().sum::<f64>() / n;
                let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
                if var > 0.0 {
                    1.0 / (width as f64 * var)
                } else {
                    1.0
                }
            }
        }
    }
}

impl FromStr for GammaRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "scale" => Ok(GammaRule::Scale),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|g| *g > 0.0)
                .map(GammaRule::Fixed)
                .ok_or_else(|| Error::Config(format!("gamma must be `scale` or a positive number, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SvmParams {
    pub c: f64,
    pub gamma: GammaRule,
    /// Stopping tolerance on the maximal KKT violation.
    pub tol: f64,
    pub max_iterations: usize,
    /// Standardize features with training-split statistics.
    pub standardize: bool,
    /// Largest training split whose kernel matrix is held in memory.
    pub cache_limit: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 3.5,
            gamma: GammaRule::Scale,
            tol: 1e-3,
            max_iterations: 10_000_000,
            standardize: false,
            cache_limit: 20_000,
        }
    }
}

/// Per-column affine map fitted on training data.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    mean: Vec<f64>,
    scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &[f64], width: usize) -> Self {
        let n = (x.len() / width.max(1)).max(1) as f64;
        let mut mean = vec![0.0; width];
        for row in x.chunks(width.max(1)) {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; width];
        for row in x.chunks(width.max(1)) {
            for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let scale = var
            .iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > 0.0 { sd } else { 1.0 }
            })
            .collect();
        Self { mean, scale }
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        let w = self.mean.len();
        x.chunks(w.max(1))
            .flat_map(|row| {
                row.iter()
                    .zip(&self.mean)
                    .zip(&self.scale)
                    .map(|((v, m), s)| (v - m) / s)
            })
            .collect()
    }
}

/// Raw output of the dual solver, indexed like the training set.
#[derive(Debug, Clone)]
pub struct DualSolution {
    pub alpha: Vec<f64>,
    /// Gradient of `½αᵀQα − eᵀα` at the solution.
    pub gradient: Vec<f64>,
    pub bias: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl DualSolution {
    /// Dual objective `Σα − ½ αᵀQα`, read off the maintained gradient.
    pub fn objective(&self) -> f64 {
        // αᵀQα = αᵀ(G + e)
        let quad: f64 = self
            .alpha
            .iter()
            .zip(&self.gradient)
            .map(|(a, g)| a * (g + 1.0))
            .sum();
        self.alpha.iter().sum::<f64>() - 0.5 * quad
    }
}

enum KernelRows<'a> {
    Dense(Vec<f64>),
    OnDemand { x: &'a [f64], width: usize, gamma: f64 },
}

impl KernelRows<'_> {
    fn row<'b>(&'b self, i: usize, n: usize, buf: &'b mut Vec<f64>) -> &'b [f64] {
        match self {
            KernelRows::Dense(k) => &k[i * n..(i + 1) * n],
            KernelRows::OnDemand { x, width, gamma } => {
                let xi = &x[i * width..(i + 1) * width];
                buf.clear();
                buf.extend((0..n).map(|j| (-gamma * sq_dist(xi, &x[j * width..(j + 1) * width])).exp()));
                buf
            }
        }
    }
}

/// Solve the soft-margin dual with SMO (maximal-violating first index,
/// second-order choice of the partner). `y` holds ±1.
pub fn solve_dual(x: &[f64], width: usize, y: &[f64], c: f64, gamma: f64, tol: f64, max_iterations: usize, cache_limit: usize) -> Result<DualSolution> {
    let n = y.len();
    if x.len() != n * width {
        return Err(Error::DimensionMismatch {
            expected: n * width,
            got: x.len(),
        });
    }
    if !(c > 0.0) {
        return Err(Error::Invalid(format!("C must be positive, got {c}")));
    }
    if !(y.iter().any(|&v| v > 0.0) && y.iter().any(|&v| v < 0.0)) {
        return Err(Error::SingleClass);
    }
    let kernel = if n <= cache_limit {
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            let xi = &x[i * width..(i + 1) * width];
            k[i * n + i] = 1.0;
            for j in 0..i {
                let v = (-gamma * sq_dist(xi, &x[j * width..(j + 1) * width])).exp();
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
        }
        KernelRows::Dense(k)
    } else {
        KernelRows::OnDemand { x, width, gamma }
    };
    // RBF diagonal is exactly one
    let qd = 1.0;

    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut ki_buf = Vec::with_capacity(n);
    let mut kj_buf = Vec::with_capacity(n);
    let at_upper = |a: f64| a >= c;
    let at_lower = |a: f64| a <= 0.0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iterations {
        // first index: maximal violation over I_up
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = usize::MAX;
        for t in 0..n {
            let cand = if y[t] > 0.0 {
                (!at_upper(alpha[t])).then(|| -grad[t])
            } else {
                (!at_lower(alpha[t])).then(|| grad[t])
            };
            if let Some(v) = cand {
                if v >= gmax {
                    gmax = v;
                    i_sel = t;
                }
            }
        }
        if i_sel == usize::MAX {
            converged = true;
            break;
        }
        let ki = kernel.row(i_sel, n, &mut ki_buf);

        // second index: largest guaranteed decrease over I_low
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_sel = usize::MAX;
        let mut best_obj = f64::INFINITY;
        for t in 0..n {
            let q_it = y[i_sel] * y[t] * ki[t];
            if y[t] > 0.0 {
                if !at_lower(alpha[t]) {
                    let diff = gmax + grad[t];
                    gmax2 = gmax2.max(grad[t]);
                    if diff > 0.0 {
                        let quad = qd + qd - 2.0 * y[i_sel] * q_it;
                        let obj = -(diff * diff) / if quad > 0.0 { quad } else { TAU };
                        if obj <= best_obj {
                            best_obj = obj;
                            j_sel = t;
                        }
                    }
                }
            } else if !at_upper(alpha[t]) {
                let diff = gmax - grad[t];
                gmax2 = gmax2.max(-grad[t]);
                if diff > 0.0 {
                    let quad = qd + qd + 2.0 * y[i_sel] * q_it;
                    let obj = -(diff * diff) / if quad > 0.0 { quad } else { TAU };
                    if obj <= best_obj {
                        best_obj = obj;
                        j_sel = t;
                    }
                }
            }
        }
        if gmax + gmax2 < tol || j_sel == usize::MAX {
            converged = true;
            break;
        }
        iterations += 1;
        let (i, j) = (i_sel, j_sel);
        let kj = kernel.row(j, n, &mut kj_buf);
        let q_ij = y[i] * y[j] * ki[j];
        let (old_i, old_j) = (alpha[i], alpha[j]);

        if y[i] != y[j] {
            let quad = (qd + qd + 2.0 * q_ij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (qd + qd - 2.0 * q_ij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * ki[t] * di + y[j] * kj[t] * dj);
        }
        debug_assert!(alpha[i] >= 0.0 && alpha[i] <= c && alpha[j] >= 0.0 && alpha[j] <= c);
    }

    // bias from free vectors, or the midpoint of the feasible interval
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut free_sum) = (0usize, 0.0);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if at_upper(alpha[t]) {
            if y[t] < 0.0 { ub = ub.min(yg) } else { lb = lb.max(yg) }
        } else if at_lower(alpha[t]) {
            if y[t] > 0.0 { ub = ub.min(yg) } else { lb = lb.max(yg) }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    let rho = if free > 0 { free_sum / free as f64 } else { (ub + lb) / 2.0 };

    Ok(DualSolution {
        alpha,
        gradient: grad,
        bias: -rho,
        converged,
        iterations,
    })
}

#[derive(Debug, Clone)]
pub struct SvmModel {
    /// Row-major support vectors (already standardized if enabled).
    pub support_vectors: Vec<f64>,
    pub width: usize,
    /// `αᵢ·yᵢ` per support vector.
    pub dual_coef: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
    pub c: f64,
    pub converged: bool,
    pub iterations: usize,
    pub standardizer: Option<Standardizer>,
}

/// Fit on row-major `x` (`y` in ±1). A run that hits the iteration cap
/// still returns its model, flagged `converged = false`.
pub fn svm_fit(x: &[f64], width: usize, y: &[f64], params: &SvmParams) -> Result<SvmModel> {
    let standardizer = params.standardize.then(|| Standardizer::fit(x, width));
    let scaled;
    let x = match &standardizer {
        Some(s) => {
            scaled = s.transform(x);
            scaled.as_slice()
        }
        None => x,
    };
    let gamma = params.gamma.resolve(x, width);
    let sol = solve_dual(x, width, y, params.c, gamma, params.tol, params.max_iterations, params.cache_limit)?;
    if !sol.converged {
        log::warn!("SMO stopped at the iteration cap ({})", sol.iterations);
    }
    let mut support_vectors = Vec::new();
    let mut dual_coef = Vec::new();
    for (i, &a) in sol.alpha.iter().enumerate() {
        if a > 0.0 {
            support_vectors.extend_from_slice(&x[i * width..(i + 1) * width]);
            dual_coef.push(a * y[i]);
        }
    }
    Ok(SvmModel {
        support_vectors,
        width,
        dual_coef,
        bias: sol.bias,
        gamma,
        c: params.c,
        converged: sol.converged,
        iterations: sol.iterations,
        standardizer,
    })
}

impl SvmModel {
    pub fn support_count(&self) -> usize {
        self.dual_coef.len()
    }

    fn score_row(&self, x: &[f64]) -> f64 {
        let w = self.width;
        self.dual_coef
            .iter()
            .enumerate()
            .map(|(s, coef)| coef * (-self.gamma * sq_dist(&self.support_vectors[s * w..(s + 1) * w], x)).exp())
            .sum::<f64>()
            + self.bias
    }
}

/// `f(x) = Σ αᵢyᵢ k(xᵢ, x) + b` for each row of `x`.
pub fn svm_decision(model: &SvmModel, x: &[f64]) -> Result<Vec<f64>> {
    let w = model.width;
    if w == 0 || x.len() % w != 0 {
        return Err(Error::DimensionMismatch {
            expected: w,
            got: x.len(),
        });
    }
    let scaled;
    let x = match &model.standardizer {
        Some(s) => {
            scaled = s.transform(x);
            scaled.as_slice()
        }
        None => x,
    };
    Ok(x.chunks(w).map(|row| model.score_row(row)).collect())
}

/// Predicted labels: positive when `f(x) ≥ 0`.
pub fn predict_labels(scores: &[f64]) -> Vec<u8> {
    scores.iter().map(|&s| u8::from(s >= 0.0)).collect()
}

pub fn to_signed(labels: &[u8]) -> Vec<f64> {
    labels.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect()
}

/// A partition of sample indices into `k` folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub folds: Vec<Vec<usize>>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.folds.len()
    }

    pub fn test(&self, fold: usize) -> &[usize] {
        &self.folds[fold]
    }

    pub fn train(&self, fold: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = self
            .folds
            .iter()
            .enumerate()
            .filter(|(f, _)| *f != fold)
            .flat_map(|(_, v)| v.iter().copied())
            .collect();
        idx.sort_unstable();
        idx
    }
}

/// Shuffle each class with the seeded generator and deal its members
/// round-robin, continuing the deal position across classes so fold sizes
/// stay balanced.
pub fn stratified_kfold(labels: &[u8], k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::Invalid(format!("need at least 2 folds, got {k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for class in [0u8, 1u8] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < k {
            return Err(Error::ClassTooSmall {
                count: members.len(),
                folds: k,
            });
        }
        members.shuffle(&mut rng);
        for idx in members {
            folds[next].push(idx);
            next = (next + 1) % k;
        }
    }
    if labels.iter().any(|&l| l > 1) {
        return Err(Error::Invalid("labels must be 0 or 1".into()));
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(FoldPlan { folds, seed })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSet {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    pub roc_auc: f64,
}

impl MetricSet {
    pub const NAMES: [&'static str; 5] = ["precision", "recall", "f1", "accuracy", "roc_auc"];

    pub fn values(&self) -> [f64; 5] {
        [self.precision, self.recall, self.f1, self.accuracy, self.roc_auc]
    }

    pub fn from_values(v: [f64; 5]) -> Self {
        Self {
            precision: v[0],
            recall: v[1],
            f1: v[2],
            accuracy: v[3],
            roc_auc: v[4],
        }
    }
}

/// Precision, recall, F1 and accuracy from hard predictions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
}

pub fn threshold_metrics(labels: &[u8], predictions: &[u8]) -> Result<ThresholdMetrics> {
    if labels.len() != predictions.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            got: predictions.len(),
        });
    }
    let (mut tp, mut fp, mut tn, mut fneg) = (0usize, 0usize, 0usize, 0usize);
    for (&l, &p) in labels.iter().zip(predictions) {
        match (l, p) {
            (1, 1) => tp += 1,
            (0, 1) => fp += 1,
            (0, 0) => tn += 1,
            _ => fneg += 1,
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fneg);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(ThresholdMetrics {
        precision,
        recall,
        f1,
        accuracy: ratio(tp + tn, labels.len()),
    })
}

fn class_counts(labels: &[u8]) -> Result<(usize, usize)> {
    let pos = labels.iter().filter(|&&l| l == 1).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    Ok((pos, neg))
}

/// ROC AUC by counting positive/negative pairs: concordant pairs count 1,
/// tied scores count ½. Sorting groups the pairs so the count is
/// `O(n log n)`.
pub fn roc_auc(labels: &[u8], scores: &[f64]) -> Result<f64> {
    if labels.len() != scores.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            got: scores.len(),
        });
    }
    let (pos, neg) = class_counts(labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut negatives_below = 0.0;
    let mut concordant = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        let group_pos = order[start..end].iter().filter(|&&i| labels[i] == 1).count() as f64;
        let group_neg = (end - start) as f64 - group_pos;
        concordant += group_pos * negatives_below + 0.5 * group_pos * group_neg;
        negatives_below += group_neg;
        start = end;
    }
    Ok(concordant / (pos as f64 * neg as f64))
}

/// ROC AUC as the trapezoidal area under the (FPR, TPR) curve traced over
/// descending distinct score thresholds.
pub fn roc_auc_trapezoid(labels: &[u8], scores: &[f64]) -> Result<f64> {
    let (pos, neg) = class_counts(labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let (mut tp, mut fp) = (0usize, 0usize);
    let (mut prev_tpr, mut prev_fpr) = (0.0, 0.0);
    let mut area = 0.0;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] == 1 { tp += 1 } else { fp += 1 }
            i += 1;
        }
        let tpr = tp as f64 / pos as f64;
        let fpr = fp as f64 / neg as f64;
        area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        prev_tpr = tpr;
        prev_fpr = fpr;
    }
    Ok(area)
}

/// All five metrics. Fails with [`Error::SingleClass`] when AUC is
/// undefined; [`threshold_metrics`] still works in that case.
pub fn compute_metrics(labels: &[u8], predictions: &[u8], scores: &[f64]) -> Result<MetricSet> {
    let t = threshold_metrics(labels, predictions)?;
    let auc = roc_auc(labels, scores)?;
    Ok(MetricSet {
        precision: t.precision,
        recall: t.recall,
        f1: t.f1,
        accuracy: t.accuracy,
        roc_auc: auc,
    })
}

/// Train on `train`, score `test`.
pub fn fit_and_score(train: &PairDataset, test: &PairDataset, params: &SvmParams) -> Result<(Vec<u8>, Vec<f64>)> {
    let model = svm_fit(train.features(), train.width(), &to_signed(&train.labels), params)?;
    let scores = svm_decision(&model, test.features())?;
    Ok((predict_labels(&scores), scores))
}

/// Train/test metrics for one outer fold.
pub fn evaluate_split(train: &PairDataset, test: &PairDataset, params: &SvmParams) -> Result<MetricSet> {
    let (pred, scores) = fit_and_score(train, test, params)?;
    compute_metrics(&test.labels, &pred, &scores)
}

/// Mean test-fold AUC of a stratified `k`-fold plan drawn from `seed`,
/// using only the coordinates of `columns`.
pub fn cross_val_mean_auc(ds: &PairDataset, columns: &[usize], k: usize, seed: u64, params: &SvmParams) -> Result<f64> {
    let plan = stratified_kfold(&ds.labels, k, seed)?;
    let sub = ds.select_coordinates(columns)?;
    cross_val_mean_auc_with_plan(&sub, &plan, params)
}

/// As [`cross_val_mean_auc`] with a prebuilt plan over all coordinates of
/// `ds`.
pub fn cross_val_mean_auc_with_plan(ds: &PairDataset, plan: &FoldPlan, params: &SvmParams) -> Result<f64> {
    let aucs: Vec<f64> = (0..plan.k())
        .into_par_iter()
        .map(|f| {
            let train = ds.subset(&plan.train(f));
            let test = ds.subset(plan.test(f));
            let (_, scores) = fit_and_score(&train, &test, params)?;
            roc_auc(&test.labels, &scores)
        })
        .collect::<Result<_>>()?;
    Ok(aucs.iter().sum::<f64>() / aucs.len() as f64)
}
