//! Greedy supervised dimension selection and the per-variant evaluation
//! loop.
//!
//! Starting from an empty column set, each round scores every remaining
//! raw-embedding column by the mean cross-validated AUC of the classifier
//! trained on the current set plus that column, and keeps the best one.
//! Exact ties are broken uniformly at random from the run seed. There is no
//! backtracking.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pairfeat::PairDataset;
use crate::seed;
use crate::spectral::{Embedding, Variant};
use crate::svmrbf::{cross_val_mean_auc_with_plan, evaluate_split, stratified_kfold, MetricSet, SvmParams};

/// Which data the inner selection cross-validation may see.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionMode {
    /// Inner folds are drawn from the whole dataset, test folds included.
    #[default]
    WholeDataset,
    /// Inner folds are drawn from the outer training split only.
    Nested,
}

impl SelectionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SelectionMode::WholeDataset => "whole",
            SelectionMode::Nested => "nested",
        }
    }
}

impl FromStr for SelectionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "whole" | "whole-dataset" => Ok(SelectionMode::WholeDataset),
            "nested" => Ok(SelectionMode::Nested),
            other => Err(Error::Unknown {
                kind: "selection mode",
                name: other.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VariantConfig {
    pub variant: Variant,
    /// Final embedding dimension.
    pub d: usize,
    /// Raw embedding dimension.
    pub k: usize,
    pub inner_folds: usize,
    pub outer_folds: usize,
    pub svm: SvmParams,
    pub seed: u64,
    pub mode: SelectionMode,
}

impl VariantConfig {
    pub fn new(variant: Variant, seed: u64) -> Self {
        Self {
            variant,
            d: 20,
            k: 100,
            inner_folds: 5,
            outer_folds: 10,
            svm: SvmParams::default(),
            seed,
            mode: SelectionMode::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub variant: Variant,
    pub seed: u64,
    pub inner_folds: usize,
    /// Selected raw-embedding columns in selection order.
    pub selected: Vec<usize>,
    /// Winning mean AUC of each round.
    pub trace: Vec<f64>,
    /// Every candidate's mean AUC per round, ascending by column.
    pub candidate_scores: Vec<Vec<(usize, f64)>>,
}

impl SelectionResult {
    pub fn to_text(&self) -> String {
        let join = |v: Vec<String>| v.join(",");
        format!(
            "variant={}\nseed={}\ninner_folds={}\nselected={}\ntrace={}\n",
            self.variant,
            self.seed,
            self.inner_folds,
            join(self.selected.iter().map(ToString::to_string).collect()),
            join(self.trace.iter().map(ToString::to_string).collect()),
        )
    }

    /// Parse the record written by [`SelectionResult::to_text`]. Candidate
    /// scores are not stored and come back empty.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut out = SelectionResult {
            variant: Variant::E1,
            seed: 0,
            inner_folds: 0,
            selected: Vec::new(),
            trace: Vec::new(),
            candidate_scores: Vec::new(),
        };
        let bad = |key: &str, v: &str| Error::Config(format!("selection record: bad {key} {v:?}"));
        for line in text.lines() {
            let Some((key, value)) = line.split_once('=') else { continue };
            let list = |v: &str| -> Vec<String> {
                v.split(',').filter(|s| !s.is_empty()).map(str::to_string).collect()
            };
            match key {
                "variant" => out.variant = value.parse()?,
                "seed" => out.seed = value.parse().map_err(|_| bad(key, value))?,
                "inner_folds" => out.inner_folds = value.parse().map_err(|_| bad(key, value))?,
                "selected" => {
                    out.selected = list(value)
                        .iter()
                        .map(|s| s.parse().map_err(|_| bad(key, s)))
                        .collect::<Result<_>>()?
                }
                "trace" => {
                    out.trace = list(value)
                        .iter()
                        .map(|s| s.parse().map_err(|_| bad(key, s)))
                        .collect::<Result<_>>()?
                }
                _ => {}
            }
        }
        Ok(out)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_text(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }
}

/// Greedy forward selection of `cfg.d` columns of `ds` (which must carry
/// every raw column as a coordinate pair).
pub fn bse_select(ds: &PairDataset, cfg: &VariantConfig) -> Result<SelectionResult> {
    let pool = ds.source_columns();
    if cfg.d > pool.len() {
        return Err(Error::Invalid(format!(
            "cannot select {} of {} columns",
            cfg.d,
            pool.len()
        )));
    }
    let mut result = SelectionResult {
        variant: cfg.variant,
        seed: cfg.seed,
        inner_folds: cfg.inner_folds,
        selected: Vec::with_capacity(cfg.d),
        trace: Vec::with_capacity(cfg.d),
        candidate_scores: Vec::with_capacity(cfg.d),
    };
    if cfg.d == 0 {
        return Ok(result);
    }
    let plan = stratified_kfold(&ds.labels, cfg.inner_folds, seed::derive(cfg.seed, "inner-folds", &[]))?;
    let mut ties = ChaCha8Rng::seed_from_u64(seed::derive(cfg.seed, "ties", &[]));

    for _ in 0..cfg.d {
        let candidates: Vec<usize> = pool
            .iter()
            .copied()
            .filter(|c| !result.selected.contains(c))
            .collect();
        let scores: Vec<(usize, f64)> = candidates
            .par_iter()
            .map(|&col| {
                let mut cols = result.selected.clone();
                cols.push(col);
                ds.select_coordinates(&cols)
                    .and_then(|sub| cross_val_mean_auc_with_plan(&sub, &plan, &cfg.svm))
                    .map(|auc| (col, auc))
                    .map_err(|e| Error::Candidate {
                        column: col,
                        source: Box::new(e),
                    })
            })
            .collect::<Result<_>>()?;
        let best = scores.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
        let tied: Vec<usize> = scores.iter().filter(|s| s.1 == best).map(|s| s.0).collect();
        let pick = if tied.len() == 1 {
            tied[0]
        } else {
            tied[ties.random_range(0..tied.len())]
        };
        result.selected.push(pick);
        result.trace.push(best);
        result.candidate_scores.push(scores);
    }
    Ok(result)
}

/// Indices of the `d` largest values, descending; equal values keep the
/// lower index first.
pub fn rank_select(values: &[f64], d: usize) -> Result<Vec<usize>> {
    if d > values.len() {
        return Err(Error::Invalid(format!("cannot rank {d} of {} values", values.len())));
    }
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx.truncate(d);
    Ok(idx)
}

/// Union of the first `m` selections of every result.
pub fn union_first_m(results: &[SelectionResult], m: usize) -> Result<BTreeSet<usize>> {
    let mut out = BTreeSet::new();
    for (i, r) in results.iter().enumerate() {
        if r.selected.len() < m {
            return Err(Error::Invalid(format!(
                "selection {i} has {} columns, need {m}",
                r.selected.len()
            )));
        }
        out.extend(r.selected[..m].iter().copied());
    }
    Ok(out)
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (`n − 1` denominator); zero for one value.
pub fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}

fn summarize(folds: &[MetricSet]) -> (MetricSet, MetricSet) {
    let mut means = [0.0; 5];
    let mut stds = [0.0; 5];
    for k in 0..5 {
        let col: Vec<f64> = folds.iter().map(|m| m.values()[k]).collect();
        means[k] = mean(&col);
        stds[k] = sample_std(&col);
    }
    (MetricSet::from_values(means), MetricSet::from_values(stds))
}

#[derive(Debug, Clone)]
pub struct VariantReport {
    pub variant: Variant,
    pub mode: SelectionMode,
    pub folds: Vec<MetricSet>,
    pub mean: MetricSet,
    pub std: MetricSet,
    /// Columns used in each outer fold.
    pub columns: Vec<Vec<usize>>,
    /// Per-fold selections (supervised variants only).
    pub selections: Vec<SelectionResult>,
}

/// Seed of the outer fold plan. It depends only on the root seed, so both
/// arms of a family see identical folds.
pub fn outer_plan_seed(root: u64) -> u64 {
    seed::derive(root, "outer-folds", &[])
}

/// Outer k-fold metrics for a fixed column set.
pub fn evaluate_columns(ds: &PairDataset, columns: &[usize], outer_folds: usize, root_seed: u64, svm: &SvmParams) -> Result<Vec<MetricSet>> {
    let plan = stratified_kfold(&ds.labels, outer_folds, outer_plan_seed(root_seed))?;
    let sub = ds.select_coordinates(columns)?;
    (0..plan.k())
        .into_par_iter()
        .map(|f| evaluate_split(&sub.subset(&plan.train(f)), &sub.subset(plan.test(f)), svm))
        .collect()
}

/// Run one variant over the outer folds. `ds` holds every column of the raw
/// embedding `raw`; rank variants take the top `d` by value, supervised
/// variants re-run the selection inside every outer fold.
pub fn evaluate_variant(cfg: &VariantConfig, ds: &PairDataset, raw: &Embedding) -> Result<VariantReport> {
    let plan = stratified_kfold(&ds.labels, cfg.outer_folds, outer_plan_seed(cfg.seed))?;
    let d = cfg.d.min(raw.dims());
    if d < cfg.d {
        log::warn!("{}: only {} raw columns, evaluating d = {d}", cfg.variant, raw.dims());
    }
    let ranked: Vec<usize> = rank_select(&raw.values_used, d)?
        .into_iter()
        .map(|i| raw.source_columns[i])
        .collect();

    let per_fold: Vec<(MetricSet, Vec<usize>, Option<SelectionResult>)> = (0..plan.k())
        .into_par_iter()
        .map(|f| {
            let train_idx = plan.train(f);
            let (columns, selection) = if cfg.variant.is_select() {
                let fold_cfg = VariantConfig {
                    d,
                    seed: seed::derive(cfg.seed, "select", &[f as u64]),
                    ..cfg.clone()
                };
                let sel = match cfg.mode {
                    SelectionMode::WholeDataset => bse_select(ds, &fold_cfg)?,
                    SelectionMode::Nested => bse_select(&ds.subset(&train_idx), &fold_cfg)?,
                };
                (sel.selected.clone(), Some(sel))
            } else {
                (ranked.clone(), None)
            };
            let sub = ds.select_coordinates(&columns)?;
            let metrics = evaluate_split(&sub.subset(&train_idx), &sub.subset(plan.test(f)), &cfg.svm)?;
            Ok((metrics, columns, selection))
        })
        .collect::<Result<_>>()?;

    let folds: Vec<MetricSet> = per_fold.iter().map(|p| p.0).collect();
    let (mean, std) = summarize(&folds);
    let mut columns = Vec::new();
    let mut selections = Vec::new();
    for (_, cols, sel) in per_fold {
        columns.push(cols);
        selections.extend(sel);
    }
    Ok(VariantReport {
        variant: cfg.variant,
        mode: cfg.mode,
        folds,
        mean,
        std,
        columns,
        selections,
    })
}
