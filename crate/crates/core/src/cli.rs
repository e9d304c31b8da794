//! Run configuration, cached artifacts and the report bundle.
//!
//! A run is described by a flat `key = value` file (see [`RunConfig`]).
//! `prepare` builds the largest connected component and its `BSED` distance
//! cache; `evaluate` runs every requested (variant, threshold) cell;
//! `analyze` turns the recorded selections into union scores and top-gene
//! reports; `run` does all three. Every text artifact starts with a
//! provenance block naming the crate version and the configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use log::{error, info, warn};

use crate::bioanalysis::{
    annotate, compare_methods, first_dims_by_frequency, ratio_r, top_genes, trace_csv, union_dim_scores,
    GeneRanking,
};
use crate::bse::{
    bse_select, evaluate_variant, rank_select, union_first_m, SelectionMode, SelectionResult, VariantConfig,
    VariantReport,
};
use crate::error::{Error, Result};
use crate::graphdist::{all_pairs_shortest_paths, node_degrees, read_cache, write_cache, DistanceMatrix};
use crate::linalg::EigenOptions;
use crate::netio::{
    label_pairs, largest_connected_component, load_disease_genes, load_edge_list, load_rr_table, DiseaseGeneMap,
    InteractomeGraph, RRTable,
};
use crate::pairfeat::{assemble_dataset, PairDataset, PairOrientation};
use crate::seed;
use crate::spectral::{build_raw_embedding, Embedding, MdsExponent, Variant};
use crate::svmrbf::{GammaRule, MetricSet, SvmParams};
use crate::synthgen::{generate_benchmark, AnchorRule, Benchmark, EdgeModel, SynthConfig, Threshold};

pub const VERSION: &str = concat!("bse-core ", env!("CARGO_PKG_VERSION"));

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARTIAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

const CACHE_FILE: &str = "distances.bsed";
const NODES_FILE: &str = "nodes.tsv";
const LCC_FILE: &str = "lcc_edges.tsv";

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub interactome: PathBuf,
    pub disease_genes: PathBuf,
    pub rr: PathBuf,
    pub variants: Vec<Variant>,
    pub d: usize,
    pub k: usize,
    pub thresholds: Vec<f64>,
    pub seed: u64,
    pub selection_mode: SelectionMode,
    pub output_dir: PathBuf,
    /// Prepared artifacts; `<output_dir>/prepared` when unset.
    pub cache_dir: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
    pub inner_folds: usize,
    pub outer_folds: usize,
    pub svm: SvmParams,
    pub mds_exponent: MdsExponent,
    pub top_genes: usize,
    pub first_dims: usize,
    pub gene_ranking: GeneRanking,
    pub orientation: PairOrientation,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            interactome: PathBuf::new(),
            disease_genes: PathBuf::new(),
            rr: PathBuf::new(),
            variants: Variant::ALL.to_vec(),
            d: 20,
            k: 100,
            thresholds: vec![0.0, 1.0],
            seed: 1,
            selection_mode: SelectionMode::WholeDataset,
            output_dir: PathBuf::from("bse-out"),
            cache_dir: None,
            workers: 0,
            inner_folds: 5,
            outer_folds: 10,
            svm: SvmParams::default(),
            mds_exponent: MdsExponent::Standard,
            top_genes: 20,
            first_dims: 5,
            gene_ranking: GeneRanking::Absolute,
            orientation: PairOrientation::FileOrder,
        }
    }
}

fn list<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn parse_list<T>(value: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse)
        .collect()
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(Error::Config(format!("{key}: expected true/false, got {other:?}"))),
    }
}

fn orientation_str(o: PairOrientation) -> &'static str {
    match o {
        PairOrientation::FileOrder => "file",
        PairOrientation::Canonical => "canonical",
    }
}

fn gamma_str(g: GammaRule) -> String {
    match g {
        GammaRule::Scale => "scale".into(),
        GammaRule::Fixed(v) => v.to_string(),
    }
}

fn exponent_str(e: MdsExponent) -> &'static str {
    match e {
        MdsExponent::Standard => "standard",
        MdsExponent::Inverse => "inverse",
    }
}

/// Directory name of a threshold, e.g. `rr0`, `rr1.5`.
pub fn threshold_dir(t: f64) -> String {
    format!("rr{t}")
}

impl RunConfig {
    /// Apply one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let config = |e: Error| Error::Config(format!("{key}: {e}"));
        match key.trim() {
            "interactome" => self.interactome = value.into(),
            "disease_genes" => self.disease_genes = value.into(),
            "rr" => self.rr = value.into(),
            "variants" => self.variants = parse_list(value, str::parse).map_err(config)?,
            "d" => self.d = number(key, value)?,
            "k" => self.k = number(key, value)?,
            "thresholds" => self.thresholds = parse_list(value, |s| number(key, s))?,
            "seed" => self.seed = number(key, value)?,
            "selection_mode" => self.selection_mode = value.parse().map_err(config)?,
            "output_dir" => self.output_dir = value.into(),
            "cache_dir" => self.cache_dir = (!value.is_empty()).then(|| value.into()),
            "workers" => self.workers = number(key, value)?,
            "inner_folds" => self.inner_folds = number(key, value)?,
            "outer_folds" => self.outer_folds = number(key, value)?,
            "c" => self.svm.c = number(key, value)?,
            "gamma" => self.svm.gamma = value.parse().map_err(config)?,
            "standardize" => self.svm.standardize = parse_bool(key, value)?,
            "mds_exponent" => self.mds_exponent = value.parse().map_err(config)?,
            "top_genes" => self.top_genes = number(key, value)?,
            "first_dims" => self.first_dims = number(key, value)?,
            "gene_ranking" => self.gene_ranking = value.parse().map_err(config)?,
            "orientation" => {
                self.orientation = match value {
                    "file" => PairOrientation::FileOrder,
                    "canonical" => PairOrientation::Canonical,
                    other => return Err(Error::Config(format!("orientation: unknown {other:?}"))),
                }
            }
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Parse a config file body on top of the defaults. Blank lines and
    /// `#` comments are ignored.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            cfg.set(key, value)?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }

    /// Settings that determine results, in a fixed order. Output location
    /// and worker count are left out so bundles compare byte for byte.
    pub fn settings(&self) -> Vec<(&'static str, String)> {
        vec![
            ("interactome", self.interactome.display().to_string()),
            ("disease_genes", self.disease_genes.display().to_string()),
            ("rr", self.rr.display().to_string()),
            ("variants", list(&self.variants)),
            ("d", self.d.to_string()),
            ("k", self.k.to_string()),
            ("thresholds", list(&self.thresholds)),
            ("seed", self.seed.to_string()),
            ("selection_mode", self.selection_mode.as_str().into()),
            ("inner_folds", self.inner_folds.to_string()),
            ("outer_folds", self.outer_folds.to_string()),
            ("c", self.svm.c.to_string()),
            ("gamma", gamma_str(self.svm.gamma)),
            ("standardize", self.svm.standardize.to_string()),
            ("mds_exponent", exponent_str(self.mds_exponent).into()),
            ("top_genes", self.top_genes.to_string()),
            ("first_dims", self.first_dims.to_string()),
            ("gene_ranking", self.gene_ranking.as_str().into()),
            ("orientation", orientation_str(self.orientation).into()),
        ]
    }

    /// Full config file body, including output location and workers.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.settings() {
            let _ = writeln!(out, "{k} = {v}");
        }
        let _ = writeln!(out, "output_dir = {}", self.output_dir.display());
        if let Some(c) = &self.cache_dir {
            let _ = writeln!(out, "cache_dir = {}", c.display());
        }
        let _ = writeln!(out, "workers = {}", self.workers);
        out
    }

    /// `#`-prefixed header placed at the top of every text artifact.
    pub fn provenance(&self) -> String {
        let mut out = format!("# {VERSION}\n");
        for (k, v) in self.settings() {
            let _ = writeln!(out, "# config {k}={v}");
        }
        out
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.cache_dir.clone().unwrap_or_else(|| self.output_dir.join("prepared"))
    }

    /// Structural checks that need no input files.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.variants.is_empty() {
            return bad("no variants requested".into());
        }
        if self.thresholds.is_empty() || self.thresholds.iter().any(|t| !t.is_finite()) {
            return bad("thresholds must be a non-empty list of numbers".into());
        }
        if self.d == 0 || self.d > self.k {
            return bad(format!("need 0 < d <= k, got d = {}, k = {}", self.d, self.k));
        }
        if self.inner_folds < 2 || self.outer_folds < 2 {
            return bad("fold counts must be at least 2".into());
        }
        if !(self.svm.c > 0.0) {
            return bad(format!("C must be positive, got {}", self.svm.c));
        }
        if self.top_genes == 0 || self.first_dims == 0 || self.first_dims > self.d {
            return bad(format!(
                "need top_genes > 0 and 0 < first_dims <= d, got {} and {}",
                self.top_genes, self.first_dims
            ));
        }
        Ok(())
    }

    /// [`RunConfig::validate`] plus existence of the input files.
    pub fn validate_inputs(&self) -> Result<()> {
        self.validate()?;
        for (key, path) in [
            ("interactome", &self.interactome),
            ("disease_genes", &self.disease_genes),
            ("rr", &self.rr),
        ] {
            if path.as_os_str().is_empty() {
                return Err(Error::Config(format!("{key} is not set")));
            }
            if !path.is_file() {
                return Err(Error::Config(format!("{key}: {} does not exist", path.display())));
            }
        }
        Ok(())
    }

    /// Seed shared by every variant at one threshold, so both arms of a
    /// family see identical outer folds.
    pub fn cell_seed(&self, threshold: f64) -> u64 {
        seed::derive(self.seed, "threshold", &[threshold.to_bits()])
    }

    pub fn variant_config(&self, variant: Variant, threshold: f64) -> VariantConfig {
        VariantConfig {
            variant,
            d: self.d,
            k: self.k,
            inner_folds: self.inner_folds,
            outer_folds: self.outer_folds,
            svm: self.svm.clone(),
            seed: self.cell_seed(threshold),
            mode: self.selection_mode,
        }
    }
}

/// Run `f` on a pool of `workers` threads (0 = default size).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    Ok(pool.install(f))
}

fn write_text(path: &Path, body: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

fn write_report(cfg: &RunConfig, path: &Path, body: &str) -> Result<()> {
    write_text(path, &format!("{}{body}", cfg.provenance()))
}

fn write_svg(cfg: &RunConfig, path: &Path, svg: &str) -> Result<()> {
    let comment = cfg.provenance().replace("--", "- -").replace("# ", "");
    write_text(path, &format!("<!--\n{comment}-->\n{svg}"))
}

#[derive(Debug)]
pub struct Prepared {
    pub graph: InteractomeGraph,
    pub distances: DistanceMatrix,
    /// The cache was valid and no shortest paths were recomputed.
    pub reused_cache: bool,
    pub cache_path: PathBuf,
}

/// Build the largest connected component and its distance cache. A
/// checksum-valid cache of the right size is reused; anything else is
/// regenerated.
pub fn cmd_prepare(cfg: &RunConfig) -> Result<Prepared> {
    cfg.validate_inputs()?;
    let (full, report) = load_edge_list(&cfg.interactome)?;
    info!(
        "interactome: {} rows, {} self-loops, {} duplicates, {} nodes",
        report.rows,
        report.self_loops,
        report.duplicates,
        full.node_count()
    );
    let (graph, _) = largest_connected_component(&full);
    info!("largest connected component: {} nodes, {} edges", graph.node_count(), graph.edge_count());

    let dir = cfg.cache_dir();
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let cache_path = dir.join(CACHE_FILE);
    let cached = if cache_path.exists() {
        match read_cache(&cache_path) {
            Ok(d) if d.len() == graph.node_count() => Some(d),
            Ok(d) => {
                warn!("cache holds {} nodes, component has {}; regenerating", d.len(), graph.node_count());
                None
            }
            Err(e) => {
                warn!("{}: {e}; regenerating", cache_path.display());
                None
            }
        }
    } else {
        None
    };
    let reused_cache = cached.is_some();
    let distances = match cached {
        Some(d) => d,
        None => {
            let d = all_pairs_shortest_paths(&graph)?;
            write_cache(&cache_path, &d)?;
            d
        }
    };

    let mut nodes = String::from("# index\tgene_id\n");
    for (i, g) in graph.node_ids().iter().enumerate() {
        let _ = writeln!(nodes, "{i}\t{g}");
    }
    write_text(&dir.join(NODES_FILE), &nodes)?;
    graph.write_edge_list(&dir.join(LCC_FILE))?;
    Ok(Prepared {
        graph,
        distances,
        reused_cache,
        cache_path,
    })
}

/// Loaded inputs plus the raw embeddings of every requested family.
pub struct Context {
    pub cfg: RunConfig,
    pub graph: InteractomeGraph,
    pub distances: DistanceMatrix,
    pub diseases: DiseaseGeneMap,
    pub rr: RRTable,
    pub raw: BTreeMap<Variant, Embedding>,
}

impl Context {
    pub fn load(cfg: &RunConfig) -> Result<Self> {
        let prepared = cmd_prepare(cfg)?;
        let (diseases, _) = load_disease_genes(&cfg.disease_genes)?.restrict_to(&prepared.graph);
        let (rr, _) = load_rr_table(&cfg.rr)?.retain_usable(&diseases);
        if rr.rows.is_empty() {
            return Err(Error::EmptyInput("no usable disease pairs".into()));
        }
        let opts = EigenOptions {
            seed: seed::derive(cfg.seed, "eigen", &[]),
            ..EigenOptions::default()
        };
        let mut raw = BTreeMap::new();
        for v in &cfg.variants {
            let family = v.raw_source();
            if let std::collections::btree_map::Entry::Vacant(slot) = raw.entry(family) {
                info!("building {} raw embedding (k = {})", family.family(), cfg.k);
                slot.insert(build_raw_embedding(family, &prepared.distances, cfg.k, cfg.mds_exponent, &opts)?);
            }
        }
        Ok(Self {
            cfg: cfg.clone(),
            graph: prepared.graph,
            distances: prepared.distances,
            diseases,
            rr,
            raw,
        })
    }

    pub fn raw(&self, variant: Variant) -> &Embedding {
        &self.raw[&variant.raw_source()]
    }

    /// Labeled dataset over every raw column of `variant`'s family.
    pub fn dataset(&self, variant: Variant, threshold: f64) -> Result<PairDataset> {
        let labels = label_pairs(&self.rr, threshold);
        log::debug!(
            "threshold {threshold}: {} pairs, positive fraction {:.4}",
            labels.pairs.len(),
            labels.positive_fraction
        );
        assemble_dataset(self.raw(variant), &self.diseases, &labels, &self.graph, self.cfg.orientation)
    }

    fn cell_dir(&self, variant: Variant, threshold: f64) -> PathBuf {
        self.cfg
            .output_dir
            .join(threshold_dir(threshold))
            .join(variant.to_string())
    }
}

/// Completed and failed (variant, threshold) cells of a command.
#[derive(Debug, Default)]
pub struct RunOutcome {
    pub completed: Vec<String>,
    pub failed: Vec<(String, String)>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.failed.is_empty() {
            EXIT_OK
        } else {
            EXIT_PARTIAL
        }
    }

    fn record<T>(&mut self, cell: String, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => {
                self.completed.push(cell);
                Some(v)
            }
            Err(e) => {
                error!("{cell}: {e}");
                self.failed.push((cell, e.to_string()));
                None
            }
        }
    }
}

/// Map a command result to a process exit code.
pub fn exit_code(result: &Result<RunOutcome>) -> i32 {
    match result {
        Ok(o) => o.exit_code(),
        Err(Error::Config(_)) => EXIT_CONFIG,
        Err(_) => EXIT_PARTIAL,
    }
}

fn cell_name(variant: Variant, threshold: f64) -> String {
    format!("{}/{variant}", threshold_dir(threshold))
}

fn metrics_row(m: &MetricSet) -> String {
    list(&m.values())
}

fn folds_csv(report: &VariantReport) -> String {
    let mut out = String::from("fold,precision,recall,f1,accuracy,roc_auc\n");
    for (f, m) in report.folds.iter().enumerate() {
        let _ = writeln!(out, "{f},{}", metrics_row(m));
    }
    out
}

/// Parse the body of a `folds.csv` report.
pub fn read_folds_csv(path: &Path) -> Result<Vec<MetricSet>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.starts_with("fold") || line.trim().is_empty() {
            continue;
        }
        let v: Vec<f64> = line
            .split(',')
            .skip(1)
            .map(|s| s.parse::<f64>().map_err(|e| Error::parse(path, i + 1, e.to_string())))
            .collect::<Result<_>>()?;
        let v: [f64; 5] = v
            .try_into()
            .map_err(|_| Error::parse(path, i + 1, "expected five metric values"))?;
        out.push(MetricSet::from_values(v));
    }
    Ok(out)
}

fn write_cell(ctx: &Context, report: &VariantReport, threshold: f64) -> Result<()> {
    let cfg = &ctx.cfg;
    let dir = ctx.cell_dir(report.variant, threshold);
    write_report(cfg, &dir.join("folds.csv"), &folds_csv(report))?;
    let mut cols = String::from("fold,columns\n");
    for (f, c) in report.columns.iter().enumerate() {
        let _ = writeln!(cols, "{f},{}", c.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "));
    }
    write_report(cfg, &dir.join("columns.csv"), &cols)?;
    if !report.selections.is_empty() {
        for (f, sel) in report.selections.iter().enumerate() {
            write_report(cfg, &dir.join(format!("selection_{f:02}.txt")), &sel.to_text())?;
        }
        write_report(cfg, &dir.join("trace.csv"), &trace_csv(&report.selections))?;
    }
    Ok(())
}

/// Read back the per-fold selections of one cell.
pub fn read_selections(dir: &Path, folds: usize) -> Result<Vec<SelectionResult>> {
    (0..folds)
        .map(|f| SelectionResult::read(&dir.join(format!("selection_{f:02}.txt"))))
        .collect()
}

fn summary_csv(reports: &[VariantReport]) -> String {
    let mut out = String::from("variant,label,statistic,precision,recall,f1,accuracy,roc_auc\n");
    for r in reports {
        let _ = writeln!(out, "{},{},mean,{}", r.variant, r.variant.label(), metrics_row(&r.mean));
        let _ = writeln!(out, "{},{},std,{}", r.variant, r.variant.label(), metrics_row(&r.std));
    }
    out
}

fn write_comparisons(ctx: &Context, threshold: f64, folds: &BTreeMap<Variant, Vec<MetricSet>>) -> Result<()> {
    for (&v, select) in folds {
        if !v.is_select() {
            continue;
        }
        let Some(rank) = folds.get(&v.counterpart()) else { continue };
        let stats = compare_methods(select, rank, &v.label(), &v.counterpart().label())?;
        let path = ctx
            .cfg
            .output_dir
            .join(threshold_dir(threshold))
            .join(format!("compare_{}.csv", v.family()));
        write_report(&ctx.cfg, &path, &stats.to_csv())?;
    }
    Ok(())
}

/// Evaluate every (variant, threshold) cell and write per-fold metrics,
/// selections, summaries and select/rank comparisons.
pub fn cmd_evaluate(cfg: &RunConfig) -> Result<RunOutcome> {
    let ctx = Context::load(cfg)?;
    let mut outcome = RunOutcome::default();
    evaluate_all(&ctx, &mut outcome)?;
    Ok(outcome)
}

fn evaluate_all(ctx: &Context, outcome: &mut RunOutcome) -> Result<BTreeMap<(usize, Variant), VariantReport>> {
    let cfg = &ctx.cfg;
    let mut all = BTreeMap::new();
    for (ti, &t) in cfg.thresholds.iter().enumerate() {
        let mut reports = Vec::new();
        for &v in &cfg.variants {
            info!("evaluating {}", cell_name(v, t));
            let r = ctx
                .dataset(v, t)
                .and_then(|ds| evaluate_variant(&cfg.variant_config(v, t), &ds, ctx.raw(v)))
                .and_then(|rep| write_cell(ctx, &rep, t).map(|_| rep));
            if let Some(rep) = outcome.record(cell_name(v, t), r) {
                reports.push(rep);
            }
        }
        let dir = cfg.output_dir.join(threshold_dir(t));
        write_report(cfg, &dir.join("summary.csv"), &summary_csv(&reports))?;
        let folds = reports.iter().map(|r| (r.variant, r.folds.clone())).collect();
        write_comparisons(ctx, t, &folds)?;
        for r in reports {
            all.insert((ti, r.variant), r);
        }
    }
    Ok(all)
}

/// Columns whose top genes are reported for a variant: the most frequent
/// first selections for supervised variants, the top by value otherwise.
fn report_dims(ctx: &Context, variant: Variant, selections: &[SelectionResult]) -> Result<Vec<usize>> {
    let m = ctx.cfg.first_dims;
    if variant.is_select() {
        Ok(first_dims_by_frequency(selections, m))
    } else {
        let raw = ctx.raw(variant);
        Ok(rank_select(&raw.values_used, m.min(raw.dims()))?
            .into_iter()
            .map(|i| raw.source_columns[i])
            .collect())
    }
}

fn analyze_all(ctx: &Context, selections: &BTreeMap<(usize, Variant), Vec<SelectionResult>>, outcome: &mut RunOutcome) -> Result<()> {
    let cfg = &ctx.cfg;
    let degrees = node_degrees(&ctx.graph);
    let mut ratios: BTreeMap<(usize, &'static str), [Option<f64>; 2]> = BTreeMap::new();
    for (ti, &t) in cfg.thresholds.iter().enumerate() {
        let mut union_rows = String::from("variant,label,columns,precision,recall,f1,accuracy,roc_auc\n");
        for &v in &cfg.variants {
            let sels = selections.get(&(ti, v)).map(Vec::as_slice).unwrap_or(&[]);
            if v.is_select() && sels.is_empty() {
                continue;
            }
            let cell = format!("{}/analysis", cell_name(v, t));
            let r = (|| -> Result<()> {
                let dims = report_dims(ctx, v, sels)?;
                let table = top_genes(ctx.raw(v), ctx.graph.node_ids(), &dims, cfg.top_genes, cfg.gene_ranking)?;
                let table = annotate(table, &ctx.diseases, &degrees, &ctx.graph)?;
                let r = ratio_r(&table)?;
                let dir = ctx.cell_dir(v, t);
                write_report(cfg, &dir.join("top_genes.csv"), &table.to_csv())?;
                write_svg(cfg, &dir.join("top_genes.svg"), &table.heatmap_svg())?;
                ratios.entry((ti, v.family())).or_default()[usize::from(!v.is_select())] = Some(r);
                if v.is_select() {
                    let union: Vec<usize> = union_first_m(sels, cfg.first_dims)?.into_iter().collect();
                    let ds = ctx.dataset(v, t)?;
                    let (_, mean) = union_dim_scores(&ds, &union, cfg.outer_folds, cfg.cell_seed(t), &cfg.svm)?;
                    let cols = union.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
                    let _ = writeln!(union_rows, "{v},{}_u,{cols},{}", v.family(), metrics_row(&mean));
                }
                Ok(())
            })();
            outcome.record(cell, r);
        }
        write_report(cfg, &cfg.output_dir.join(threshold_dir(t)).join("union.csv"), &union_rows)?;
    }
    let na = |x: Option<f64>| x.map_or_else(|| "NA".to_string(), |v| v.to_string());
    let mut body = String::from("dataset,family,R_select,R_rank\n");
    for ((ti, family), [s, r]) in &ratios {
        let _ = writeln!(body, "{},{family},{},{}", threshold_dir(cfg.thresholds[*ti]), na(*s), na(*r));
    }
    write_report(cfg, &cfg.output_dir.join("ratio.csv"), &body)
}

/// Union scores, top genes and ratios from selections recorded by an
/// earlier `evaluate`.
pub fn cmd_analyze(cfg: &RunConfig) -> Result<RunOutcome> {
    let ctx = Context::load(cfg)?;
    let mut outcome = RunOutcome::default();
    let mut selections = BTreeMap::new();
    for (ti, &t) in cfg.thresholds.iter().enumerate() {
        for &v in cfg.variants.iter().filter(|v| v.is_select()) {
            let r = read_selections(&ctx.cell_dir(v, t), cfg.outer_folds);
            if let Some(s) = outcome.record(format!("{}/selections", cell_name(v, t)), r) {
                selections.insert((ti, v), s);
            }
        }
    }
    analyze_all(&ctx, &selections, &mut outcome)?;
    Ok(outcome)
}

/// The whole grid: evaluation followed by analysis.
pub fn cmd_run(cfg: &RunConfig) -> Result<RunOutcome> {
    let ctx = Context::load(cfg)?;
    let mut settings = format!("# {VERSION}\n");
    for (k, v) in cfg.settings() {
        let _ = writeln!(settings, "{k} = {v}");
    }
    write_text(&cfg.output_dir.join("config.txt"), &settings)?;
    let mut outcome = RunOutcome::default();
    let reports = evaluate_all(&ctx, &mut outcome)?;
    let selections = reports
        .into_iter()
        .map(|(key, r)| (key, r.selections))
        .collect();
    analyze_all(&ctx, &selections, &mut outcome)?;
    Ok(outcome)
}

/// One selection per supervised variant and threshold over the whole
/// dataset, written as `selection_full.txt`.
pub fn cmd_select(cfg: &RunConfig) -> Result<RunOutcome> {
    let ctx = Context::load(cfg)?;
    let mut outcome = RunOutcome::default();
    for &t in &cfg.thresholds {
        for &v in cfg.variants.iter().filter(|v| v.is_select()) {
            let mut vc = cfg.variant_config(v, t);
            vc.seed = seed::derive(vc.seed, "select-full", &[]);
            let r = ctx.dataset(v, t).and_then(|ds| bse_select(&ds, &vc)).and_then(|sel| {
                write_report(cfg, &ctx.cell_dir(v, t).join("selection_full.txt"), &sel.to_text())
            });
            outcome.record(cell_name(v, t), r);
        }
    }
    Ok(outcome)
}

/// Parse synthetic-benchmark settings given as `key=value` pairs.
pub fn synth_config(pairs: &[(String, String)]) -> Result<SynthConfig> {
    let mut cfg = SynthConfig::default();
    let threshold = |key: &str, v: &str| -> Result<Threshold> {
        match v.strip_prefix('q') {
            Some(q) => Ok(Threshold::Quantile(number(key, q)?)),
            None => Ok(Threshold::Hops(number(key, v)?)),
        }
    };
    for (key, value) in pairs {
        let value = value.trim();
        match key.as_str() {
            "n" => cfg.n = number(key, value)?,
            "diseases" => cfg.n_diseases = number(key, value)?,
            "genes_min" => cfg.genes_min = number(key, value)?,
            "genes_max" => cfg.genes_max = number(key, value)?,
            "epsilon" => cfg.epsilon = number(key, value)?,
            "seed" => cfg.seed = number(key, value)?,
            "tau" => cfg.tau = threshold(key, value)?,
            "tau_zero" => cfg.tau_zero = threshold(key, value)?,
            "anchors" => {
                cfg.anchors = match value {
                    "uniform" => AnchorRule::Uniform,
                    "low-degree" => AnchorRule::LowDegree,
                    other => return Err(Error::Config(format!("anchors: unknown {other:?}"))),
                }
            }
            "model" => {
                cfg.model = match value.split_once(':') {
                    Some(("pa", m)) => EdgeModel::PreferentialAttachment { m: number(key, m)? },
                    Some(("er", p)) => EdgeModel::ErdosRenyi { p: number(key, p)? },
                    _ => return Err(Error::Config(format!("model: expected pa:<m> or er:<p>, got {value:?}"))),
                }
            }
            other => return Err(Error::Config(format!("unknown synth key {other:?}"))),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Generate a benchmark into `dir` (`interactome.tsv`, `disease_genes.tsv`,
/// `rr.tsv`).
pub fn cmd_synth(cfg: &SynthConfig, dir: &Path) -> Result<Benchmark> {
    let b = generate_benchmark(cfg)?;
    b.write_tsv(dir)?;
    info!(
        "wrote {} nodes, {} diseases, {} pairs to {}",
        b.graph.node_count(),
        b.diseases.len(),
        b.rr.rows.len(),
        dir.display()
    );
    Ok(b)
}

/// Split `key=value`.
pub fn parse_assignment(s: &str) -> Result<(String, String)> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| Error::Config(format!("expected key=value, got {s:?}")))
}
