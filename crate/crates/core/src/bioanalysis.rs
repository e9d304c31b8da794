//! Biological readouts of an embedding: top genes per dimension, their
//! disease-association counts and degrees, the association/degree ratio
//! `R`, and paired statistics between the two arms of a variant family.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::bse::{evaluate_columns, mean, sample_std, SelectionResult};
use crate::error::{Error, Result};
use crate::graphdist::DegreeVector;
use crate::netio::{DiseaseGeneMap, GeneId, InteractomeGraph};
use crate::pairfeat::PairDataset;
use crate::spectral::Embedding;
use crate::svmrbf::{MetricSet, SvmParams};

/// Name stamped into comparison reports.
pub const TEST_NAME: &str = "paired two-sided t-test";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GeneRanking {
    #[default]
    Absolute,
    Signed,
}

impl GeneRanking {
    pub fn as_str(self) -> &'static str {
        match self {
            GeneRanking::Absolute => "absolute",
            GeneRanking::Signed => "signed",
        }
    }

    fn key(self, v: f64) -> f64 {
        match self {
            GeneRanking::Absolute => v.abs(),
            GeneRanking::Signed => v,
        }
    }
}

impl FromStr for GeneRanking {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "absolute" => Ok(GeneRanking::Absolute),
            "signed" => Ok(GeneRanking::Signed),
            other => Err(Error::Unknown {
                kind: "gene ranking",
                name: other.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopGeneRow {
    /// Raw-embedding column.
    pub dimension: usize,
    /// 1-based rank of the column's eigen/singular value.
    pub value_rank: usize,
    /// 1-based rank of the gene within the dimension.
    pub rank: usize,
    pub gene: GeneId,
    pub value: f64,
    pub diseases: usize,
    pub degree: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopGeneTable {
    pub ranking: GeneRanking,
    pub rows: Vec<TopGeneRow>,
}

impl TopGeneTable {
    pub fn to_csv(&self) -> String {
        let mut out = format!("# ranking={}\n", self.ranking.as_str());
        out.push_str("dimension,value_rank,rank,gene_id,value,diseases,degree\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.dimension, r.value_rank, r.rank, r.gene, r.value, r.diseases, r.degree
            );
        }
        out
    }

    /// Heatmap of disease counts: one column per dimension, one row per
    /// gene rank.
    pub fn heatmap_svg(&self) -> String {
        let mut dims: Vec<usize> = Vec::new();
        for r in &self.rows {
            if !dims.contains(&r.dimension) {
                dims.push(r.dimension);
            }
        }
        let ranks = self.rows.iter().map(|r| r.rank).max().unwrap_or(0);
        let top = self.rows.iter().map(|r| r.diseases).max().unwrap_or(0).max(1);
        let (cell, left, head) = (28, 40, 30);
        let w = left + cell * dims.len() + 10;
        let h = head + cell * ranks + 10;
        let mut svg = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" font-family=\"sans-serif\" font-size=\"10\">\n"
        );
        for (c, d) in dims.iter().enumerate() {
            let x = left + c * cell + cell / 2;
            let _ = writeln!(svg, "<text x=\"{x}\" y=\"{}\" text-anchor=\"middle\">{d}</text>", head - 8);
        }
        for r in &self.rows {
            let c = dims.iter().position(|&d| d == r.dimension).unwrap_or(0);
            let (x, y) = (left + c * cell, head + (r.rank - 1) * cell);
            let shade = 255 - (200 * r.diseases / top) as u32;
            let _ = writeln!(
                svg,
                "<rect x=\"{x}\" y=\"{y}\" width=\"{cell}\" height=\"{cell}\" fill=\"rgb(255,{shade},{shade})\" stroke=\"#999\"/>\
                 <text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
                x + cell / 2,
                y + cell / 2 + 4,
                r.diseases
            );
        }
        for rank in 1..=ranks {
            let _ = writeln!(
                svg,
                "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{rank}</text>",
                left - 6,
                head + (rank - 1) * cell + cell / 2 + 4
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

/// The `n` genes with the largest value (under `ranking`) in each of `dims`
/// (raw column indices). Ties go to the lower gene ID. Disease counts and
/// degrees are left at zero; see [`annotate`].
pub fn top_genes(z: &Embedding, node_ids: &[GeneId], dims: &[usize], n: usize, ranking: GeneRanking) -> Result<TopGeneTable> {
    if node_ids.len() != z.nodes() {
        return Err(Error::DimensionMismatch {
            expected: z.nodes(),
            got: node_ids.len(),
        });
    }
    if n > z.nodes() {
        return Err(Error::Invalid(format!("asked for {n} genes of {}", z.nodes())));
    }
    let mut rows = Vec::with_capacity(dims.len() * n);
    for &dim in dims {
        let col = z.position_of(dim).ok_or_else(|| Error::Invalid(format!("dimension {dim} not in embedding")))?;
        let own = z.values_used[col];
        let value_rank = 1 + z.values_used.iter().filter(|&&v| v > own).count();
        let mut order: Vec<usize> = (0..z.nodes()).collect();
        order.sort_by(|&a, &b| {
            let (ka, kb) = (ranking.key(z.coords[(a, col)]), ranking.key(z.coords[(b, col)]));
            kb.total_cmp(&ka).then(node_ids[a].cmp(&node_ids[b]))
        });
        for (r, &node) in order.iter().take(n).enumerate() {
            rows.push(TopGeneRow {
                dimension: dim,
                value_rank,
                rank: r + 1,
                gene: node_ids[node],
                value: z.coords[(node, col)],
                diseases: 0,
                degree: 0,
            });
        }
    }
    Ok(TopGeneTable { ranking, rows })
}

/// Fill in disease-association counts and degrees.
pub fn annotate(mut table: TopGeneTable, map: &DiseaseGeneMap, degrees: &DegreeVector, graph: &InteractomeGraph) -> Result<TopGeneTable> {
    for r in &mut table.rows {
        let idx = graph.index_of(r.gene).ok_or_else(|| Error::Unknown {
            kind: "gene",
            name: r.gene.to_string(),
        })?;
        r.diseases = map.association_count(r.gene);
        r.degree = degrees.get(idx);
    }
    Ok(table)
}

/// `Σ diseases / Σ degree` over every cell of the table.
pub fn ratio_r(table: &TopGeneTable) -> Result<f64> {
    if table.rows.is_empty() {
        return Err(Error::EmptyInput("top-gene table".into()));
    }
    let s: usize = table.rows.iter().map(|r| r.diseases).sum();
    let d: u64 = table.rows.iter().map(|r| u64::from(r.degree)).sum();
    if d == 0 {
        return Err(Error::Invalid("all top genes have degree zero".into()));
    }
    Ok(s as f64 / d as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedTest {
    pub t: f64,
    pub p_value: f64,
    /// Sample standard deviation of the differences.
    pub std_diff: f64,
    /// Zero-variance differences with a nonzero mean; `p` is 0.
    pub degenerate: bool,
}

pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<PairedTest> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::Invalid("paired test needs at least two folds".into()));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let m = mean(&diffs);
    let sd = sample_std(&diffs);
    let n = diffs.len() as f64;
    if sd == 0.0 {
        return Ok(if m == 0.0 {
            PairedTest { t: 0.0, p_value: 1.0, std_diff: 0.0, degenerate: false }
        } else {
            PairedTest { t: m.signum() * f64::INFINITY, p_value: 0.0, std_diff: 0.0, degenerate: true }
        });
    }
    let t = m / (sd / n.sqrt());
    let dist = StudentsT::new(0.0, 1.0, n - 1.0).map_err(|e| Error::Invalid(e.to_string()))?;
    let p = (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0);
    Ok(PairedTest { t, p_value: p, std_diff: sd, degenerate: false })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricComparison {
    pub metric: &'static str,
    pub mean_select: f64,
    pub mean_rank: f64,
    pub test: PairedTest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonStats {
    pub select_label: String,
    pub rank_label: String,
    pub metrics: Vec<MetricComparison>,
}

impl ComparisonStats {
    /// Rows `metric,<select>,<rank>,p_val,std`.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# test={TEST_NAME}\nmetric,{},{},p_val,std\n", self.select_label, self.rank_label);
        for m in &self.metrics {
            let _ = writeln!(
                out,
                "{},{:.4},{:.4},{:.4e},{:.4}{}",
                m.metric,
                m.mean_select,
                m.mean_rank,
                m.test.p_value,
                m.test.std_diff,
                if m.test.degenerate { ",degenerate" } else { "" }
            );
        }
        out
    }
}

/// Per-metric paired comparison of matched outer folds.
pub fn compare_methods(select: &[MetricSet], rank: &[MetricSet], select_label: &str, rank_label: &str) -> Result<ComparisonStats> {
    if select.len() != rank.len() {
        return Err(Error::DimensionMismatch {
            expected: select.len(),
            got: rank.len(),
        });
    }
    let metrics = MetricSet::NAMES
        .iter()
        .enumerate()
        .map(|(k, &metric)| {
            let a: Vec<f64> = select.iter().map(|m| m.values()[k]).collect();
            let b: Vec<f64> = rank.iter().map(|m| m.values()[k]).collect();
            Ok(MetricComparison {
                metric,
                mean_select: mean(&a),
                mean_rank: mean(&b),
                test: paired_t_test(&a, &b)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ComparisonStats {
        select_label: select_label.to_string(),
        rank_label: rank_label.to_string(),
        metrics,
    })
}

/// Outer-fold scores of a fixed union column set, plus their mean.
pub fn union_dim_scores(ds: &PairDataset, union: &[usize], outer_folds: usize, root_seed: u64, svm: &SvmParams) -> Result<(Vec<MetricSet>, MetricSet)> {
    let folds = evaluate_columns(ds, union, outer_folds, root_seed, svm)?;
    let mut means = [0.0; 5];
    for (k, slot) in means.iter_mut().enumerate() {
        *slot = mean(&folds.iter().map(|m| m.values()[k]).collect::<Vec<_>>());
    }
    Ok((folds, MetricSet::from_values(means)))
}

/// The `m` columns chosen most often across `results`; ties go to the
/// earlier mean selection position, then the lower column.
pub fn first_dims_by_frequency(results: &[SelectionResult], m: usize) -> Vec<usize> {
    let mut stats: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for r in results {
        for (pos, &c) in r.selected.iter().enumerate() {
            let e = stats.entry(c).or_default();
            e.0 += 1;
            e.1 += pos;
        }
    }
    let mut cols: Vec<(usize, usize, usize)> = stats.into_iter().map(|(c, (f, p))| (c, f, p)).collect();
    cols.sort_by(|a, b| {
        // average positions compared as p_a/f_a < p_b/f_b without division
        b.1.cmp(&a.1)
            .then_with(|| (a.2 * b.1).cmp(&(b.2 * a.1)))
            .then(a.0.cmp(&b.0))
    });
    cols.into_iter().take(m).map(|c| c.0).collect()
}

/// Per-round winning AUC of each selection as CSV rows `fold,round,column,auc`.
pub fn trace_csv(results: &[SelectionResult]) -> String {
    let mut out = String::from("fold,round,column,auc\n");
    for (f, r) in results.iter().enumerate() {
        for (i, (c, auc)) in r.selected.iter().zip(&r.trace).enumerate() {
            let _ = writeln!(out, "{f},{},{c},{auc}", i + 1);
        }
    }
    out
}
