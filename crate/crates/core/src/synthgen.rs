//! Synthetic interactomes with planted disease modules.
//!
//! Each disease is a breadth-first neighborhood around a seeded anchor
//! node. A pair's relative risk is driven by the mean hop distance between
//! its two modules: close pairs get `rr = 2`, intermediate pairs `0.5`, far
//! pairs `0`, so both the `rr > 1` and `rr > 0` labelings carry signal.
//! Independent flip noise with probability `epsilon` blurs each boundary.

use std::collections::{BTreeSet, VecDeque};
use std::fs;
use std::path::Path;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graphdist::{all_pairs_shortest_paths, node_degrees, DistanceMatrix};
use crate::netio::{largest_connected_component, DiseaseGeneMap, GeneId, InteractomeGraph, RRTable, RrRow};
use crate::seed;

/// First gene ID; node `i` gets `GENE_ID_BASE + i`.
pub const GENE_ID_BASE: GeneId = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeModel {
    /// Barabási–Albert growth, `m` edges per new node.
    PreferentialAttachment { m: usize },
    /// G(n, p); only the largest component is kept.
    ErdosRenyi { p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AnchorRule {
    #[default]
    Uniform,
    /// Anchors drawn from nodes with degree at most the median.
    LowDegree,
}

/// A distance boundary, either in hops or as a quantile of the pair
/// distances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Hops(f64),
    Quantile(f64),
}

impl Threshold {
    fn resolve(self, sorted: &[f64]) -> f64 {
        match self {
            Threshold::Hops(h) => h,
            Threshold::Quantile(q) => {
                let i = ((q * sorted.len() as f64).round() as usize).min(sorted.len() - 1);
                sorted[i]
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub n: usize,
    pub model: EdgeModel,
    pub n_diseases: usize,
    pub genes_min: usize,
    pub genes_max: usize,
    /// Boundary below which `rr = 2`.
    pub tau: Threshold,
    /// Boundary below which `rr = 0.5` (when not already 2).
    pub tau_zero: Threshold,
    pub epsilon: f64,
    pub anchors: AnchorRule,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n: 500,
            model: EdgeModel::PreferentialAttachment { m: 2 },
            n_diseases: 40,
            genes_min: 5,
            genes_max: 15,
            tau: Threshold::Quantile(0.584),
            tau_zero: Threshold::Quantile(0.826),
            epsilon: 0.1,
            anchors: AnchorRule::Uniform,
            seed: 1,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n < 50 {
            return bad(format!("n must be at least 50, got {}", self.n));
        }
        if !(0.0..0.5).contains(&self.epsilon) {
            return bad(format!("epsilon must lie in [0, 0.5), got {}", self.epsilon));
        }
        if self.n_diseases < 2 {
            return bad("need at least 2 diseases".into());
        }
        if self.genes_min == 0 || self.genes_min > self.genes_max {
            return bad(format!("bad gene range {}..={}", self.genes_min, self.genes_max));
        }
        if self.genes_max > self.n {
            return bad(format!("modules of {} genes exceed {} nodes", self.genes_max, self.n));
        }
        match self.model {
            EdgeModel::PreferentialAttachment { m } if m == 0 || m >= self.n => {
                bad(format!("attachment parameter {m} out of range"))
            }
            EdgeModel::ErdosRenyi { p } if !(p > 0.0 && p <= 1.0) => bad(format!("edge probability {p} out of range")),
            _ => Ok(()),
        }?;
        for t in [self.tau, self.tau_zero] {
            if let Threshold::Quantile(q) = t {
                if !(0.0..=1.0).contains(&q) {
                    return bad(format!("quantile {q} outside [0, 1]"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Benchmark {
    pub graph: InteractomeGraph,
    pub diseases: DiseaseGeneMap,
    pub rr: RRTable,
    /// Mean cross-module hop distance of each RR row.
    pub mean_distances: Vec<f64>,
    /// Resolved `(tau, tau_zero)` in hops.
    pub tau: (f64, f64),
}

impl Benchmark {
    /// Write `interactome.tsv`, `disease_genes.tsv` and `rr.tsv` into `dir`.
    pub fn write_tsv(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        self.graph.write_edge_list(&dir.join("interactome.tsv"))?;
        self.diseases.write_tsv(&dir.join("disease_genes.tsv"))?;
        self.rr.write_tsv(&dir.join("rr.tsv"))
    }
}

fn preferential_attachment(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    // endpoint list: a node appears once per incident edge
    let mut targets = Vec::new();
    for i in 0..=m {
        for j in 0..i {
            edges.push((j, i));
            targets.extend([i, j]);
        }
    }
    for v in (m + 1)..n {
        let mut chosen = BTreeSet::new();
        while chosen.len() < m {
            chosen.insert(*targets.choose(rng).expect("seed clique is non-empty"));
        }
        for u in chosen {
            edges.push((u, v));
            targets.extend([u, v]);
        }
    }
    edges
}

fn erdos_renyi(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    edges
}

fn build_graph(cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> Result<InteractomeGraph> {
    let edges = match cfg.model {
        EdgeModel::PreferentialAttachment { m } => preferential_attachment(cfg.n, m, rng),
        EdgeModel::ErdosRenyi { p } => erdos_renyi(cfg.n, p, rng),
    };
    let ids = edges
        .into_iter()
        .map(|(a, b)| (GENE_ID_BASE + a as GeneId, GENE_ID_BASE + b as GeneId));
    let (g, _) = InteractomeGraph::from_edges(ids);
    let (lcc, _) = largest_connected_component(&g);
    if (lcc.node_count() as f64) < 0.9 * cfg.n as f64 {
        return Err(Error::Config(format!(
            "largest component has {} of {} nodes; raise the edge density",
            lcc.node_count(),
            cfg.n
        )));
    }
    Ok(lcc)
}

/// The first `size` nodes reached by breadth-first search from `anchor`,
/// neighbors visited in a seeded random order.
fn bfs_module(g: &InteractomeGraph, anchor: usize, size: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut seen = vec![false; g.node_count()];
    let mut order = Vec::with_capacity(size);
    let mut queue = VecDeque::from([anchor]);
    seen[anchor] = true;
    while let Some(v) = queue.pop_front() {
        order.push(v);
        if order.len() == size {
            break;
        }
        let mut next: Vec<usize> = g.neighbors(v).iter().map(|&u| u as usize).collect();
        next.shuffle(rng);
        for u in next {
            if !seen[u] {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    order
}

fn pick_anchors(g: &InteractomeGraph, cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let pool: Vec<usize> = match cfg.anchors {
        AnchorRule::Uniform => (0..g.node_count()).collect(),
        AnchorRule::LowDegree => {
            let deg = node_degrees(g);
            let mut sorted = deg.0.clone();
            sorted.sort_unstable();
            let median = sorted[sorted.len() / 2];
            (0..g.node_count()).filter(|&i| deg.get(i) <= median).collect()
        }
    };
    if pool.len() >= cfg.n_diseases {
        pool.choose_multiple(rng, cfg.n_diseases).copied().collect()
    } else {
        (0..cfg.n_diseases).map(|_| *pool.choose(rng).expect("non-empty pool")).collect()
    }
}

/// Mean of `d(a, b)` over all `a ∈ left`, `b ∈ right`.
pub fn mean_cross_distance(d: &DistanceMatrix, left: &[usize], right: &[usize]) -> f64 {
    let total: u64 = left
        .iter()
        .flat_map(|&a| right.iter().map(move |&b| u64::from(d.get(a, b))))
        .sum();
    total as f64 / (left.len() * right.len()) as f64
}

pub fn disease_name(i: usize) -> String {
    format!("D{i:03}")
}

pub fn generate_benchmark(cfg: &SynthConfig) -> Result<Benchmark> {
    cfg.validate()?;
    let mut graph_rng = ChaCha8Rng::seed_from_u64(seed::derive(cfg.seed, "synth-graph", &[]));
    let graph = build_graph(cfg, &mut graph_rng)?;
    if cfg.genes_max > graph.node_count() {
        return Err(Error::Config(format!(
            "modules of {} genes exceed the {}-node component",
            cfg.genes_max,
            graph.node_count()
        )));
    }
    let d = all_pairs_shortest_paths(&graph)?;

    let mut module_rng = ChaCha8Rng::seed_from_u64(seed::derive(cfg.seed, "synth-modules", &[]));
    let anchors = pick_anchors(&graph, cfg, &mut module_rng);
    let mut modules = Vec::with_capacity(cfg.n_diseases);
    let mut diseases = DiseaseGeneMap::new();
    for (i, &anchor) in anchors.iter().enumerate() {
        let size = module_rng.random_range(cfg.genes_min..=cfg.genes_max);
        let module = bfs_module(&graph, anchor, size, &mut module_rng);
        for &v in &module {
            diseases.insert(&disease_name(i), graph.node_ids()[v]);
        }
        modules.push(module);
    }

    let mut pairs = Vec::new();
    let mut mean_distances = Vec::new();
    for a in 0..modules.len() {
        for b in (a + 1)..modules.len() {
            pairs.push((a, b));
            mean_distances.push(mean_cross_distance(&d, &modules[a], &modules[b]));
        }
    }
    let mut sorted = mean_distances.clone();
    sorted.sort_by(f64::total_cmp);
    let tau = (cfg.tau.resolve(&sorted), cfg.tau_zero.resolve(&sorted));

    let mut noise = ChaCha8Rng::seed_from_u64(seed::derive(cfg.seed, "synth-noise", &[]));
    let rows = pairs
        .iter()
        .zip(&mean_distances)
        .map(|(&(a, b), &m)| {
            let flip_high = noise.random_bool(cfg.epsilon);
            let flip_low = noise.random_bool(cfg.epsilon);
            let high = (m < tau.0) != flip_high;
            let low = (m < tau.1) != flip_low;
            let rr = if high {
                2.0
            } else if low {
                0.5
            } else {
                0.0
            };
            RrRow {
                disease_a: disease_name(a),
                disease_b: disease_name(b),
                rr,
            }
        })
        .collect();

    Ok(Benchmark {
        graph,
        diseases,
        rr: RRTable { rows },
        mean_distances,
        tau,
    })
}
