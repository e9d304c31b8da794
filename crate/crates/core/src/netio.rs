//! Loaders for the interactome, disease–gene associations and relative-risk
//! tables, plus largest-connected-component extraction and pair labeling.
//!
//! All inputs are tab-separated text, one record per row. Lines starting
//! with `#` and blank lines are ignored.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use log::warn;

use crate::error::{Error, Result};

/// Gene identifiers are positive integers (Entrez-style).
pub type GeneId = u64;

/// Undirected, unweighted interaction graph with a canonical node order
/// (ascending gene ID).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractomeGraph {
    node_ids: Vec<GeneId>,
    adjacency: Vec<Vec<u32>>,
    edge_count: usize,
}

/// Bookkeeping produced while building a graph from raw edge rows.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeListReport {
    pub rows: usize,
    pub self_loops: usize,
    pub duplicates: usize,
}

impl InteractomeGraph {
    /// Build a graph from raw gene-ID pairs. Duplicates (in either
    /// orientation) collapse; self-loops are dropped but their endpoint
    /// still becomes a node.
    pub fn from_edges<I>(edges: I) -> (Self, EdgeListReport)
    where
        I: IntoIterator<Item = (GeneId, GeneId)>,
    {
        let mut report = EdgeListReport::default();
        let mut nodes = BTreeSet::new();
        let mut pairs = BTreeSet::new();
        for (a, b) in edges {
            report.rows += 1;
            nodes.insert(a);
            nodes.insert(b);
            if a == b {
                report.self_loops += 1;
                continue;
            }
            if !pairs.insert((a.min(b), a.max(b))) {
                report.duplicates += 1;
            }
        }
        let node_ids: Vec<GeneId> = nodes.into_iter().collect();
        let index: HashMap<GeneId, u32> = node_ids
            .iter()
            .enumerate()
            .map(|(i, &g)| (g, i as u32))
            .collect();
        let mut adjacency = vec![Vec::new(); node_ids.len()];
        for &(a, b) in &pairs {
            let (ia, ib) = (index[&a], index[&b]);
            adjacency[ia as usize].push(ib);
            adjacency[ib as usize].push(ia);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let graph = InteractomeGraph {
            node_ids,
            adjacency,
            edge_count: pairs.len(),
        };
        (graph, report)
    }

    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn node_ids(&self) -> &[GeneId] {
        &self.node_ids
    }

    pub fn neighbors(&self, node: usize) -> &[u32] {
        &self.adjacency[node]
    }

    pub fn index_of(&self, gene: GeneId) -> Option<usize> {
        self.node_ids.binary_search(&gene).ok()
    }

    /// Each undirected edge once, as `(i, j)` with `i < j`, in index order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, adj)| {
            adj.iter()
                .map(|&j| j as usize)
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    /// Component label per node plus component count. Components are
    /// numbered in order of their smallest node index.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let n = self.node_count();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adjacency[u] {
                    let v = v as usize;
                    if label[v] == usize::MAX {
                        label[v] = count;
                        queue.push_back(v);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() > 0 && self.components().1 == 1
    }

    /// Induced subgraph on `keep` (ascending node indices).
    fn induced(&self, keep: &[usize]) -> (InteractomeGraph, Vec<Option<usize>>) {
        let mut map = vec![None; self.node_count()];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = Some(new);
        }
        let mut adjacency = Vec::with_capacity(keep.len());
        let mut degree_sum = 0;
        for &old in keep {
            let list: Vec<u32> = self.adjacency[old]
                .iter()
                .filter_map(|&v| map[v as usize].map(|x| x as u32))
                .collect();
            degree_sum += list.len();
            adjacency.push(list);
        }
        let graph = InteractomeGraph {
            node_ids: keep.iter().map(|&i| self.node_ids[i]).collect(),
            adjacency,
            edge_count: degree_sum / 2,
        };
        (graph, map)
    }

    pub fn write_edge_list(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(out, "# gene_a\tgene_b").map_err(io)?;
        for (i, j) in self.edges() {
            writeln!(out, "{}\t{}", self.node_ids[i], self.node_ids[j]).map_err(io)?;
        }
        out.flush().map_err(io)
    }
}

fn data_lines<'a, R: BufRead + 'a>(
    reader: R,
    path: &'a Path,
) -> impl Iterator<Item = Result<(usize, String)>> + 'a {
    reader
        .lines()
        .enumerate()
        .filter_map(move |(i, line)| match line {
            Err(e) => Some(Err(Error::io(path, e))),
            Ok(line) => {
                let trimmed = line.trim();
                if trimmed.is_empty() || trimmed.starts_with('#') {
                    None
                } else {
                    Some(Ok((i + 1, trimmed.to_string())))
                }
            }
        })
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

fn parse_gene(field: &str, path: &Path, line: usize) -> Result<GeneId> {
    match field.trim().parse::<GeneId>() {
        Ok(g) if g > 0 => Ok(g),
        _ => Err(Error::parse(
            path,
            line,
            format!("expected a positive integer gene id, got {field:?}"),
        )),
    }
}

/// Parse an interactome edge list from any reader; `path` is used for error
/// messages only.
pub fn read_edge_list<R: BufRead>(reader: R, path: &Path) -> Result<(InteractomeGraph, EdgeListReport)> {
    let mut edges = Vec::new();
    for item in data_lines(reader, path) {
        let (line, text) = item?;
        let mut fields = text.split('\t');
        let (Some(a), Some(b)) = (fields.next(), fields.next()) else {
            return Err(Error::parse(path, line, "expected two tab-separated gene ids"));
        };
        edges.push((parse_gene(a, path, line)?, parse_gene(b, path, line)?));
    }
    if edges.is_empty() {
        return Err(Error::EmptyInput(format!("no edges in {}", path.display())));
    }
    let (graph, report) = InteractomeGraph::from_edges(edges);
    if report.self_loops > 0 {
        warn!("{}: dropped {} self-loop(s)", path.display(), report.self_loops);
    }
    Ok((graph, report))
}

pub fn load_edge_list(path: &Path) -> Result<(InteractomeGraph, EdgeListReport)> {
    read_edge_list(open(path)?, path)
}

/// Extract the largest connected component. Ties between equally large
/// components go to the one holding the smallest gene ID. The returned map
/// sends old node indices to new ones (`None` for dropped nodes).
pub fn largest_connected_component(g: &InteractomeGraph) -> (InteractomeGraph, Vec<Option<usize>>) {
    let (label, count) = g.components();
    let mut sizes = vec![0usize; count];
    for &l in &label {
        sizes[l] += 1;
    }
    // Components are numbered by first node index, and node order is gene-ID
    // order, so the lowest-numbered component of maximal size wins the tie.
    let best = (0..count)
        .max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a)))
        .unwrap_or(0);
    let keep: Vec<usize> = (0..g.node_count()).filter(|&i| label[i] == best).collect();
    g.induced(&keep)
}

/// Disease name → associated gene set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DiseaseGeneMap {
    diseases: Vec<String>,
    gene_sets: Vec<BTreeSet<GeneId>>,
    index: HashMap<String, usize>,
}

impl DiseaseGeneMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, disease: &str, gene: GeneId) {
        let idx = match self.index.get(disease) {
            Some(&i) => i,
            None => {
                self.diseases.push(disease.to_string());
                self.gene_sets.push(BTreeSet::new());
                self.index.insert(disease.to_string(), self.diseases.len() - 1);
                self.diseases.len() - 1
            }
        };
        self.gene_sets[idx].insert(gene);
    }

    pub fn len(&self) -> usize {
        self.diseases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diseases.is_empty()
    }

    pub fn diseases(&self) -> &[String] {
        &self.diseases
    }

    pub fn genes(&self, disease: &str) -> Option<&BTreeSet<GeneId>> {
        self.index.get(disease).map(|&i| &self.gene_sets[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &BTreeSet<GeneId>)> {
        self.diseases
            .iter()
            .map(String::as_str)
            .zip(self.gene_sets.iter())
    }

    /// Number of diseases whose gene set contains `gene`.
    pub fn association_count(&self, gene: GeneId) -> usize {
        self.gene_sets.iter().filter(|s| s.contains(&gene)).count()
    }

    /// Restrict every gene set to genes present in `graph`. Diseases are
    /// kept even if their set becomes empty; the per-disease number of
    /// excluded genes is returned alongside.
    pub fn restrict_to(&self, graph: &InteractomeGraph) -> (DiseaseGeneMap, Vec<usize>) {
        let mut excluded = Vec::with_capacity(self.len());
        let mut gene_sets = Vec::with_capacity(self.len());
        for (name, set) in self.iter() {
            let kept: BTreeSet<GeneId> = set
                .iter()
                .copied()
                .filter(|&g| graph.index_of(g).is_some())
                .collect();
            let dropped = set.len() - kept.len();
            if dropped > 0 {
                log::info!("{name}: {dropped} gene(s) outside the graph excluded");
            }
            excluded.push(dropped);
            gene_sets.push(kept);
        }
        let restricted = DiseaseGeneMap {
            diseases: self.diseases.clone(),
            gene_sets,
            index: self.index.clone(),
        };
        (restricted, excluded)
    }

    pub fn write_tsv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(out, "# disease_name\tgene_id").map_err(io)?;
        for (name, set) in self.iter() {
            for g in set {
                writeln!(out, "{name}\t{g}").map_err(io)?;
            }
        }
        out.flush().map_err(io)
    }
}

pub fn read_disease_genes<R: BufRead>(reader: R, path: &Path) -> Result<DiseaseGeneMap> {
    let mut map = DiseaseGeneMap::new();
    for item in data_lines(reader, path) {
        let (line, text) = item?;
        let mut fields = text.split('\t');
        let (Some(name), Some(gene)) = (fields.next(), fields.next()) else {
            return Err(Error::parse(path, line, "expected disease_name<TAB>gene_id"));
        };
        let name = name.trim();
        if name.is_empty() {
            return Err(Error::parse(path, line, "empty disease name"));
        }
        map.insert(name, parse_gene(gene, path, line)?);
    }
    if map.is_empty() {
        warn!("{}: no disease-gene associations", path.display());
    }
    Ok(map)
}

pub fn load_disease_genes(path: &Path) -> Result<DiseaseGeneMap> {
    read_disease_genes(open(path)?, path)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RrRow {
    pub disease_a: String,
    pub disease_b: String,
    pub rr: f64,
}

/// Relative-risk table in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RRTable {
    pub rows: Vec<RrRow>,
}

impl RRTable {
    /// Keep only pairs whose diseases both exist in `map` with a non-empty
    /// gene set. Returns the filtered table and the number of dropped rows.
    pub fn retain_usable(&self, map: &DiseaseGeneMap) -> (RRTable, usize) {
        let usable = |d: &str| map.genes(d).is_some_and(|s| !s.is_empty());
        let rows: Vec<RrRow> = self
            .rows
            .iter()
            .filter(|r| usable(&r.disease_a) && usable(&r.disease_b))
            .cloned()
            .collect();
        let dropped = self.rows.len() - rows.len();
        if dropped > 0 {
            warn!("dropped {dropped} disease pair(s) with no usable genes");
        }
        (RRTable { rows }, dropped)
    }

    pub fn write_tsv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(out, "# disease_a\tdisease_b\trr").map_err(io)?;
        for r in &self.rows {
            writeln!(out, "{}\t{}\t{}", r.disease_a, r.disease_b, r.rr).map_err(io)?;
        }
        out.flush().map_err(io)
    }
}

pub fn read_rr_table<R: BufRead>(reader: R, path: &Path) -> Result<RRTable> {
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for item in data_lines(reader, path) {
        let (line, text) = item?;
        let fields: Vec<&str> = text.split('\t').map(str::trim).collect();
        if fields.len() < 3 {
            return Err(Error::parse(path, line, "expected disease_a<TAB>disease_b<TAB>rr"));
        }
        let rr: f64 = fields[2]
            .parse()
            .map_err(|_| Error::parse(path, line, format!("bad rr value {:?}", fields[2])))?;
        if !rr.is_finite() || rr < 0.0 {
            return Err(Error::parse(path, line, format!("rr must be finite and >= 0, got {rr}")));
        }
        let (a, b) = (fields[0].to_string(), fields[1].to_string());
        let key = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
        if !seen.insert(key) {
            return Err(Error::parse(path, line, format!("duplicate pair {a} / {b}")));
        }
        rows.push(RrRow {
            disease_a: a,
            disease_b: b,
            rr,
        });
    }
    Ok(RRTable { rows })
}

pub fn load_rr_table(path: &Path) -> Result<RRTable> {
    read_rr_table(open(path)?, path)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPair {
    pub disease_a: String,
    pub disease_b: String,
    pub label: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPairs {
    pub threshold: f64,
    pub pairs: Vec<LabeledPair>,
    pub positive_fraction: f64,
}

impl LabeledPairs {
    pub fn labels(&self) -> Vec<u8> {
        self.pairs.iter().map(|p| p.label).collect()
    }
}

/// A pair is positive iff its relative risk is strictly above `threshold`.
pub fn label_pairs(rr: &RRTable, threshold: f64) -> LabeledPairs {
    let pairs: Vec<LabeledPair> = rr
        .rows
        .iter()
        .map(|r| LabeledPair {
            disease_a: r.disease_a.clone(),
            disease_b: r.disease_b.clone(),
            label: u8::from(r.rr > threshold),
        })
        .collect();
    let positives = pairs.iter().filter(|p| p.label == 1).count();
    let positive_fraction = if pairs.is_empty() {
        0.0
    } else {
        positives as f64 / pairs.len() as f64
    };
    LabeledPairs {
        threshold,
        pairs,
        positive_fraction,
    }
}
