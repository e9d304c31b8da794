//! Disease feature vectors (column sums of the embedding over a disease's
//! genes) and concatenated disease-pair samples.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::netio::{DiseaseGeneMap, GeneId, InteractomeGraph, LabeledPairs};
use crate::spectral::Embedding;

#[derive(Debug, Clone, PartialEq)]
pub struct DiseaseFeature {
    pub disease: String,
    pub values: Vec<f64>,
}

/// Sum of the embedding rows of `genes`, in ascending node order.
pub fn disease_feature(
    z: &Embedding,
    disease: &str,
    genes: &BTreeSet<GeneId>,
    graph: &InteractomeGraph,
) -> Result<DiseaseFeature> {
    if genes.is_empty() {
        return Err(Error::EmptyInput(format!("disease {disease} has no genes in the graph")));
    }
    let mut rows = genes
        .iter()
        .map(|&g| {
            graph.index_of(g).ok_or_else(|| Error::Unknown {
                kind: "gene",
                name: g.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_unstable();
    let mut values = vec![0.0; z.dims()];
    for &r in &rows {
        for (k, v) in values.iter_mut().enumerate() {
            *v += z.coords[(r, k)];
        }
    }
    Ok(DiseaseFeature {
        disease: disease.to_string(),
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairOrientation {
    /// Keep `(a, b)` exactly as in the relative-risk file.
    #[default]
    FileOrder,
    /// Put the lexicographically smaller disease name first.
    Canonical,
}

/// Row-major sample matrix; each row is `[F_a ‖ F_b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDataset {
    pub pairs: Vec<(String, String)>,
    pub labels: Vec<u8>,
    features: Vec<f64>,
    width: usize,
    /// Disease slot and embedding column behind each feature coordinate.
    pub column_origin: Vec<(Slot, usize)>,
}

impl PairDataset {
    pub fn from_parts(
        pairs: Vec<(String, String)>,
        labels: Vec<u8>,
        features: Vec<f64>,
        column_origin: Vec<(Slot, usize)>,
    ) -> Result<Self> {
        let width = column_origin.len();
        if labels.len() != pairs.len() || features.len() != width * pairs.len() {
            return Err(Error::DimensionMismatch {
                expected: width * pairs.len(),
                got: features.len(),
            });
        }
        Ok(Self {
            pairs,
            labels,
            features,
            width,
            column_origin,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.width..(i + 1) * self.width]
    }

    /// Distinct embedding columns present, in slot-A order.
    pub fn source_columns(&self) -> Vec<usize> {
        self.column_origin
            .iter()
            .filter(|(s, _)| *s == Slot::A)
            .map(|&(_, c)| c)
            .collect()
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> PairDataset {
        let mut features = Vec::with_capacity(indices.len() * self.width);
        for &i in indices {
            features.extend_from_slice(self.row(i));
        }
        PairDataset {
            pairs: indices.iter().map(|&i| self.pairs[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            features,
            width: self.width,
            column_origin: self.column_origin.clone(),
        }
    }

    /// Keep the coordinates of the given embedding columns (both slots),
    /// preserving their original relative order.
    pub fn select_coordinates(&self, columns: &[usize]) -> Result<PairDataset> {
        let present = self.source_columns();
        if let Some(&bad) = columns.iter().find(|c| !present.contains(c)) {
            return Err(Error::Unknown {
                kind: "embedding column",
                name: bad.to_string(),
            });
        }
        let keep: Vec<usize> = self
            .column_origin
            .iter()
            .enumerate()
            .filter(|(_, (_, c))| columns.contains(c))
            .map(|(i, _)| i)
            .collect();
        let width = keep.len();
        let mut features = Vec::with_capacity(self.len() * width);
        for i in 0..self.len() {
            let row = self.row(i);
            features.extend(keep.iter().map(|&k| row[k]));
        }
        Ok(PairDataset {
            pairs: self.pairs.clone(),
            labels: self.labels.clone(),
            features,
            width,
            column_origin: keep.iter().map(|&k| self.column_origin[k]).collect(),
        })
    }

    /// CSV with header `disease_a,disease_b,label,f_0..f_{w-1}`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let io = |e| Error::io(path, e);
        let mut out = BufWriter::new(File::create(path).map_err(io)?);
        let header: Vec<String> = (0..self.width).map(|i| format!("f_{i}")).collect();
        writeln!(out, "disease_a,disease_b,label,{}", header.join(",")).map_err(io)?;
        for i in 0..self.len() {
            let (a, b) = &self.pairs[i];
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(out, "{a},{b},{},{}", self.labels[i], row.join(",")).map_err(io)?;
        }
        out.flush().map_err(io)
    }
}

/// One sample per labeled pair, in label order. Every disease referenced by
/// `labels` must have a non-empty gene set in `map`.
pub fn assemble_dataset(
    z: &Embedding,
    map: &DiseaseGeneMap,
    labels: &LabeledPairs,
    graph: &InteractomeGraph,
    orientation: PairOrientation,
) -> Result<PairDataset> {
    if z.nodes() != graph.node_count() {
        return Err(Error::DimensionMismatch {
            expected: graph.node_count(),
            got: z.nodes(),
        });
    }
    let mut needed: Vec<&str> = labels
        .pairs
        .iter()
        .flat_map(|p| [p.disease_a.as_str(), p.disease_b.as_str()])
        .collect();
    needed.sort_unstable();
    needed.dedup();
    let features: HashMap<&str, DiseaseFeature> = needed
        .par_iter()
        .map(|&name| {
            let genes = map.genes(name).ok_or_else(|| Error::Unknown {
                kind: "disease",
                name: name.to_string(),
            })?;
            Ok((name, disease_feature(z, name, genes, graph)?))
        })
        .collect::<Result<_>>()?;

    let m = z.dims();
    let pairs: Vec<(String, String)> = labels
        .pairs
        .iter()
        .map(|p| match orientation {
            PairOrientation::Canonical if p.disease_b < p.disease_a => {
                (p.disease_b.clone(), p.disease_a.clone())
            }
            _ => (p.disease_a.clone(), p.disease_b.clone()),
        })
        .collect();
    let rows: Vec<Vec<f64>> = pairs
        .par_iter()
        .map(|(a, b)| {
            let mut row = Vec::with_capacity(2 * m);
            row.extend_from_slice(&features[a.as_str()].values);
            row.extend_from_slice(&features[b.as_str()].values);
            row
        })
        .collect();
    let column_origin = z
        .source_columns
        .iter()
        .map(|&c| (Slot::A, c))
        .chain(z.source_columns.iter().map(|&c| (Slot::B, c)))
        .collect();
    PairDataset::from_parts(pairs, labels.labels(), rows.concat(), column_origin)
}
