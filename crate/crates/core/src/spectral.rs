//! Raw embedding matrices built from the hop-distance matrix.
//!
//! Two families are produced:
//! - centered (classical MDS / Isomap): eigenpairs of `−½·H·(D∘D)·H`,
//!   coordinates `u·√λ` over the positive part of the spectrum;
//! - uncentered: eigenpairs of the symmetric `D` read as an SVD
//!   (`σ = |λ|`), either scaled `u·σ` or bare unit vectors `u`.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::info;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graphdist::{DistanceMatrix, HopRows};
use crate::linalg::{
    top_eigenpairs, CenteredGramOperator, DistanceOperator, EigenOptions, SpectrumOrder, SymOperator,
};
use crate::netio::GeneId;

/// The six experiment variants: three embedding families, each with a
/// supervised-selection arm and a rank-by-value arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// Scaled singular vectors, supervised selection.
    E1,
    /// Scaled singular vectors, top by singular value.
    E2,
    /// Unit singular vectors, supervised selection.
    E3,
    /// Unit singular vectors, top by singular value.
    E4,
    /// Centered (Isomap) embedding, supervised selection.
    E5,
    /// Centered (Isomap) embedding, top by eigenvalue.
    E6,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::E1,
        Variant::E2,
        Variant::E3,
        Variant::E4,
        Variant::E5,
        Variant::E6,
    ];

    pub fn is_select(self) -> bool {
        matches!(self, Variant::E1 | Variant::E3 | Variant::E5)
    }

    /// The supervised variant sharing this variant's raw embedding.
    pub fn raw_source(self) -> Variant {
        match self {
            Variant::E1 | Variant::E2 => Variant::E1,
            Variant::E3 | Variant::E4 => Variant::E3,
            Variant::E5 | Variant::E6 => Variant::E5,
        }
    }

    /// The other arm of the same family.
    pub fn counterpart(self) -> Variant {
        match self {
            Variant::E1 => Variant::E2,
            Variant::E2 => Variant::E1,
            Variant::E3 => Variant::E4,
            Variant::E4 => Variant::E3,
            Variant::E5 => Variant::E6,
            Variant::E6 => Variant::E5,
        }
    }

    /// Family name used in reports: `emb`, `vect` or `iso`.
    pub fn family(self) -> &'static str {
        match self.raw_source() {
            Variant::E1 => "emb",
            Variant::E3 => "vect",
            _ => "iso",
        }
    }

    /// Short report label such as `iso_s` or `emb_r`.
    pub fn label(self) -> String {
        format!("{}_{}", self.family(), if self.is_select() { "s" } else { "r" })
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Unknown {
                kind: "variant",
                name: s.to_string(),
            })
    }
}

/// Dense double-centered Gram matrix `−½·H·(D∘D)·H`.
#[derive(Debug, Clone)]
pub struct GramMatrix(pub DMatrix<f64>);

impl SymOperator for GramMatrix {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        &self.0 * x
    }

    fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    fn to_dense(&self) -> DMatrix<f64> {
        self.0.clone()
    }
}

/// Dense centered Gram matrix. Each entry is evaluated once for `i ≤ j` and
/// mirrored, so the result is exactly symmetric.
pub fn gram_center(d: &DistanceMatrix) -> GramMatrix {
    let op = CenteredGramOperator::new(d);
    let n = d.len();
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = op.entry(i, j, d.get(i, j));
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    GramMatrix(g)
}

/// Centered Gram matrix of an arbitrary real symmetric distance matrix.
pub fn gram_center_dense(d: &DMatrix<f64>) -> Result<GramMatrix> {
    let n = d.nrows();
    if d.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: d.ncols() });
    }
    if n == 0 {
        return Err(Error::EmptyInput("distance matrix".into()));
    }
    let nf = n as f64;
    let sq = d.map(|v| v * v);
    let row_means: Vec<f64> = (0..n).map(|i| sq.row(i).sum() / nf).collect();
    let grand = row_means.iter().sum::<f64>() / nf;
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(GramMatrix(g))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    CenteredEigen,
    RawSvd,
}

/// Orthonormal columns with their eigen- or singular values.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    pub vectors: DMatrix<f64>,
    pub values: Vec<f64>,
    pub kind: BasisKind,
    pub seed: u64,
}

impl SpectralBasis {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Top-`k` eigenpairs by algebraic value, descending.
pub fn eig_sym_topk<M: SymOperator + ?Sized>(m: &M, k: usize, opts: &EigenOptions) -> Result<SpectralBasis> {
    let pairs = top_eigenpairs(m, k, SpectrumOrder::Algebraic, opts)?;
    Ok(SpectralBasis {
        vectors: pairs.vectors,
        values: pairs.values,
        kind: BasisKind::CenteredEigen,
        seed: opts.seed,
    })
}

/// Top-`k` singular triplets of a symmetric matrix: the eigenvectors of `D`
/// ordered by `|λ|`, with `σ = |λ|`. These satisfy `D·D·u = σ²·u`.
pub fn svd_sym_topk<M: SymOperator + ?Sized>(d: &M, k: usize, opts: &EigenOptions) -> Result<SpectralBasis> {
    let pairs = top_eigenpairs(d, k, SpectrumOrder::Magnitude, opts)?;
    Ok(SpectralBasis {
        vectors: pairs.vectors,
        values: pairs.values.iter().map(|v| v.abs()).collect(),
        kind: BasisKind::RawSvd,
        seed: opts.seed,
    })
}

/// Exponent applied to the eigenvalues in the centered embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MdsExponent {
    /// `u·λ^{+1/2}`: classical MDS, `Z·Zᵀ` reproduces the Gram matrix.
    #[default]
    Standard,
    /// `u·λ^{−1/2}`.
    Inverse,
}

impl FromStr for MdsExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "standard" | "+0.5" | "0.5" => Ok(MdsExponent::Standard),
            "inverse" | "-0.5" => Ok(MdsExponent::Inverse),
            other => Err(Error::Unknown {
                kind: "mds exponent",
                name: other.to_string(),
            }),
        }
    }
}

/// Node coordinates plus where each column came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    /// `n × d`.
    pub coords: DMatrix<f64>,
    /// Basis column index behind each coordinate.
    pub source_columns: Vec<usize>,
    pub variant: Variant,
    /// Eigen- or singular value behind each coordinate.
    pub values_used: Vec<f64>,
    pub seed: u64,
}

impl Embedding {
    pub fn nodes(&self) -> usize {
        self.coords.nrows()
    }

    pub fn dims(&self) -> usize {
        self.coords.ncols()
    }

    /// Position of basis column `source` among this embedding's columns.
    pub fn position_of(&self, source: usize) -> Option<usize> {
        self.source_columns.iter().position(|&c| c == source)
    }

    /// Keep only the listed basis columns, in the given order.
    pub fn select_columns(&self, sources: &[usize], variant: Variant) -> Result<Embedding> {
        let positions = sources
            .iter()
            .map(|&s| {
                self.position_of(s).ok_or_else(|| Error::Unknown {
                    kind: "embedding column",
                    name: s.to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let coords = DMatrix::from_fn(self.nodes(), positions.len(), |i, j| self.coords[(i, positions[j])]);
        Ok(Embedding {
            coords,
            source_columns: sources.to_vec(),
            variant,
            values_used: positions.iter().map(|&p| self.values_used[p]).collect(),
            seed: self.seed,
        })
    }
}

fn scaled_columns(basis: &SpectralBasis, cols: &[usize], scale: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let n = basis.vectors.nrows();
    DMatrix::from_fn(n, cols.len(), |i, j| basis.vectors[(i, cols[j])] * scale(basis.values[cols[j]]))
}

/// Centered embedding over the top `d` positive eigenvalues.
pub fn embed_centered(basis: &SpectralBasis, d: usize, exponent: MdsExponent) -> Result<Embedding> {
    let positive: Vec<usize> = (0..basis.len()).filter(|&j| basis.values[j] > 0.0).collect();
    if positive.len() < d {
        return Err(Error::NotEnoughPositive {
            requested: d,
            available: positive.len(),
        });
    }
    let cols = &positive[..d];
    let coords = match exponent {
        MdsExponent::Standard => scaled_columns(basis, cols, f64::sqrt),
        MdsExponent::Inverse => scaled_columns(basis, cols, |l| 1.0 / l.sqrt()),
    };
    Ok(Embedding {
        coords,
        source_columns: cols.to_vec(),
        variant: Variant::E5,
        values_used: cols.iter().map(|&j| basis.values[j]).collect(),
        seed: basis.seed,
    })
}

fn check_dims(basis: &SpectralBasis, d: usize) -> Result<()> {
    if d > basis.len() {
        return Err(Error::Invalid(format!("d = {d} exceeds basis size {}", basis.len())));
    }
    Ok(())
}

/// `Z = U_d · Σ_d`.
pub fn embed_scaled(basis: &SpectralBasis, d: usize) -> Result<Embedding> {
    check_dims(basis, d)?;
    let cols: Vec<usize> = (0..d).collect();
    Ok(Embedding {
        coords: scaled_columns(basis, &cols, |s| s),
        source_columns: cols,
        variant: Variant::E1,
        values_used: basis.values[..d].to_vec(),
        seed: basis.seed,
    })
}

/// `Z = U_d`.
pub fn embed_vectors(basis: &SpectralBasis, d: usize) -> Result<Embedding> {
    check_dims(basis, d)?;
    let cols: Vec<usize> = (0..d).collect();
    Ok(Embedding {
        coords: basis.vectors.columns(0, d).into_owned(),
        source_columns: cols,
        variant: Variant::E3,
        values_used: basis.values[..d].to_vec(),
        seed: basis.seed,
    })
}

/// The raw `k`-column matrix `Z₀` behind a variant family. `k` is clamped to
/// the node count; the centered family is further truncated to the number
/// of positive eigenvalues.
pub fn build_raw_embedding<R: HopRows>(
    variant: Variant,
    distances: &R,
    k: usize,
    exponent: MdsExponent,
    opts: &EigenOptions,
) -> Result<Embedding> {
    let n = distances.node_count();
    let k = k.min(n);
    let raw = variant.raw_source();
    let mut emb = match raw {
        Variant::E1 | Variant::E3 => {
            let basis = svd_sym_topk(&DistanceOperator::new(distances), k, opts)?;
            if raw == Variant::E1 {
                embed_scaled(&basis, k)?
            } else {
                embed_vectors(&basis, k)?
            }
        }
        _ => {
            let basis = eig_sym_topk(&CenteredGramOperator::new(distances), k, opts)?;
            let positive = basis.values.iter().filter(|&&v| v > 0.0).count();
            if positive < k {
                info!("centered embedding truncated from {k} to {positive} dimensions (non-positive eigenvalues)");
            }
            embed_centered(&basis, positive.min(k), exponent)?
        }
    };
    emb.variant = variant;
    Ok(emb)
}

fn meta_path(path: &Path) -> PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".meta");
    PathBuf::from(os)
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// Write `node_gene_id,dim_<c>…` CSV plus a `<path>.meta` key-value sidecar.
pub fn write_embedding(path: &Path, emb: &Embedding, node_ids: &[GeneId]) -> Result<()> {
    if node_ids.len() != emb.nodes() {
        return Err(Error::DimensionMismatch {
            expected: emb.nodes(),
            got: node_ids.len(),
        });
    }
    let io = |e| Error::io(path, e);
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    let header: Vec<String> = emb.source_columns.iter().map(|c| format!("dim_{c}")).collect();
    writeln!(out, "node_gene_id,{}", header.join(",")).map_err(io)?;
    for (i, gene) in node_ids.iter().enumerate() {
        let row: Vec<String> = emb.coords.row(i).iter().map(ToString::to_string).collect();
        writeln!(out, "{gene},{}", row.join(",")).map_err(io)?;
    }
    out.flush().map_err(io)?;

    let meta = meta_path(path);
    let io = |e| Error::io(&meta, e);
    let mut out = BufWriter::new(File::create(&meta).map_err(io)?);
    writeln!(out, "variant_tag={}", emb.variant).map_err(io)?;
    writeln!(out, "source_columns={}", join(&emb.source_columns)).map_err(io)?;
    writeln!(out, "values_used={}", join(&emb.values_used)).map_err(io)?;
    writeln!(out, "seed={}", emb.seed).map_err(io)?;
    out.flush().map_err(io)
}

/// Read an embedding written by [`write_embedding`].
pub fn read_embedding(path: &Path) -> Result<(Vec<GeneId>, Embedding)> {
    let io = |e| Error::io(path, e);
    let reader = BufReader::new(File::open(path).map_err(io)?);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::EmptyInput(path.display().to_string()))?
        .map_err(io)?;
    let mut source_columns = Vec::new();
    for field in header.split(',').skip(1) {
        let c = field
            .strip_prefix("dim_")
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| Error::parse(path, 1, format!("bad column header {field:?}")))?;
        source_columns.push(c);
    }
    let d = source_columns.len();
    let mut node_ids = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.map_err(io)?;
        let mut fields = line.split(',');
        let gene = fields
            .next()
            .and_then(|g| g.parse().ok())
            .ok_or_else(|| Error::parse(path, lineno + 2, "bad gene id"))?;
        node_ids.push(gene);
        let row: Vec<f64> = fields
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::parse(path, lineno + 2, e.to_string()))?;
        if row.len() != d {
            return Err(Error::parse(path, lineno + 2, format!("expected {d} values, got {}", row.len())));
        }
        values.extend(row);
    }
    let coords = DMatrix::from_row_slice(node_ids.len(), d, &values);

    let meta = meta_path(path);
    let text = std::fs::read_to_string(&meta).map_err(|e| Error::io(&meta, e))?;
    let mut variant = Variant::E1;
    let mut values_used = Vec::new();
    let mut seed = 0;
    for (lineno, line) in text.lines().enumerate() {
        let Some((key, value)) = line.split_once('=') else { continue };
        let bad = |m: String| Error::parse(&meta, lineno + 1, m);
        match key.trim() {
            "variant_tag" => variant = value.parse()?,
            "values_used" if !value.is_empty() => {
                values_used = value
                    .split(',')
                    .map(|v| v.parse::<f64>().map_err(|e| bad(e.to_string())))
                    .collect::<Result<_>>()?
            }
            "seed" => seed = value.trim().parse().map_err(|_| bad(format!("bad seed {value:?}")))?,
            _ => {}
        }
    }
    Ok((
        node_ids,
        Embedding {
            coords,
            source_columns,
            variant,
            values_used,
            seed,
        },
    ))
}
