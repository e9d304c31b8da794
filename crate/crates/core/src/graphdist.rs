//! All-pairs hop distances over a connected interactome, node degrees, and
//! the on-disk distance cache.
//!
//! Cache layout (little-endian): magic `BSED`, version byte `0x01`, node
//! count as `u32`, `n * n` hop counts as `u16` row-major, then a `u64`
//! checksum equal to the wrapping sum of all hop counts.

use std::collections::VecDeque;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::netio::InteractomeGraph;

pub const CACHE_MAGIC: &[u8; 4] = b"BSED";
pub const CACHE_VERSION: u8 = 0x01;

const UNREACHED: u16 = u16::MAX;

/// Dense symmetric hop-count matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<u16>,
}

impl DistanceMatrix {
    pub fn from_raw(n: usize, data: Vec<u16>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u16 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[u16] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[u16] {
        &self.data
    }

    pub fn checksum(&self) -> u64 {
        self.data
            .iter()
            .fold(0u64, |acc, &h| acc.wrapping_add(u64::from(h)))
    }

    /// Dense `f64` copy, for small matrices and tests.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| f64::from(self.get(i, j)))
    }
}

/// Something that can hand out rows of hop counts. Implemented by the dense
/// matrix and by the recomputing streaming source.
pub trait HopRows: Sync {
    fn node_count(&self) -> usize;
    fn with_row<R>(&self, i: usize, f: impl FnOnce(&[u16]) -> R) -> R;
}

impl HopRows for DistanceMatrix {
    fn node_count(&self) -> usize {
        self.n
    }

    fn with_row<R>(&self, i: usize, f: impl FnOnce(&[u16]) -> R) -> R {
        f(self.row(i))
    }
}

/// Recomputes each row by BFS on demand instead of holding `n²` entries.
pub struct StreamingDistances<'g> {
    graph: &'g InteractomeGraph,
}

impl<'g> StreamingDistances<'g> {
    pub fn new(graph: &'g InteractomeGraph) -> Result<Self> {
        ensure_connected(graph)?;
        Ok(Self { graph })
    }
}

impl HopRows for StreamingDistances<'_> {
    fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    fn with_row<R>(&self, i: usize, f: impl FnOnce(&[u16]) -> R) -> R {
        let mut row = vec![UNREACHED; self.graph.node_count()];
        let mut queue = VecDeque::new();
        // connectivity was checked at construction and n fits u16 there
        bfs_into(self.graph, i, &mut row, &mut queue).expect("checked at construction");
        f(&row)
    }
}

fn ensure_connected(g: &InteractomeGraph) -> Result<()> {
    let (label, count) = g.components();
    if count != 1 {
        let reached = label.iter().filter(|&&l| l == 0).count();
        return Err(Error::Disconnected {
            reached,
            total: g.node_count(),
        });
    }
    Ok(())
}

fn bfs_into(
    g: &InteractomeGraph,
    source: usize,
    row: &mut [u16],
    queue: &mut VecDeque<usize>,
) -> Result<usize> {
    row.fill(UNREACHED);
    queue.clear();
    row[source] = 0;
    queue.push_back(source);
    let mut reached = 1;
    while let Some(u) = queue.pop_front() {
        let next = row[u] as usize + 1;
        for &v in g.neighbors(u) {
            let v = v as usize;
            if row[v] == UNREACHED {
                if next >= UNREACHED as usize {
                    return Err(Error::HopOverflow(next));
                }
                row[v] = next as u16;
                reached += 1;
                queue.push_back(v);
            }
        }
    }
    Ok(reached)
}

/// Single-source hop counts from `source`.
pub fn bfs_row(g: &InteractomeGraph, source: usize) -> Result<Vec<u16>> {
    let mut row = vec![UNREACHED; g.node_count()];
    let reached = bfs_into(g, source, &mut row, &mut VecDeque::new())?;
    if reached != g.node_count() {
        return Err(Error::Disconnected {
            reached,
            total: g.node_count(),
        });
    }
    Ok(row)
}

/// BFS from every node, in parallel over sources. Each source writes its own
/// row, so the result does not depend on the worker count.
pub fn all_pairs_shortest_paths(g: &InteractomeGraph) -> Result<DistanceMatrix> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyInput("graph has no nodes".into()));
    }
    let mut data = vec![UNREACHED; n * n];
    data.par_chunks_mut(n)
        .enumerate()
        .try_for_each_init(VecDeque::new, |queue, (source, row)| {
            let reached = bfs_into(g, source, row, queue)?;
            if reached != n {
                return Err(Error::Disconnected { reached, total: n });
            }
            Ok(())
        })?;
    Ok(DistanceMatrix { n, data })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeVector(pub Vec<u32>);

impl DegreeVector {
    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn max(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&d| u64::from(d)).sum()
    }
}

pub fn node_degrees(g: &InteractomeGraph) -> DegreeVector {
    DegreeVector((0..g.node_count()).map(|i| g.neighbors(i).len() as u32).collect())
}

pub fn write_cache(path: &Path, d: &DistanceMatrix) -> Result<()> {
    let io = |e| Error::io(path, e);
    let n = u32::try_from(d.n).map_err(|_| Error::Cache(format!("node count {} exceeds u32", d.n)))?;
    let file = File::create(path).map_err(io)?;
    let mut out = BufWriter::new(file);
    out.write_all(CACHE_MAGIC).map_err(io)?;
    out.write_all(&[CACHE_VERSION]).map_err(io)?;
    out.write_all(&n.to_le_bytes()).map_err(io)?;
    let mut buf = Vec::with_capacity(d.n * 2);
    for row in d.data.chunks(d.n.max(1)) {
        buf.clear();
        for &h in row {
            buf.extend_from_slice(&h.to_le_bytes());
        }
        out.write_all(&buf).map_err(io)?;
    }
    out.write_all(&d.checksum().to_le_bytes()).map_err(io)?;
    out.flush().map_err(io)
}

/// Read and validate a distance cache. Any structural problem or checksum
/// mismatch is reported as [`Error::Cache`].
pub fn read_cache(path: &Path) -> Result<DistanceMatrix> {
    let io = |e| Error::io(path, e);
    let file = File::open(path).map_err(io)?;
    let expected_len = file.metadata().map_err(io)?.len();
    let mut input = BufReader::new(file);
    let mut header = [0u8; 9];
    input
        .read_exact(&mut header)
        .map_err(|_| Error::Cache("truncated header".into()))?;
    if &header[..4] != CACHE_MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    if header[4] != CACHE_VERSION {
        return Err(Error::Cache(format!("unsupported version {}", header[4])));
    }
    let n = u32::from_le_bytes(header[5..9].try_into().unwrap()) as usize;
    let body = (n as u64) * (n as u64) * 2;
    if expected_len != 9 + body + 8 {
        return Err(Error::Cache(format!(
            "file length {expected_len} does not match node count {n}"
        )));
    }
    let mut bytes = vec![0u8; body as usize];
    input
        .read_exact(&mut bytes)
        .map_err(|_| Error::Cache("truncated body".into()))?;
    let data: Vec<u16> = bytes
        .chunks_exact(2)
        .map(|c| u16::from_le_bytes([c[0], c[1]]))
        .collect();
    let mut tail = [0u8; 8];
    input
        .read_exact(&mut tail)
        .map_err(|_| Error::Cache("missing checksum".into()))?;
    let stored = u64::from_le_bytes(tail);
    let matrix = DistanceMatrix { n, data };
    if matrix.checksum() != stored {
        return Err(Error::Cache("checksum mismatch".into()));
    }
    Ok(matrix)
}
