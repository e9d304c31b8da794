//! Symmetric operators and a top-k eigensolver.
//!
//! Small problems go through a dense symmetric decomposition. Large ones use
//! a restarted block Krylov iteration with Rayleigh–Ritz extraction, which
//! only needs block products `M·X` and so never materializes the matrix.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphdist::HopRows;

/// A real symmetric `n × n` operator.
pub trait SymOperator: Sync {
    fn dim(&self) -> usize;

    /// Block product `M·X` for an `n × b` block.
    fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64>;

    fn frobenius_norm(&self) -> f64;

    fn to_dense(&self) -> DMatrix<f64>;
}

impl SymOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        self * x
    }

    fn frobenius_norm(&self) -> f64 {
        self.norm()
    }

    fn to_dense(&self) -> DMatrix<f64> {
        self.clone()
    }
}

/// Row-major copy of a column-major block, so each row is contiguous.
fn rows_of(x: &DMatrix<f64>) -> Vec<f64> {
    let (n, b) = x.shape();
    let mut out = vec![0.0; n * b];
    for c in 0..b {
        for (r, v) in x.column(c).iter().enumerate() {
            out[r * b + c] = *v;
        }
    }
    out
}

/// `Y[i, :] = Σ_j w(D[i][j]) · X[j, :]`, parallel over output rows with a
/// fixed per-row summation order.
fn hop_product<R: HopRows>(rows: &R, weight: fn(u16) -> f64, x: &DMatrix<f64>) -> Vec<f64> {
    let (n, b) = x.shape();
    let xr = rows_of(x);
    let mut out = vec![0.0; n * b];
    out.par_chunks_mut(b.max(1)).enumerate().for_each(|(i, acc)| {
        rows.with_row(i, |row| {
            for (j, &h) in row.iter().enumerate() {
                if h == 0 {
                    continue;
                }
                let w = weight(h);
                for (a, v) in acc.iter_mut().zip(&xr[j * b..(j + 1) * b]) {
                    *a += w * v;
                }
            }
        });
    });
    out
}

fn hop(h: u16) -> f64 {
    f64::from(h)
}

fn hop_squared(h: u16) -> f64 {
    let h = f64::from(h);
    h * h
}

/// The hop-count matrix `D` itself as an operator.
pub struct DistanceOperator<'a, R: HopRows> {
    rows: &'a R,
    frobenius: f64,
}

impl<'a, R: HopRows> DistanceOperator<'a, R> {
    pub fn new(rows: &'a R) -> Self {
        let n = rows.node_count();
        let per_row: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| rows.with_row(i, |r| r.iter().map(|&h| hop_squared(h)).sum()))
            .collect();
        let frobenius = per_row.iter().sum::<f64>().sqrt();
        Self { rows, frobenius }
    }
}

impl<R: HopRows> SymOperator for DistanceOperator<'_, R> {
    fn dim(&self) -> usize {
        self.rows.node_count()
    }

    fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let out = hop_product(self.rows, hop, x);
        DMatrix::from_row_slice(x.nrows(), x.ncols(), &out)
    }

    fn frobenius_norm(&self) -> f64 {
        self.frobenius
    }

    fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            self.rows.with_row(i, |row| {
                for (j, &h) in row.iter().enumerate() {
                    m[(i, j)] = hop(h);
                }
            });
        }
        m
    }
}

/// Implicit double-centered Gram operator `−½·H·(D∘D)·H`.
///
/// With `S = D∘D`, row means `r` and grand mean `t`, each entry is
/// `G[i][j] = −½ (S[i][j] − r[i] − r[j] + t)`.
pub struct CenteredGramOperator<'a, R: HopRows> {
    rows: &'a R,
    row_means: Vec<f64>,
    grand_mean: f64,
    frobenius: f64,
}

impl<'a, R: HopRows> CenteredGramOperator<'a, R> {
    pub fn new(rows: &'a R) -> Self {
        let n = rows.node_count();
        let nf = n as f64;
        let row_means: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| rows.with_row(i, |r| r.iter().map(|&h| hop_squared(h)).sum::<f64>() / nf))
            .collect();
        let grand_mean = row_means.iter().sum::<f64>() / nf;
        let per_row: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| {
                rows.with_row(i, |r| {
                    r.iter()
                        .enumerate()
                        .map(|(j, &h)| {
                            let g = -0.5 * (hop_squared(h) - row_means[i] - row_means[j] + grand_mean);
                            g * g
                        })
                        .sum()
                })
            })
            .collect();
        let frobenius = per_row.iter().sum::<f64>().sqrt();
        Self {
            rows,
            row_means,
            grand_mean,
            frobenius,
        }
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize, hop_count: u16) -> f64 {
        -0.5 * (hop_squared(hop_count) - self.row_means[i] - self.row_means[j] + self.grand_mean)
    }
}

impl<R: HopRows> SymOperator for CenteredGramOperator<'_, R> {
    fn dim(&self) -> usize {
        self.rows.node_count()
    }

    fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let (n, b) = x.shape();
        let sx = hop_product(self.rows, hop_squared, x);
        let mut y = DMatrix::zeros(n, b);
        for c in 0..b {
            let col = x.column(c);
            let total: f64 = col.iter().sum();
            let weighted: f64 = col.iter().zip(&self.row_means).map(|(v, r)| v * r).sum();
            for i in 0..n {
                y[(i, c)] = -0.5
                    * (sx[i * b + c] - self.row_means[i] * total - weighted + self.grand_mean * total);
            }
        }
        y
    }

    fn frobenius_norm(&self) -> f64 {
        self.frobenius
    }

    fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            self.rows.with_row(i, |row| {
                for (j, &h) in row.iter().enumerate() {
                    m[(i, j)] = self.entry(i, j, h);
                }
            });
        }
        m
    }
}

/// Which end of the spectrum counts as "top".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumOrder {
    /// Largest algebraic eigenvalues first.
    Algebraic,
    /// Largest absolute eigenvalues first.
    Magnitude,
}

impl SpectrumOrder {
    fn key(self, v: f64) -> f64 {
        match self {
            SpectrumOrder::Algebraic => v,
            SpectrumOrder::Magnitude => v.abs(),
        }
    }

    /// Indices of `values` sorted by descending key, ties by lower index.
    fn ranking(self, values: &[f64]) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..values.len()).collect();
        idx.sort_by(|&a, &b| {
            self.key(values[b])
                .total_cmp(&self.key(values[a]))
                .then(a.cmp(&b))
        });
        idx
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMethod {
    /// Dense below `dense_limit`, Krylov above.
    Auto,
    Dense,
    Krylov,
}

#[derive(Debug, Clone)]
pub struct EigenOptions {
    pub method: EigenMethod,
    pub dense_limit: usize,
    pub max_iterations: usize,
    /// Residual bound relative to `‖M‖_F`.
    pub rel_tol: f64,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            method: EigenMethod::Auto,
            dense_limit: 1000,
            max_iterations: 10_000,
            rel_tol: 1e-7,
            seed: 0x00B5_E5EE_D000_0001,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    /// `n × k`, orthonormal columns.
    pub vectors: DMatrix<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

/// Flip each column so its largest-magnitude entry (first on ties) is
/// positive.
pub fn normalize_signs(vectors: &mut DMatrix<f64>) {
    for mut col in vectors.column_iter_mut() {
        let mut best = 0.0f64;
        let mut sign = 1.0;
        for &v in col.iter() {
            if v.abs() > best {
                best = v.abs();
                sign = v.signum();
            }
        }
        if sign < 0.0 {
            col.neg_mut();
        }
    }
}

/// Per-column residual norms `‖M·u − λ·u‖₂`.
pub fn residual_norms<M: SymOperator + ?Sized>(m: &M, values: &[f64], vectors: &DMatrix<f64>) -> Vec<f64> {
    let mu = m.apply(vectors);
    values
        .iter()
        .enumerate()
        .map(|(j, &lambda)| (mu.column(j) - vectors.column(j) * lambda).norm())
        .collect()
}

/// The `k` top eigenpairs of `m` under `order`, sorted descending by that
/// order, with columns sign-normalized.
pub fn top_eigenpairs<M: SymOperator + ?Sized>(
    m: &M,
    k: usize,
    order: SpectrumOrder,
    opts: &EigenOptions,
) -> Result<EigenPairs> {
    let n = m.dim();
    if k > n {
        return Err(Error::Invalid(format!("requested {k} eigenpairs of a {n}x{n} matrix")));
    }
    if k == 0 {
        return Ok(EigenPairs {
            values: Vec::new(),
            vectors: DMatrix::zeros(n, 0),
            residuals: Vec::new(),
            iterations: 0,
        });
    }
    let dense = match opts.method {
        EigenMethod::Dense => true,
        EigenMethod::Krylov => false,
        EigenMethod::Auto => n <= opts.dense_limit,
    };
    let mut pairs = if dense || krylov_depth(n, block_size(n, k)) == 0 {
        dense_top(m, k, order)
    } else {
        krylov_top(m, k, order, opts)?
    };
    normalize_signs(&mut pairs.vectors);
    pairs.residuals = residual_norms(m, &pairs.values, &pairs.vectors);
    let bound = opts.rel_tol * m.frobenius_norm().max(f64::MIN_POSITIVE);
    if let Some(pair) = pairs.residuals.iter().position(|&r| !(r <= bound)) {
        return Err(Error::NoConvergence {
            pair,
            iterations: pairs.iterations,
        });
    }
    Ok(pairs)
}

fn dense_top<M: SymOperator + ?Sized>(m: &M, k: usize, order: SpectrumOrder) -> EigenPairs {
    let mut a = m.to_dense();
    // exact symmetry before the dense solver
    let at = a.transpose();
    a = (a + at) * 0.5;
    let eig = SymmetricEigen::new(a);
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let ranking = order.ranking(&values);
    let picked = &ranking[..k];
    let vectors = DMatrix::from_fn(m.dim(), k, |i, j| eig.eigenvectors[(i, picked[j])]);
    EigenPairs {
        values: picked.iter().map(|&i| values[i]).collect(),
        vectors,
        residuals: Vec::new(),
        iterations: 1,
    }
}

fn block_size(n: usize, k: usize) -> usize {
    (k + (k / 2).max(8)).min(n)
}

fn krylov_depth(n: usize, b: usize) -> usize {
    (n / b.max(1)).saturating_sub(1).min(3)
}

fn orthonormalize(w: DMatrix<f64>) -> DMatrix<f64> {
    w.qr().q()
}

fn hstack(blocks: &[DMatrix<f64>]) -> DMatrix<f64> {
    let n = blocks[0].nrows();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(n, cols);
    let mut at = 0;
    for b in blocks {
        out.columns_mut(at, b.ncols()).copy_from(b);
        at += b.ncols();
    }
    out
}

fn krylov_top<M: SymOperator + ?Sized>(
    m: &M,
    k: usize,
    order: SpectrumOrder,
    opts: &EigenOptions,
) -> Result<EigenPairs> {
    let n = m.dim();
    let b = block_size(n, k);
    let depth = krylov_depth(n, b);
    let bound = opts.rel_tol * m.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let start = DMatrix::from_fn(n, b, |_, _| rng.random::<f64>() - 0.5);
    let mut x = orthonormalize(start);
    let mut last_bad = 0;

    for iteration in 1..=opts.max_iterations {
        let mut blocks = vec![x.clone()];
        let mut current = x.clone();
        for _ in 0..depth {
            let mut w = m.apply(&current);
            for _ in 0..2 {
                let basis = hstack(&blocks);
                let proj = basis.transpose() * &w;
                w -= &basis * proj;
            }
            current = orthonormalize(w);
            blocks.push(current.clone());
        }
        let q = hstack(&blocks);
        let mq = m.apply(&q);
        let t = q.transpose() * &mq;
        let t = (&t + t.transpose()) * 0.5;
        let eig = SymmetricEigen::new(t);
        let theta: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let ranking = order.ranking(&theta);

        let y = DMatrix::from_fn(q.ncols(), b, |i, j| eig.eigenvectors[(i, ranking[j])]);
        let ritz = &q * &y;
        let m_ritz = &mq * &y;
        let mut converged = true;
        for j in 0..k {
            let r = (m_ritz.column(j) - ritz.column(j) * theta[ranking[j]]).norm();
            if r > bound * 0.5 {
                converged = false;
                last_bad = j;
                break;
            }
        }
        if converged {
            return Ok(EigenPairs {
                values: ranking[..k].iter().map(|&i| theta[i]).collect(),
                vectors: ritz.columns(0, k).into_owned(),
                residuals: Vec::new(),
                iterations: iteration,
            });
        }
        x = orthonormalize(ritz);
    }
    Err(Error::NoConvergence {
        pair: last_bad,
        iterations: opts.max_iterations,
    })
}
