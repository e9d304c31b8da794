//! Independent reference implementations shared by the integration and
//! acceptance tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use bse_core::netio::{GeneId, InteractomeGraph};
use nalgebra::DMatrix;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const UNREACHABLE: u32 = u32::MAX;

/// Floyd–Warshall over node indices of `g`.
pub fn floyd_warshall(g: &InteractomeGraph) -> Vec<Vec<u32>> {
    let n = g.node_count();
    let mut d = vec![vec![UNREACHABLE; n]; n];
    for i in 0..n {
        d[i][i] = 0;
        for &j in g.neighbors(i) {
            d[i][j as usize] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if d[i][k] == UNREACHABLE {
                continue;
            }
            for j in 0..n {
                if d[k][j] != UNREACHABLE && d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Connected random graph on `n` nodes: a random spanning tree plus extra
/// edges drawn by `model` (0 uniform, 1 degree-biased, 2 local ring).
pub fn random_connected_graph(n: usize, extra: usize, model: u8, rng: &mut ChaCha8Rng) -> InteractomeGraph {
    let mut edges: Vec<(GeneId, GeneId)> = Vec::new();
    let mut ends: Vec<usize> = vec![0];
    for v in 1..n {
        let u = match model {
            1 => *ends.choose(rng).unwrap(),
            _ => rng.random_range(0..v),
        };
        edges.push((u as GeneId, v as GeneId));
        ends.extend([u, v]);
    }
    for _ in 0..extra {
        let a = rng.random_range(0..n);
        let b = match model {
            0 => rng.random_range(0..n),
            1 => *ends.choose(rng).unwrap(),
            _ => (a + rng.random_range(1..4)) % n,
        };
        if a != b {
            edges.push((a as GeneId + 7, b as GeneId + 7));
            ends.extend([a, b]);
        }
    }
    // the tree edges use the same +7 offset
    let edges = edges
        .into_iter()
        .enumerate()
        .map(|(i, (a, b))| if i < n - 1 { (a + 7, b + 7) } else { (a, b) });
    InteractomeGraph::from_edges(edges).0
}

/// Naive AUC: average over positive/negative pairs, ties worth one half.
pub fn naive_auc(labels: &[u8], scores: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut pairs = 0.0;
    for (i, &li) in labels.iter().enumerate() {
        for (j, &lj) in labels.iter().enumerate() {
            if li == 1 && lj == 0 {
                pairs += 1.0;
                total += if scores[i] > scores[j] {
                    1.0
                } else if scores[i] == scores[j] {
                    0.5
                } else {
                    0.0
                };
            }
        }
    }
    total / pairs
}

fn rbf(x: &[f64], y: &[f64], gamma: f64) -> f64 {
    (-gamma * x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()).exp()
}

pub fn kernel_matrix(x: &[f64], width: usize, gamma: f64) -> DMatrix<f64> {
    let n = x.len() / width;
    DMatrix::from_fn(n, n, |i, j| rbf(&x[i * width..(i + 1) * width], &x[j * width..(j + 1) * width], gamma))
}

/// Euclidean projection onto `{0 ≤ α ≤ c, yᵀα = 0}` by bisection on the
/// multiplier of the equality constraint.
fn project(v: &[f64], y: &[f64], c: f64) -> Vec<f64> {
    let at = |mu: f64| -> (Vec<f64>, f64) {
        let a: Vec<f64> = v.iter().zip(y).map(|(vi, yi)| (vi - mu * yi).clamp(0.0, c)).collect();
        let s = a.iter().zip(y).map(|(ai, yi)| ai * yi).sum();
        (a, s)
    };
    let bound = v.iter().map(|x| x.abs()).fold(0.0, f64::max) + c + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if at(mid).1 > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi)).0
}

/// Dual objective `Σα − ½ αᵀQα` with `Q = yyᵀ ∘ K`.
pub fn dual_objective(k: &DMatrix<f64>, y: &[f64], alpha: &[f64]) -> f64 {
    let n = y.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * k[(i, j)];
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Accelerated projected gradient on the soft-margin dual.
pub fn projected_gradient_dual(k: &DMatrix<f64>, y: &[f64], c: f64, iterations: usize) -> (Vec<f64>, f64) {
    let n = y.len();
    let q = DMatrix::from_fn(n, n, |i, j| y[i] * y[j] * k[(i, j)]);
    let lipschitz = q.symmetric_eigenvalues().max().max(1e-12);
    let step = 1.0 / lipschitz;
    let mut alpha = vec![0.0; n];
    let mut z = alpha.clone();
    let mut t = 1.0f64;
    for _ in 0..iterations {
        let grad: Vec<f64> = (0..n).map(|i| (0..n).map(|j| q[(i, j)] * z[j]).sum::<f64>() - 1.0).collect();
        let v: Vec<f64> = z.iter().zip(&grad).map(|(zi, gi)| zi - step * gi).collect();
        let next = project(&v, y, c);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        z = next
            .iter()
            .zip(&alpha)
            .map(|(a, prev)| a + (t - 1.0) / t_next * (a - prev))
            .collect();
        alpha = next;
        t = t_next;
    }
    let obj = dual_objective(k, y, &alpha);
    (alpha, obj)
}

/// Random subset of `0..n` of size `m`, ascending.
pub fn random_subset(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut set = BTreeSet::new();
    while set.len() < m {
        set.insert(rng.random_range(0..n));
    }
    set.into_iter().collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
