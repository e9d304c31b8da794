//! Acceptance suite. Prints one line per criterion and exits non-zero when
//! any of them fails.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use bse_core::bioanalysis::{annotate, first_dims_by_frequency, ratio_r, top_genes, GeneRanking};
use bse_core::bse::{bse_select, evaluate_variant, VariantConfig};
use bse_core::cli::{self, RunConfig};
use bse_core::graphdist::{all_pairs_shortest_paths, node_degrees, DistanceMatrix};
use bse_core::linalg::{residual_norms, EigenMethod, EigenOptions};
use bse_core::netio::{label_pairs, largest_connected_component, load_edge_list};
use bse_core::pairfeat::{assemble_dataset, PairOrientation};
use bse_core::seed;
use bse_core::spectral::{
    build_raw_embedding, eig_sym_topk, embed_centered, embed_scaled, gram_center_dense, svd_sym_topk,
    MdsExponent, Variant,
};
use bse_core::svmrbf::{
    compute_metrics, cross_val_mean_auc, predict_labels, roc_auc, roc_auc_trapezoid, solve_dual, svm_fit,
    svm_decision, to_signed, SvmParams,
};
use bse_core::synthgen::{generate_benchmark, AnchorRule, Benchmark, SynthConfig};
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;

use common::{floyd_warshall, kernel_matrix, projected_gradient_dual, random_connected_graph, random_subset, rng};

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn ac1_apsp() -> Outcome {
    let start = Instant::now();
    let mut r = rng(101);
    let mut mismatches = 0;
    for i in 0..20 {
        let n = r.random_range(20..=200);
        let extra = r.random_range(0..2 * n);
        let g = random_connected_graph(n, extra, (i % 3) as u8, &mut r);
        let d = all_pairs_shortest_paths(&g).expect("apsp");
        let fw = floyd_warshall(&g);
        for (a, row) in fw.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                if u32::from(d.get(a, b)) != v {
                    mismatches += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(mismatches == 0 && secs < 10.0, format!("20 graphs, {mismatches} mismatched entries, {secs:.2} s"))
}

fn ac2_mds() -> Outcome {
    let mut r = rng(202);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let n = r.random_range(8..=50);
        let dim = r.random_range(1..=3);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| r.random_range(-5.0..5.0)).collect()).collect();
        let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
        let d = DMatrix::from_fn(n, n, |i, j| dist(&pts[i], &pts[j]));
        let g = gram_center_dense(&d).expect("gram");
        let opts = EigenOptions { method: EigenMethod::Dense, ..EigenOptions::default() };
        let basis = eig_sym_topk(&g, dim, &opts).expect("eigen");
        let z = embed_centered(&basis, dim, MdsExponent::Standard).expect("embed");
        for i in 0..n {
            for j in (i + 1)..n {
                let zi: Vec<f64> = z.coords.row(i).iter().copied().collect();
                let zj: Vec<f64> = z.coords.row(j).iter().copied().collect();
                worst = worst.max(rel_err(dist(&zi, &zj), d[(i, j)]));
            }
        }
    }
    verdict(worst <= 1e-6, format!("10 point sets, max relative distance error {worst:.2e}"))
}

fn random_symmetric(n: usize, r: &mut rand_chacha::ChaCha8Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| r.random_range(-1.0..1.0));
    (&a + a.transpose()) * 0.5
}

fn ac3_spectral() -> Outcome {
    let mut r = rng(303);
    let mut eig_worst = 0.0f64;
    let mut svd_worst = 0.0f64;
    let mut zz_worst = 0.0f64;
    for case in 0..12 {
        let n = r.random_range(8..=64);
        let m = random_symmetric(n, &mut r);
        let norm = m.norm();
        for method in [EigenMethod::Dense, EigenMethod::Krylov] {
            let opts = EigenOptions { method, seed: case, ..EigenOptions::default() };
            let k = (n / 4).max(1);
            let basis = eig_sym_topk(&m, k, &opts).expect("eigen");
            for res in residual_norms(&m, &basis.values, &basis.vectors) {
                eig_worst = eig_worst.max(res / norm);
            }
            let svd = svd_sym_topk(&m, k, &opts).expect("svd");
            let mm = &m * &m;
            for (j, s) in svd.values.iter().enumerate() {
                let u = svd.vectors.column(j);
                let lhs = &mm * u;
                let rhs = u * (s * s);
                svd_worst = svd_worst.max((lhs - &rhs).norm() / rhs.norm().max(1e-300));
            }
        }
        let opts = EigenOptions { method: EigenMethod::Dense, ..EigenOptions::default() };
        let full = svd_sym_topk(&m, n, &opts).expect("svd");
        let z = embed_scaled(&full, n).expect("scaled");
        let zz = &z.coords * z.coords.transpose();
        let mm = &m * &m;
        zz_worst = zz_worst.max((zz - &mm).norm() / mm.norm());
    }
    verdict(
        eig_worst <= 1e-7 && svd_worst <= 1e-6 && zz_worst <= 1e-6,
        format!("residual/|M|_F {eig_worst:.2e}, D·D·u vs σ²u {svd_worst:.2e}, Z·Zᵀ vs D² {zz_worst:.2e}"),
    )
}

/// Maximal violating pair gap `m(α) − M(α)` from a freshly computed gradient.
fn kkt_gap(k: &DMatrix<f64>, y: &[f64], alpha: &[f64], c: f64) -> f64 {
    let n = y.len();
    let grad: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| y[i] * y[j] * k[(i, j)] * alpha[j]).sum::<f64>() - 1.0)
        .collect();
    let mut up = f64::NEG_INFINITY;
    let mut low = f64::INFINITY;
    for i in 0..n {
        let v = -y[i] * grad[i];
        let in_up = (y[i] > 0.0 && alpha[i] < c) || (y[i] < 0.0 && alpha[i] > 0.0);
        let in_low = (y[i] > 0.0 && alpha[i] > 0.0) || (y[i] < 0.0 && alpha[i] < c);
        if in_up {
            up = up.max(v);
        }
        if in_low {
            low = low.min(v);
        }
    }
    (up - low).max(0.0)
}

fn ac4_svm() -> Outcome {
    let mut r = rng(404);
    let tol = 1e-3;
    let mut obj_worst = 0.0f64;
    let mut kkt_worst = 0.0f64;
    for _ in 0..50 {
        let n = r.random_range(4..=10);
        let width = r.random_range(1..=3);
        let x: Vec<f64> = (0..n * width).map(|_| r.random_range(-2.0..2.0)).collect();
        let mut labels: Vec<u8> = (0..n).map(|i| u8::from(i % 2 == 0)).collect();
        labels.shuffle(&mut r);
        let y = to_signed(&labels);
        let c = r.random_range(0.1..10.0);
        let gamma = r.random_range(0.1..2.0);
        let sol = solve_dual(&x, width, &y, c, gamma, tol, 1_000_000, 1000).expect("smo");
        let k = kernel_matrix(&x, width, gamma);
        let (_, oracle) = projected_gradient_dual(&k, &y, c, 20_000);
        obj_worst = obj_worst.max((sol.objective() - oracle).abs());
        kkt_worst = kkt_worst.max(kkt_gap(&k, &y, &sol.alpha, c));
    }
    let xor = [0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0, 0.0];
    let y = [-1.0, -1.0, 1.0, 1.0];
    let params = SvmParams::default();
    let model = svm_fit(&xor, 2, &y, &params).expect("xor fit");
    let pred = predict_labels(&svm_decision(&model, &xor).expect("decision"));
    let acc = pred.iter().zip([0u8, 0, 1, 1]).filter(|(p, t)| **p == *t).count() as f64 / 4.0;
    verdict(
        obj_worst <= 1e-4 && kkt_worst <= tol && acc == 1.0,
        format!("50 instances, objective gap {obj_worst:.2e}, KKT gap {kkt_worst:.2e} (tol {tol}), XOR accuracy {acc}"),
    )
}

fn ac5_metrics() -> Outcome {
    let mut r = rng(505);
    let mut worst = 0.0f64;
    let mut naive_worst = 0.0f64;
    for _ in 0..100 {
        let n = r.random_range(2..=60);
        let mut labels: Vec<u8> = (0..n).map(|_| u8::from(r.random_bool(0.5))).collect();
        labels[0] = 1;
        labels[1] = 0;
        let levels = r.random_range(2..=8);
        let scores: Vec<f64> = (0..n).map(|_| f64::from(r.random_range(0..levels)) / 3.0).collect();
        let a = roc_auc(&labels, &scores).expect("auc");
        let b = roc_auc_trapezoid(&labels, &scores).expect("trapezoid");
        worst = worst.max((a - b).abs());
        naive_worst = naive_worst.max((a - common::naive_auc(&labels, &scores)).abs());
    }
    let pos = 826;
    let labels: Vec<u8> = (0..1000).map(|i| u8::from(i < pos)).collect();
    let preds = vec![1u8; 1000];
    let scores = vec![0.25; 1000];
    let m = compute_metrics(&labels, &preds, &scores).expect("metrics");
    let identity = (m.precision - 0.826).abs() < 1e-12 && m.recall == 1.0 && m.roc_auc == 0.5;
    verdict(
        worst <= 1e-12 && naive_worst <= 1e-12 && identity,
        format!(
            "100 sets, pair vs trapezoid {worst:.1e}, vs naive {naive_worst:.1e}; all-positive precision {:.4} recall {:.4} auc {:.4}",
            m.precision, m.recall, m.roc_auc
        ),
    )
}

fn ac6_commutation() -> Outcome {
    let mut r = rng(606);
    let mut cases = 0;
    let mut failures = 0;
    for s in 0..5u64 {
        let cfg = SynthConfig { n: 90, n_diseases: 10, genes_min: 3, genes_max: 6, seed: 60 + s, ..SynthConfig::default() };
        let b = generate_benchmark(&cfg).expect("benchmark");
        let d = all_pairs_shortest_paths(&b.graph).expect("apsp");
        let lp = label_pairs(&b.rr, 1.0);
        for v in [Variant::E1, Variant::E3, Variant::E5, Variant::E2] {
            let raw = build_raw_embedding(v, &d, 12, MdsExponent::Standard, &EigenOptions::default()).expect("embedding");
            let full = assemble_dataset(&raw, &b.diseases, &lp, &b.graph, PairOrientation::FileOrder).expect("dataset");
            for _ in 0..5 {
                let m = r.random_range(1..=raw.dims());
                let positions = random_subset(raw.dims(), m, &mut r);
                let sources: Vec<usize> = positions.iter().map(|&p| raw.source_columns[p]).collect();
                let mut shuffled = sources.clone();
                shuffled.shuffle(&mut r);
                let restricted = raw.select_columns(&sources, v).expect("restrict");
                let lhs = assemble_dataset(&restricted, &b.diseases, &lp, &b.graph, PairOrientation::FileOrder).expect("dataset");
                let rhs = full.select_coordinates(&shuffled).expect("select");
                cases += 1;
                if lhs != rhs {
                    failures += 1;
                }
            }
        }
    }
    verdict(failures == 0 && cases == 100, format!("{cases} cases, {failures} unequal"))
}

struct Planted {
    bench: Benchmark,
    distances: DistanceMatrix,
}

fn planted(s: u64) -> Planted {
    let cfg = SynthConfig { seed: s, epsilon: 0.1, anchors: AnchorRule::LowDegree, ..SynthConfig::default() };
    let bench = generate_benchmark(&cfg).expect("benchmark");
    let distances = all_pairs_shortest_paths(&bench.graph).expect("apsp");
    Planted { bench, distances }
}

fn ac7_recovery(sets: &[Planted]) -> Outcome {
    let start = Instant::now();
    let mut picks_ok = 0;
    let mut margins = Vec::new();
    let mut lines = Vec::new();
    for (i, p) in sets.iter().enumerate() {
        let s = i as u64 + 1;
        let raw = build_raw_embedding(Variant::E1, &p.distances, 10, MdsExponent::Standard, &EigenOptions::default())
            .expect("embedding");
        let lp = label_pairs(&p.bench.rr, 1.0);
        let ds = assemble_dataset(&raw, &p.bench.diseases, &lp, &p.bench.graph, PairOrientation::FileOrder)
            .expect("dataset");
        let mut vc = VariantConfig::new(Variant::E1, 7 + s);
        vc.k = 10;
        vc.d = 1;
        let pick = bse_select(&ds, &vc).expect("select").selected[0];
        let inner = seed::derive(vc.seed, "inner-folds", &[]);
        let solo: Vec<f64> = raw
            .source_columns
            .iter()
            .map(|&c| cross_val_mean_auc(&ds, &[c], vc.inner_folds, inner, &vc.svm).expect("cv"))
            .collect();
        let best = solo.iter().copied().fold(f64::MIN, f64::max);
        let picked = solo[raw.position_of(pick).expect("column")];
        if best - picked <= 0.01 {
            picks_ok += 1;
        }
        vc.d = 5;
        let sel = evaluate_variant(&vc, &ds, &raw).expect("select variant");
        let rank = evaluate_variant(&VariantConfig { variant: Variant::E2, ..vc.clone() }, &ds, &raw).expect("rank variant");
        let margin = sel.mean.roc_auc - rank.mean.roc_auc;
        margins.push(margin);
        lines.push(format!("s{s}: gap {:.3}, margin {margin:+.3}", best - picked));
    }
    let secs = start.elapsed().as_secs_f64();
    let wins = margins.iter().filter(|&&m| m >= 0.05).count();
    verdict(
        picks_ok == sets.len() && wins >= 4 && secs < 300.0,
        format!("{}; d=1 picks {picks_ok}/{}, margin>=0.05 in {wins}/{}, {secs:.0} s", lines.join("; "), sets.len(), sets.len()),
    )
}

fn ac8_ratio(sets: &[Planted]) -> Outcome {
    let mut wins = 0;
    let mut lines = Vec::new();
    for (i, p) in sets.iter().enumerate() {
        let s = i as u64 + 1;
        let raw = build_raw_embedding(Variant::E5, &p.distances, 20, MdsExponent::Standard, &EigenOptions::default())
            .expect("embedding");
        let lp = label_pairs(&p.bench.rr, 1.0);
        let ds = assemble_dataset(&raw, &p.bench.diseases, &lp, &p.bench.graph, PairOrientation::FileOrder)
            .expect("dataset");
        let mut vc = VariantConfig::new(Variant::E5, 7 + s);
        vc.k = 20;
        vc.d = 5;
        let sel = evaluate_variant(&vc, &ds, &raw).expect("select variant");
        let rank = evaluate_variant(&VariantConfig { variant: Variant::E6, ..vc.clone() }, &ds, &raw).expect("rank variant");
        let degrees = node_degrees(&p.bench.graph);
        let ratio = |dims: &[usize]| {
            let t = top_genes(&raw, p.bench.graph.node_ids(), dims, 20, GeneRanking::Absolute).expect("top genes");
            ratio_r(&annotate(t, &p.bench.diseases, &degrees, &p.bench.graph).expect("annotate")).expect("ratio")
        };
        let r_sel = ratio(&first_dims_by_frequency(&sel.selections, 5));
        let r_rank = ratio(&rank.columns[0]);
        if r_sel >= r_rank {
            wins += 1;
        }
        lines.push(format!("s{s}: {r_sel:.4} vs {r_rank:.4}"));
    }
    verdict(wins >= 4, format!("{}; select >= rank in {wins}/{}", lines.join("; "), sets.len()))
}

fn collect_files(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
    for entry in fs::read_dir(dir).expect("read dir") {
        let path = entry.expect("entry").path();
        if path.is_dir() {
            collect_files(root, &path, out);
        } else {
            let rel = path.strip_prefix(root).expect("prefix").to_path_buf();
            out.insert(rel, fs::read(&path).expect("read"));
        }
    }
}

fn ac9_determinism() -> Outcome {
    let tmp = tempfile::tempdir().expect("tempdir");
    let data = tmp.path().join("data");
    let synth = SynthConfig { n: 120, n_diseases: 14, genes_min: 3, genes_max: 6, seed: 9, ..SynthConfig::default() };
    cli::cmd_synth(&synth, &data).expect("synth");
    let mut bundles = Vec::new();
    for workers in [1usize, 2, 4] {
        let cfg = RunConfig {
            interactome: data.join("interactome.tsv"),
            disease_genes: data.join("disease_genes.tsv"),
            rr: data.join("rr.tsv"),
            d: 3,
            k: 6,
            seed: 5,
            inner_folds: 3,
            outer_folds: 3,
            top_genes: 5,
            first_dims: 2,
            output_dir: tmp.path().join(format!("out{workers}")),
            workers,
            ..RunConfig::default()
        };
        let outcome = match cli::with_workers(workers, || cli::cmd_run(&cfg)) {
            Ok(Ok(o)) => o,
            other => return Outcome::Fail(format!("run failed at {workers} workers: {:?}", other.err())),
        };
        if !outcome.failed.is_empty() {
            return Outcome::Fail(format!("{} failed cells at {workers} workers", outcome.failed.len()));
        }
        let mut files = BTreeMap::new();
        collect_files(&cfg.output_dir, &cfg.output_dir, &mut files);
        bundles.push(files);
    }
    let same = bundles.windows(2).all(|w| w[0] == w[1]);
    verdict(same, format!("{} files per bundle, identical at 1/2/4 workers: {same}", bundles[0].len()))
}

/// `(variant, statistic) -> metrics` from a summary table.
fn read_summary(path: &Path) -> BTreeMap<String, [f64; 5]> {
    let text = fs::read_to_string(path).unwrap_or_default();
    let mut out = BTreeMap::new();
    for line in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() == 8 && f[2] == "mean" {
            let v: Vec<f64> = f[3..].iter().map(|s| s.parse().unwrap_or(f64::NAN)).collect();
            out.insert(f[1].to_string(), [v[0], v[1], v[2], v[3], v[4]]);
        }
    }
    out
}

fn ac10_full(dir: &Path) -> Outcome {
    const LABELS: [&str; 6] = ["iso_r", "iso_s", "emb_r", "emb_s", "vect_r", "vect_s"];
    const RR0: [[f64; 5]; 6] = [
        [0.8644, 0.9846, 0.9206, 0.8596, 0.6255],
        [0.9046, 0.9717, 0.9369, 0.8919, 0.7424],
        [0.8260, 1.0000, 0.9047, 0.8260, 0.5000],
        [0.9074, 0.9742, 0.9396, 0.8966, 0.7511],
        [0.8352, 0.9977, 0.9093, 0.8355, 0.5315],
        [0.9075, 0.9743, 0.9397, 0.8967, 0.7512],
    ];
    const RR1: [[f64; 5]; 6] = [
        [0.6975, 0.8250, 0.7558, 0.6889, 0.6616],
        [0.7262, 0.8102, 0.7658, 0.7109, 0.6910],
        [0.5859, 0.9900, 0.7361, 0.5859, 0.5048],
        [0.7335, 0.8102, 0.7698, 0.7173, 0.6987],
        [0.6456, 0.8649, 0.7393, 0.6440, 0.5997],
        [0.7370, 0.8057, 0.7697, 0.7187, 0.7013],
    ];
    let out = std::env::var_os("BSE_OUTPUT_DIR").map_or_else(|| dir.join("bse-acceptance"), PathBuf::from);
    let cfg = RunConfig {
        interactome: dir.join("interactome.tsv"),
        disease_genes: dir.join("disease_genes.tsv"),
        rr: dir.join("rr.tsv"),
        output_dir: out.clone(),
        ..RunConfig::default()
    };
    let mut problems = Vec::new();
    let (graph, _) = match load_edge_list(&cfg.interactome) {
        Ok(g) => g,
        Err(e) => return Outcome::Fail(format!("cannot load interactome: {e}")),
    };
    let (lcc, _) = largest_connected_component(&graph);
    if lcc.node_count() != 13_329 {
        problems.push(format!("LCC {}", lcc.node_count()));
    }
    let ctx = match cli::Context::load(&cfg) {
        Ok(c) => c,
        Err(e) => return Outcome::Fail(format!("cannot load dataset: {e}")),
    };
    for (t, want) in [(0.0, 0.826), (1.0, 0.584)] {
        let frac = label_pairs(&ctx.rr, t).positive_fraction;
        if (frac - want).abs() > 0.001 {
            problems.push(format!("RR{t} fraction {frac:.4}"));
        }
    }
    if !out.join("rr1").join("summary.csv").exists() {
        if let Err(e) = cli::cmd_run(&cfg) {
            return Outcome::Fail(format!("run failed: {e}"));
        }
    }
    for (t, table) in [("rr0", RR0), ("rr1", RR1)] {
        let got = read_summary(&out.join(t).join("summary.csv"));
        for (label, want) in LABELS.iter().zip(table) {
            let Some(have) = got.get(*label) else {
                problems.push(format!("{t} {label} missing"));
                continue;
            };
            for (h, w) in have.iter().zip(want) {
                if (h - w).abs() > 0.03 {
                    problems.push(format!("{t} {label} {h:.4} vs {w:.4}"));
                }
            }
        }
        if t == "rr0" {
            if let Some(emb_r) = got.get("emb_r") {
                if emb_r[1] != 1.0 || emb_r[4] != 0.5 {
                    problems.push(format!("emb_r recall {} auc {}", emb_r[1], emb_r[4]));
                }
            }
        }
    }
    let ratios = fs::read_to_string(out.join("ratio.csv")).unwrap_or_default();
    let mut cells = 0;
    for line in ratios.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() == 4 {
            match (f[2].parse::<f64>(), f[3].parse::<f64>()) {
                (Ok(s), Ok(r)) if s > r => cells += 1,
                _ => problems.push(format!("ratio {} {} not select > rank", f[0], f[1])),
            }
        }
    }
    if cells != 6 {
        problems.push(format!("{cells}/6 ratio cells ordered"));
    }
    verdict(problems.is_empty(), if problems.is_empty() { "all checks hold".into() } else { problems.join("; ") })
}

fn main() -> ExitCode {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let mut results: Vec<(&str, &str, Outcome)> = Vec::new();
    let mut run = |id: &'static str, name: &'static str, f: &dyn Fn() -> Outcome| {
        let outcome = f();
        let (tag, detail) = match &outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => ("FAIL", d),
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("[{tag}] {id} {name}: {detail}");
        results.push((id, name, outcome));
    };
    run("AC1", "shortest paths match Floyd–Warshall", &ac1_apsp);
    run("AC2", "MDS recovers Euclidean distances", &ac2_mds);
    run("AC3", "spectral identities", &ac3_spectral);
    run("AC4", "SMO matches the dual oracle", &ac4_svm);
    run("AC5", "metric oracles", &ac5_metrics);
    run("AC6", "column restriction commutes with feature assembly", &ac6_commutation);
    let sets: Vec<Planted> = (1..=5).map(planted).collect();
    run("AC7", "planted-signal recovery", &|| ac7_recovery(&sets));
    run("AC8", "ratio direction on low-degree modules", &|| ac8_ratio(&sets));
    run("AC9", "bundles identical across worker counts", &ac9_determinism);
    run("AC10", "full-dataset reproduction", &|| match std::env::var_os("BSE_DATA_DIR") {
        Some(dir) => ac10_full(Path::new(&dir)),
        None => Outcome::Skip("BSE_DATA_DIR not set".into()),
    });
    let failed = results.iter().filter(|(_, _, o)| matches!(o, Outcome::Fail(_))).count();
    println!("{} criteria, {failed} failed", results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
