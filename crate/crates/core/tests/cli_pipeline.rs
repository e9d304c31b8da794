use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;

use bse_core::cli::{self, RunConfig};
use bse_core::graphdist::read_cache;
use bse_core::spectral::Variant;
use bse_core::synthgen::SynthConfig;

fn fixture(dir: &Path) -> RunConfig {
    let data = dir.join("data");
    let synth = SynthConfig { n: 90, n_diseases: 12, genes_min: 3, genes_max: 6, seed: 4, ..SynthConfig::default() };
    cli::cmd_synth(&synth, &data).unwrap();
    // a detached component the LCC must drop
    let mut f = fs::OpenOptions::new().append(true).open(data.join("interactome.tsv")).unwrap();
    writeln!(f, "900001\t900002\n900002\t900003").unwrap();
    RunConfig {
        interactome: data.join("interactome.tsv"),
        disease_genes: data.join("disease_genes.tsv"),
        rr: data.join("rr.tsv"),
        d: 2,
        k: 4,
        inner_folds: 3,
        outer_folds: 3,
        top_genes: 5,
        first_dims: 2,
        output_dir: dir.join("out"),
        workers: 1,
        ..RunConfig::default()
    }
}

fn files_named(dir: &Path, pred: &dyn Fn(&str) -> bool, out: &mut Vec<PathBuf>) {
    for entry in fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.is_dir() {
            files_named(&p, pred, out);
        } else if pred(p.file_name().unwrap().to_str().unwrap()) {
            out.push(p);
        }
    }
}

fn data_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(String::from)
        .collect()
}

#[test]
fn prepare_is_idempotent_and_repairs_a_corrupt_cache() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = fixture(tmp.path());
    let first = cli::cmd_prepare(&cfg).unwrap();
    assert!(!first.reused_cache);
    assert!(first.graph.index_of(900001).is_none());
    assert_eq!(first.distances.len(), first.graph.node_count());

    let second = cli::cmd_prepare(&cfg).unwrap();
    assert!(second.reused_cache);
    assert_eq!(second.distances, first.distances);
    let cached = read_cache(&second.cache_path).unwrap();
    assert_eq!(cached.len(), first.graph.node_count());
    let nodes = data_lines(&cfg.cache_dir().join("nodes.tsv"));
    assert_eq!(nodes.len(), first.graph.node_count());

    let mut bytes = fs::read(&first.cache_path).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0xff;
    fs::write(&first.cache_path, &bytes).unwrap();
    assert!(read_cache(&first.cache_path).is_err());
    let third = cli::cmd_prepare(&cfg).unwrap();
    assert!(!third.reused_cache);
    assert_eq!(third.distances, first.distances);
    assert!(read_cache(&first.cache_path).is_ok());
}

#[test]
fn rank_only_runs_write_no_selections() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = fixture(tmp.path());
    cfg.variants = vec![Variant::E2, Variant::E4, Variant::E6];
    cfg.thresholds = vec![1.0];
    let outcome = cli::cmd_run(&cfg).unwrap();
    assert!(outcome.failed.is_empty(), "{:?}", outcome.failed);

    let mut selections = Vec::new();
    files_named(&cfg.output_dir, &|n| n.starts_with("selection"), &mut selections);
    assert!(selections.is_empty(), "{selections:?}");
    let summary = data_lines(&cfg.output_dir.join("rr1/summary.csv"));
    assert_eq!(summary.iter().filter(|l| l.contains(",mean,")).count(), 3);
    let ratio = data_lines(&cfg.output_dir.join("ratio.csv"));
    assert_eq!(ratio.len(), 4);
    assert!(ratio[1..].iter().all(|l| l.split(',').nth(2) == Some("NA")));
}

#[test]
fn full_grid_writes_every_table_and_analyze_reproduces_it() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = fixture(tmp.path());
    let outcome = cli::cmd_run(&cfg).unwrap();
    assert!(outcome.failed.is_empty(), "{:?}", outcome.failed);

    let mut folds = Vec::new();
    files_named(&cfg.output_dir, &|n| n == "folds.csv", &mut folds);
    assert_eq!(folds.len(), 12);
    for f in &folds {
        let rows = cli::read_folds_csv(f).unwrap();
        assert_eq!(rows.len(), cfg.outer_folds);
        assert!(rows.iter().all(|m| m.values().iter().all(|v| (0.0..=1.0).contains(v))));
    }
    for t in ["rr0", "rr1"] {
        let dir = cfg.output_dir.join(t);
        let summary = data_lines(&dir.join("summary.csv"));
        assert_eq!(summary.len(), 1 + 12);
        let mut compares = Vec::new();
        files_named(&dir, &|n| n.starts_with("compare_"), &mut compares);
        assert_eq!(compares.len(), 3);
        for v in [Variant::E1, Variant::E3, Variant::E5] {
            let sels = cli::read_selections(&dir.join(v.to_string()), cfg.outer_folds).unwrap();
            assert_eq!(sels.len(), cfg.outer_folds);
            assert!(sels.iter().all(|s| s.selected.len() == cfg.d));
        }
    }

    let mut tops = Vec::new();
    files_named(&cfg.output_dir, &|n| n == "top_genes.csv", &mut tops);
    assert_eq!(tops.len(), 12);
    let before: Vec<Vec<u8>> = tops.iter().map(|p| fs::read(p).unwrap()).collect();
    let ratio_before = fs::read(cfg.output_dir.join("ratio.csv")).unwrap();
    let again = cli::cmd_analyze(&cfg).unwrap();
    assert!(again.failed.is_empty(), "{:?}", again.failed);
    let after: Vec<Vec<u8>> = tops.iter().map(|p| fs::read(p).unwrap()).collect();
    assert_eq!(before, after);
    assert_eq!(ratio_before, fs::read(cfg.output_dir.join("ratio.csv")).unwrap());
}

#[test]
fn every_text_artifact_carries_the_provenance_header() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = fixture(tmp.path());
    cfg.variants = vec![Variant::E5, Variant::E6];
    cfg.thresholds = vec![0.0];
    cli::cmd_run(&cfg).unwrap();
    let mut csvs = Vec::new();
    files_named(&cfg.output_dir, &|n| n.ends_with(".csv") || n.ends_with(".txt"), &mut csvs);
    assert!(!csvs.is_empty());
    for p in csvs {
        let text = fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("# bse-core"), "{}", p.display());
        assert!(text.contains("seed"), "{}", p.display());
    }
}

fn bse() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bse"));
    c.env("RUST_LOG", "error");
    c
}

fn common_args(cfg: &RunConfig) -> Vec<String> {
    [
        ("interactome", cfg.interactome.display().to_string()),
        ("disease_genes", cfg.disease_genes.display().to_string()),
        ("rr", cfg.rr.display().to_string()),
        ("d", "2".into()),
        ("k", "4".into()),
        ("inner_folds", "3".into()),
        ("outer_folds", "3".into()),
        ("variants", "E5,E6".into()),
        ("first_dims", "2".into()),
    ]
    .into_iter()
    .flat_map(|(k, v)| ["--set".to_string(), format!("{k}={v}")])
    .collect()
}

#[test]
fn binary_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = fixture(tmp.path());
    let out = tmp.path().join("bin-out");

    let status = bse().args(["--config", "/nonexistent/run.conf", "run"]).status().unwrap();
    assert_eq!(status.code(), Some(cli::EXIT_CONFIG));
    let status = bse().args(["--set", "d=abc", "run"]).status().unwrap();
    assert_eq!(status.code(), Some(cli::EXIT_CONFIG));
    let status = bse()
        .args(["--set", "interactome=/nonexistent.tsv", "--set", "disease_genes=/x", "--set", "rr=/y", "prepare"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(cli::EXIT_CONFIG));

    let ok = bse()
        .args(common_args(&cfg))
        .args(["--set", "thresholds=1", "--output-dir"])
        .arg(&out)
        .arg("evaluate")
        .status()
        .unwrap();
    assert_eq!(ok.code(), Some(cli::EXIT_OK));
    assert!(out.join("rr1/E5/folds.csv").exists());

    // no pair clears this threshold, so its cells cannot be stratified
    let partial = bse()
        .args(common_args(&cfg))
        .args(["--set", "thresholds=1,1000000", "--output-dir"])
        .arg(tmp.path().join("partial"))
        .arg("evaluate")
        .status()
        .unwrap();
    assert_eq!(partial.code(), Some(cli::EXIT_PARTIAL));
    assert!(tmp.path().join("partial/rr1/E5/folds.csv").exists());
}

#[test]
fn binary_synth_and_select() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("bench");
    let status = bse()
        .args(["--set", "n=80", "--set", "diseases=10", "--set", "genes_max=6", "--seed", "3", "synth", "--out"])
        .arg(&data)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(cli::EXIT_OK));
    for f in ["interactome.tsv", "disease_genes.tsv", "rr.tsv"] {
        assert!(data.join(f).exists(), "{f}");
    }
    let cfg = RunConfig {
        interactome: data.join("interactome.tsv"),
        disease_genes: data.join("disease_genes.tsv"),
        rr: data.join("rr.tsv"),
        ..RunConfig::default()
    };
    let out = tmp.path().join("sel");
    let status = bse()
        .args(common_args(&cfg))
        .args(["--set", "thresholds=1", "--output-dir"])
        .arg(&out)
        .arg("select")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(cli::EXIT_OK));
    let sel = bse_core::bse::SelectionResult::read(&out.join("rr1/E5/selection_full.txt")).unwrap();
    assert_eq!(sel.selected.len(), 2);
    assert_eq!(sel.trace.len(), 2);
}
