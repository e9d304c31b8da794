//! The whole grid through the command layer: synthesize inputs, then
//! prepare, evaluate and analyze into a report directory.
//!
//! ```text
//! cargo run --release --example full_pipeline -- /tmp/bse-report
//! ```

use std::path::PathBuf;

use bse_core::cli::{self, RunConfig};
use bse_core::synthgen::SynthConfig;

fn main() -> bse_core::Result<()> {
    let root = std::env::args().nth(1).map_or_else(|| PathBuf::from("bse-report"), PathBuf::from);
    let data = root.join("inputs");
    cli::cmd_synth(&SynthConfig { n: 150, n_diseases: 16, seed: 9, ..SynthConfig::default() }, &data)?;

    let mut cfg = RunConfig {
        interactome: data.join("interactome.tsv"),
        disease_genes: data.join("disease_genes.tsv"),
        rr: data.join("rr.tsv"),
        output_dir: root.join("report"),
        ..RunConfig::default()
    };
    for (k, v) in [("d", "3"), ("k", "8"), ("inner_folds", "3"), ("outer_folds", "5"), ("top_genes", "10"), ("first_dims", "3")] {
        cfg.set(k, v)?;
    }
    cfg.validate()?;

    let outcome = cli::with_workers(cfg.workers, || cli::cmd_run(&cfg))??;
    println!("{} cells completed, {} failed", outcome.completed.len(), outcome.failed.len());
    for t in &cfg.thresholds {
        let summary = cfg.output_dir.join(cli::threshold_dir(*t)).join("summary.csv");
        println!("--- {}", summary.display());
        print!("{}", std::fs::read_to_string(&summary).unwrap_or_default());
    }
    print!("{}", std::fs::read_to_string(cfg.output_dir.join("ratio.csv")).unwrap_or_default());
    std::process::exit(outcome.exit_code());
}
