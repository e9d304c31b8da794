//! Generate a planted-signal benchmark and write it as the three input files.
//!
//! ```text
//! cargo run --example synthetic_benchmark -- /tmp/bench
//! ```

use std::path::PathBuf;

use bse_core::synthgen::{generate_benchmark, AnchorRule, EdgeModel, SynthConfig};

fn main() -> bse_core::Result<()> {
    let out = std::env::args().nth(1).map_or_else(|| PathBuf::from("synthetic-benchmark"), PathBuf::from);
    let cfg = SynthConfig {
        n: 400,
        model: EdgeModel::PreferentialAttachment { m: 2 },
        n_diseases: 30,
        anchors: AnchorRule::LowDegree,
        seed: 11,
        ..SynthConfig::default()
    };
    let bench = generate_benchmark(&cfg)?;
    bench.write_tsv(&out)?;

    let positives = bench.rr.rows.iter().filter(|r| r.rr > 1.0).count();
    println!("{} nodes, {} edges", bench.graph.node_count(), bench.graph.edge_count());
    println!("{} diseases, {} pairs, {positives} with rr > 1", bench.diseases.len(), bench.rr.rows.len());
    println!("thresholds in hops: tau = {:.3}, tau_zero = {:.3}", bench.tau.0, bench.tau.1);
    println!("written to {}", out.display());
    Ok(())
}
