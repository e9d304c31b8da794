//! The three raw embedding families of one graph and their leading values.

use bse_core::graphdist::all_pairs_shortest_paths;
use bse_core::linalg::EigenOptions;
use bse_core::spectral::{build_raw_embedding, MdsExponent, Variant};
use bse_core::synthgen::{generate_benchmark, SynthConfig};

fn main() -> bse_core::Result<()> {
    let bench = generate_benchmark(&SynthConfig { n: 300, seed: 5, ..SynthConfig::default() })?;
    let d = all_pairs_shortest_paths(&bench.graph)?;
    let opts = EigenOptions::default();

    for family in [Variant::E5, Variant::E1, Variant::E3] {
        let emb = build_raw_embedding(family, &d, 8, MdsExponent::Standard, &opts)?;
        let values: Vec<String> = emb.values_used.iter().map(|v| format!("{v:.2}")).collect();
        println!("{:<10} {} x {}  values [{}]", family.family(), emb.nodes(), emb.dims(), values.join(", "));
    }
    Ok(())
}
