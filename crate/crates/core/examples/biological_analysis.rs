//! Top genes of the leading dimensions, their ratio R, and a paired test
//! between two fold-metric series.

use bse_core::bioanalysis::{annotate, compare_methods, ratio_r, top_genes, GeneRanking};
use bse_core::bse::{evaluate_columns, VariantConfig};
use bse_core::graphdist::{all_pairs_shortest_paths, node_degrees};
use bse_core::linalg::EigenOptions;
use bse_core::netio::label_pairs;
use bse_core::pairfeat::{assemble_dataset, PairOrientation};
use bse_core::spectral::{build_raw_embedding, MdsExponent, Variant};
use bse_core::synthgen::{generate_benchmark, AnchorRule, SynthConfig};

fn main() -> bse_core::Result<()> {
    let cfg = SynthConfig { n: 300, n_diseases: 30, anchors: AnchorRule::LowDegree, seed: 6, ..SynthConfig::default() };
    let bench = generate_benchmark(&cfg)?;
    let d = all_pairs_shortest_paths(&bench.graph)?;
    let raw = build_raw_embedding(Variant::E5, &d, 10, MdsExponent::Standard, &EigenOptions::default())?;
    let degrees = node_degrees(&bench.graph);

    let leading: Vec<usize> = raw.source_columns[..3].to_vec();
    let trailing: Vec<usize> = raw.source_columns[raw.dims() - 3..].to_vec();
    for (name, dims) in [("leading", &leading), ("trailing", &trailing)] {
        let table = top_genes(&raw, bench.graph.node_ids(), dims, 10, GeneRanking::Absolute)?;
        let table = annotate(table, &bench.diseases, &degrees, &bench.graph)?;
        println!("{name} dims {dims:?}: R = {:.4}", ratio_r(&table)?);
        if name == "leading" {
            print!("{}", table.to_csv());
        }
    }

    let ds = assemble_dataset(&raw, &bench.diseases, &label_pairs(&bench.rr, 1.0), &bench.graph, PairOrientation::FileOrder)?;
    let svm = VariantConfig::new(Variant::E5, 1).svm;
    let a = evaluate_columns(&ds, &trailing, 5, 1, &svm)?;
    let b = evaluate_columns(&ds, &leading, 5, 1, &svm)?;
    print!("{}", compare_methods(&a, &b, "trailing", "leading")?.to_csv());
    Ok(())
}
