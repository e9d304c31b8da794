//! Cross-validated RBF-SVM on disease-pair features from one embedding.

use bse_core::graphdist::all_pairs_shortest_paths;
use bse_core::linalg::EigenOptions;
use bse_core::netio::label_pairs;
use bse_core::pairfeat::{assemble_dataset, PairOrientation};
use bse_core::spectral::{build_raw_embedding, MdsExponent, Variant};
use bse_core::svmrbf::{evaluate_split, stratified_kfold, SvmParams};
use bse_core::synthgen::{generate_benchmark, SynthConfig};

fn main() -> bse_core::Result<()> {
    let bench = generate_benchmark(&SynthConfig { n: 300, n_diseases: 30, seed: 2, ..SynthConfig::default() })?;
    let d = all_pairs_shortest_paths(&bench.graph)?;
    let emb = build_raw_embedding(Variant::E6, &d, 5, MdsExponent::Standard, &EigenOptions::default())?;
    let labels = label_pairs(&bench.rr, 1.0);
    let ds = assemble_dataset(&emb, &bench.diseases, &labels, &bench.graph, PairOrientation::FileOrder)?;
    println!("{} pairs, width {}, positive fraction {:.3}", ds.len(), ds.width(), labels.positive_fraction);

    let plan = stratified_kfold(&ds.labels, 5, 17)?;
    let params = SvmParams::default();
    for f in 0..plan.k() {
        let m = evaluate_split(&ds.subset(&plan.train(f)), &ds.subset(plan.test(f)), &params)?;
        println!(
            "fold {f}: precision {:.3} recall {:.3} f1 {:.3} accuracy {:.3} auc {:.3}",
            m.precision, m.recall, m.f1, m.accuracy, m.roc_auc
        );
    }
    Ok(())
}
