//! Supervised selection of spectral graph-embedding dimensions for
//! disease-pair comorbidity prediction.
//!
//! The pipeline runs in stages, one module each:
//!
//! - [`netio`]: interactome, disease–gene and relative-risk loaders, the
//!   largest connected component, and RR-threshold labels.
//! - [`graphdist`]: all-pairs hop distances, degrees, the `BSED` cache.
//! - [`spectral`]: centered (Isomap) and uncentered (SVD) raw embeddings.
//! - [`pairfeat`]: per-disease column sums and concatenated pair features.
//! - [`svmrbf`]: RBF soft-margin SVM, stratified folds, metrics.
//! - [`bse`]: greedy cross-validated column selection and the variant
//!   evaluation loop.
//! - [`bioanalysis`]: top genes per dimension, the association/degree
//!   ratio, paired comparisons.
//! - [`synthgen`]: synthetic interactomes with planted comorbidity signal.
//! - [`cli`]: configuration, cached artifacts and report bundles.
//!
//! Runnable walkthroughs for each stage live in this crate's `examples/`.

pub mod bioanalysis;
pub mod bse;
pub mod cli;
pub mod error;
pub mod graphdist;
pub mod linalg;
pub mod netio;
pub mod pairfeat;
pub mod spectral;
pub mod seed;
pub mod svmrbf;
pub mod synthgen;

pub use error::{Error, Result};
