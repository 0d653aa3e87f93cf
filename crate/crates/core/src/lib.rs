//! Supervised category encoding for intrusion-detection style tabular data.
//!
//! The crate turns high-cardinality categorical variables into compact
//! numeric features by thresholding per-category class-conditional
//! probabilities into indicator pairs and decorrelating them with PCA. A
//! library of classical encoders, a set of deterministic reference
//! classifiers, evaluation metrics, and a grid-search harness support
//! side-by-side benchmarking; the `catenc` binary exposes the whole pipeline
//! on the command line.

pub mod baselines;
pub mod classifiers;
pub mod dataset;
pub mod encoder;
pub mod error;
pub mod grid;
pub mod metrics;
pub mod numfmt;
pub mod pca;
pub mod stats;

pub use error::{Error, Result};
