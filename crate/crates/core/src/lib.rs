//! Bi-fidelity surrogate modelling toolkit.
//!
//! The crate trains Kriging and Co-Kriging models on scarce two-source data,
//! computes fidelity-relationship and budget features from the training sample
//! alone, labels comparative model performance with a one-sided Wilcoxon test,
//! filters benchmark instances into unbiased suites and selects a model either
//! through a fixed rule set, a global-correlation baseline, or a classifier on
//! a fixed two-dimensional projection of the features.

pub mod error;
pub mod features;
pub mod filtering;
pub mod harness;
pub mod linalg;
pub mod optim;
pub mod pipeline;
pub mod rng;
pub mod sampling;
pub mod selector;
pub mod stats;
pub mod surrogates;
pub mod testbed;

pub use error::{Error, Result};
