//! Nonparallel support tensor machine with large-margin-distribution terms.
//!
//! Two CP-constrained weight tensors `W1`, `W2` define tensorplanes
//! `⟨W_i, X⟩ = 0`. `W1` is fit to pass near the positive class while pushing
//! negatives past a unit margin, `W2` the other way round, and a sample is
//! labeled by the nearer plane. Training alternates over tensor modes; each
//! mode subproblem is solved through its box-constrained Wolfe dual.
//!
//! Modules:
//! - [`multilinear`]: tensors, unfoldings, Khatri-Rao products, CP algebra
//! - [`boxqp`]: coordinate-descent solver for `min ½αᵀHα − fᵀα, 0 ≤ α ≤ c`
//! - [`model`]: the classifier, its trainer and model files
//! - [`svm`]: bias-free linear SVM baseline on flattened tensors
//! - [`dataset`]: TDS files, CSV import, synthetic data and stratified folds
//! - [`eval`]: cross-validation, grid search, ranks, Friedman and Nemenyi
//!   statistics, reports

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod binio;
pub mod boxqp;
pub mod dataset;
mod error;
pub mod eval;
pub mod model;
pub mod multilinear;
pub mod svm;

pub use error::{Error, Result};
