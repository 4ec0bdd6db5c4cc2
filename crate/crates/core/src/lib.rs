//! Linguistic screening toolkit: turns annotated writing samples into
//! channel-wise feature vectors and evaluates patient-vs-control classifiers
//! under stratified cross-validation.
//!
//! The crate is organized along the processing pipeline:
//!
//! * [`corpus`] - document model, ingestion formats, fallback annotators
//! * [`features`] - per-channel feature extraction and composition
//! * [`topics`] - latent topic model trained by collapsed Gibbs sampling
//! * [`embeddings`] - word-vector loading and k-means cluster maps
//! * [`ml`] - linear SVM and random forest trained from scratch
//! * [`selection`] - information-gain and recursive-elimination rankings
//! * [`evaluation`] - folds, metrics, ROC rendering, synthetic corpora
//!
//! Every randomized step takes an explicit seed and is deterministic for a
//! fixed seed, including across thread counts.

pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod io;
pub mod ml;
pub mod selection;
pub mod topics;

pub use error::{Error, Result};
