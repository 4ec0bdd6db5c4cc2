//! From-scratch classifiers: a linear SVM trained by dual coordinate descent
//! and a random forest of Gini-split decision trees. Both take dense rows,
//! signed labels from [`crate::corpus::Label`], and an explicit seed.

pub mod forest;
pub mod svm;

pub use forest::{train_forest, ForestConfig, ForestModel};
pub use svm::{fit_svm, train_svm, Standardizer, SvmConfig, SvmDiagnostics, SvmModel};

use crate::corpus::Label;
use crate::error::{Error, Result};

/// Shared validation for training inputs: consistent row widths, matching
/// label count, and both classes present.
pub(crate) fn check_training_inputs(x: &[Vec<f64>], y: &[Label]) -> Result<usize> {
    if x.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if x.len() != y.len() {
        return Err(Error::Config(format!(
            "{} rows but {} labels",
            x.len(),
            y.len()
        )));
    }
    let d = x[0].len();
    for row in x {
        if row.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: row.len(),
            });
        }
    }
    if !y.contains(&Label::Patient) {
        return Err(Error::MissingClass("patient"));
    }
    if !y.contains(&Label::Control) {
        return Err(Error::MissingClass("control"));
    }
    Ok(d)
}
