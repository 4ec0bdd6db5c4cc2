//! Stratified k-fold assignment: shuffle within each class, then deal
//! round-robin so every fold mirrors the global class balance.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    /// Fold index (0..k) per document, in corpus order.
    pub fold_of: Vec<usize>,
    pub k: usize,
    pub seed: u64,
}

impl FoldAssignment {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] != fold)
            .collect()
    }
}

pub fn stratified_folds(labels: &[Label], k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::Config(format!("fold count {k} must be at least 2")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0usize; labels.len()];
    for class in [Label::Patient, Label::Control] {
        let mut members: Vec<usize> = (0..labels.len())
            .filter(|&i| labels[i] == class)
            .collect();
        if members.len() < k {
            return Err(Error::Config(format!(
                "class {} has {} documents, fewer than the {k} folds",
                class.as_str(),
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        for (pos, &doc) in members.iter().enumerate() {
            fold_of[doc] = pos % k;
        }
    }
    Ok(FoldAssignment { fold_of, k, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(p: usize, c: usize) -> Vec<Label> {
        let mut y = vec![Label::Patient; p];
        y.extend(vec![Label::Control; c]);
        y
    }

    fn class_counts_per_fold(assignment: &FoldAssignment, y: &[Label]) -> Vec<(usize, usize)> {
        (0..assignment.k)
            .map(|f| {
                let test = assignment.test_indices(f);
                let p = test.iter().filter(|&&i| y[i] == Label::Patient).count();
                (p, test.len() - p)
            })
            .collect()
    }

    #[test]
    fn ten_plus_ten_at_k_ten_gives_one_of_each_per_fold() {
        let y = labels(10, 10);
        let assignment = stratified_folds(&y, 10, 3).unwrap();
        for (p, c) in class_counts_per_fold(&assignment, &y) {
            assert_eq!((p, c), (1, 1));
        }
    }

    #[test]
    fn uneven_classes_stay_within_one_of_proportional() {
        let y = labels(95, 93);
        let assignment = stratified_folds(&y, 10, 7).unwrap();
        for (p, c) in class_counts_per_fold(&assignment, &y) {
            assert!((9..=10).contains(&p), "patient count {p}");
            assert!((9..=10).contains(&c), "control count {c}");
        }
    }

    #[test]
    fn folds_partition_the_corpus() {
        let y = labels(33, 28);
        let assignment = stratified_folds(&y, 7, 1).unwrap();
        let mut seen = vec![false; y.len()];
        for f in 0..7 {
            for i in assignment.test_indices(f) {
                assert!(!seen[i], "document {i} in two folds");
                seen[i] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
        let train = assignment.train_indices(0);
        let test = assignment.test_indices(0);
        assert_eq!(train.len() + test.len(), y.len());
        assert!(train.iter().all(|i| !test.contains(i)));
    }

    #[test]
    fn same_seed_reproduces_and_new_seed_reshuffles() {
        let y = labels(40, 40);
        let a = stratified_folds(&y, 10, 11).unwrap();
        let b = stratified_folds(&y, 10, 11).unwrap();
        assert_eq!(a, b);
        let c = stratified_folds(&y, 10, 12).unwrap();
        assert_ne!(a.fold_of, c.fold_of);
    }

    #[test]
    fn undersized_class_and_tiny_k_are_rejected() {
        let err = stratified_folds(&labels(3, 20), 10, 0).unwrap_err();
        assert!(err.to_string().contains("patient"), "{err}");
        assert!(err.to_string().contains('3'), "{err}");
        assert!(stratified_folds(&labels(5, 5), 1, 0).is_err());
    }
}
