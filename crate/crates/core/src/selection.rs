//! Feature ranking: information gain over discretized values, and recursive
//! feature elimination driven by squared SVM weights.

use std::collections::BTreeSet;

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::ml::svm::{train_svm, SvmConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct RankedFeature {
    pub name: String,
    pub score: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub method: String,
    pub entries: Vec<RankedFeature>,
}

impl Ranking {
    /// CSV rendering: `rank,feature,score,method`, one row per feature.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,feature,score,method\n");
        for entry in &self.entries {
            out.push_str(&format!(
                "{},{},{},{}\n",
                entry.rank, entry.name, entry.score, self.method
            ));
        }
        out
    }
}

/// How feature values are discretized before computing information gain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Binning {
    /// Equal-width bins over the observed [min, max]; a constant feature
    /// collapses to a single bin.
    EqualWidth,
    /// Bins over the value's rank, making the score invariant to strictly
    /// monotone transforms.
    Rank,
}

fn entropy_bits(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let mut h = 0.0;
    for &c in counts {
        if c > 0 {
            let p = c as f64 / total as f64;
            h -= p * p.log2();
        }
    }
    h
}

/// Class entropy of the labels, in bits.
pub fn label_entropy(labels: &[Label]) -> f64 {
    let pos = labels.iter().filter(|l| **l == Label::Patient).count();
    entropy_bits(&[pos, labels.len() - pos])
}

fn bin_indices(values: &[f64], bins: usize, binning: Binning) -> Vec<usize> {
    match binning {
        Binning::EqualWidth => {
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if min == max {
                return vec![0; values.len()];
            }
            let width = (max - min) / bins as f64;
            values
                .iter()
                .map(|v| (((v - min) / width) as usize).min(bins - 1))
                .collect()
        }
        Binning::Rank => {
            let mut sorted = values.to_vec();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let n = values.len();
            values
                .iter()
                .map(|v| {
                    let less = sorted.partition_point(|s| s < v);
                    (less * bins / n).min(bins - 1)
                })
                .collect()
        }
    }
}

/// Ranks every feature by `H(y) - H(y | binned value)` in bits. Ties sort by
/// feature name.
pub fn information_gain(
    matrix: &FeatureMatrix,
    bins: usize,
    binning: Binning,
) -> Result<Ranking> {
    if bins < 2 {
        return Err(Error::Config("information gain needs at least 2 bins".into()));
    }
    if matrix.rows.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let labels = &matrix.labels;
    let h_y = label_entropy(labels);
    let n = matrix.rows.len();
    let dense = matrix.to_dense();
    let names = matrix.space.names();
    let mut scored: Vec<(String, f64)> = Vec::with_capacity(names.len());
    let mut column = vec![0.0; n];
    for (j, name) in names.iter().enumerate() {
        for (i, row) in dense.iter().enumerate() {
            column[i] = row[j];
        }
        let assignment = bin_indices(&column, bins, binning);
        let mut per_bin: Vec<[usize; 2]> = vec![[0, 0]; bins];
        for (i, &b) in assignment.iter().enumerate() {
            let cls = if labels[i] == Label::Patient { 0 } else { 1 };
            per_bin[b][cls] += 1;
        }
        let mut conditional = 0.0;
        for bin in &per_bin {
            let size = bin[0] + bin[1];
            if size > 0 {
                conditional += size as f64 / n as f64 * entropy_bits(&[bin[0], bin[1]]);
            }
        }
        let ig = (h_y - conditional).max(0.0);
        scored.push((name.clone(), ig));
    }
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    let entries = scored
        .into_iter()
        .enumerate()
        .map(|(i, (name, score))| RankedFeature {
            name,
            score,
            rank: i + 1,
        })
        .collect();
    Ok(Ranking {
        method: "information_gain".to_string(),
        entries,
    })
}

/// Recursive feature elimination: repeatedly trains the SVM on the surviving
/// features and drops the `ceil(drop_fraction * surviving)` lowest squared
/// weights (at least one, never past `target_k`). The ranking lists the
/// survivors first, then each eliminated batch latest-first; scores are the
/// squared weights at the round a feature left (or the final round for
/// survivors).
pub fn rfe(
    matrix: &FeatureMatrix,
    svm_config: &SvmConfig,
    drop_fraction: f64,
    target_k: usize,
) -> Result<Ranking> {
    let d = matrix.space.dim();
    if target_k == 0 || target_k > d {
        return Err(Error::Config(format!(
            "target feature count {target_k} must be in 1..={d}"
        )));
    }
    if !(0.0..=1.0).contains(&drop_fraction) || drop_fraction == 0.0 {
        return Err(Error::Config(
            "drop fraction must be in (0, 1]".to_string(),
        ));
    }
    let dense = matrix.to_dense();
    let labels = &matrix.labels;
    let names = matrix.space.names();

    let mut surviving: Vec<usize> = (0..d).collect();
    let mut batches: Vec<Vec<(usize, f64)>> = Vec::new();
    let weights_for = |cols: &[usize]| -> Result<Vec<f64>> {
        let sub: Vec<Vec<f64>> = dense
            .iter()
            .map(|row| cols.iter().map(|&c| row[c]).collect())
            .collect();
        let model = train_svm(&sub, labels, svm_config)?;
        Ok(model.weights.iter().map(|w| w * w).collect())
    };

    while surviving.len() > target_k {
        let w2 = weights_for(&surviving)?;
        let n_drop = ((drop_fraction * surviving.len() as f64).ceil() as usize)
            .max(1)
            .min(surviving.len() - target_k);
        let mut candidates: Vec<(usize, f64)> = surviving
            .iter()
            .copied()
            .zip(w2.iter().copied())
            .collect();
        // weakest first; ties resolve by feature name
        candidates.sort_by(|a, b| {
            a.1.partial_cmp(&b.1)
                .unwrap()
                .then_with(|| names[a.0].cmp(&names[b.0]))
        });
        let dropped: BTreeSet<usize> = candidates[..n_drop].iter().map(|(c, _)| *c).collect();
        batches.push(candidates[..n_drop].to_vec());
        surviving.retain(|c| !dropped.contains(c));
    }

    let final_w2 = weights_for(&surviving)?;
    let mut entries: Vec<(usize, f64)> = surviving
        .iter()
        .copied()
        .zip(final_w2.iter().copied())
        .collect();
    entries.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap()
            .then_with(|| names[a.0].cmp(&names[b.0]))
    });
    for batch in batches.iter().rev() {
        let mut batch = batch.clone();
        batch.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap()
                .then_with(|| names[a.0].cmp(&names[b.0]))
        });
        entries.extend(batch);
    }
    let entries = entries
        .into_iter()
        .enumerate()
        .map(|(i, (col, score))| RankedFeature {
            name: names[col].clone(),
            score,
            rank: i + 1,
        })
        .collect();
    Ok(Ranking {
        method: "rfe".to_string(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{FeatureMatrix, FeatureSpace, FeatureVector};

    fn matrix(names: &[&str], rows: Vec<Vec<f64>>, labels: Vec<Label>) -> FeatureMatrix {
        let space = FeatureSpace::from_names(names.iter().map(|s| s.to_string()).collect());
        let ids = (0..rows.len()).map(|i| format!("d{i}")).collect();
        let rows = rows
            .into_iter()
            .map(|r| {
                let mut v = FeatureVector::zeros(names.len());
                for (i, value) in r.into_iter().enumerate() {
                    v.set(i, value);
                }
                v
            })
            .collect();
        FeatureMatrix {
            space,
            ids,
            labels,
            rows,
        }
    }

    fn labels(pos: usize, neg: usize) -> Vec<Label> {
        let mut y = vec![Label::Patient; pos];
        y.extend(vec![Label::Control; neg]);
        y
    }

    #[test]
    fn perfect_feature_on_balanced_labels_scores_one_bit() {
        let y = labels(5, 5);
        let rows: Vec<Vec<f64>> = y
            .iter()
            .map(|l| vec![if *l == Label::Patient { 1.0 } else { 0.0 }])
            .collect();
        let ranking = information_gain(&matrix(&["f"], rows, y), 10, Binning::EqualWidth).unwrap();
        assert!((ranking.entries[0].score - 1.0).abs() < 1e-9);
    }

    #[test]
    fn perfect_feature_on_three_to_one_labels_matches_the_entropy() {
        let y = labels(6, 2);
        let rows: Vec<Vec<f64>> = y
            .iter()
            .map(|l| vec![if *l == Label::Patient { 1.0 } else { 0.0 }])
            .collect();
        // class entropy at 3:1 computed from the definition
        let expected = -(0.75f64 * 0.75f64.log2() + 0.25f64 * 0.25f64.log2());
        assert!((expected - 0.811278).abs() < 1e-6);
        let ranking = information_gain(&matrix(&["f"], rows, y.clone()), 10, Binning::EqualWidth)
            .unwrap();
        assert!((ranking.entries[0].score - expected).abs() < 1e-9);
        assert!((label_entropy(&y) - expected).abs() < 1e-12);
    }

    #[test]
    fn independent_and_constant_features_score_zero() {
        let y = labels(4, 4);
        // alternating value is independent of the label; third column constant
        let rows: Vec<Vec<f64>> = (0..8).map(|i| vec![(i % 2) as f64, 3.25]).collect();
        let ranking =
            information_gain(&matrix(&["alt", "const"], rows, y), 10, Binning::EqualWidth)
                .unwrap();
        for entry in &ranking.entries {
            assert!(entry.score.abs() < 1e-9, "{}: {}", entry.name, entry.score);
        }
    }

    #[test]
    fn gain_never_exceeds_label_entropy() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let n = 30;
            let y: Vec<Label> = (0..n)
                .map(|_| {
                    if rng.gen_bool(0.5) {
                        Label::Patient
                    } else {
                        Label::Control
                    }
                })
                .collect();
            if !y.contains(&Label::Patient) || !y.contains(&Label::Control) {
                continue;
            }
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| vec![rng.gen_range(-2.0..2.0), rng.gen_range(0.0..1.0)])
                .collect();
            let h = label_entropy(&y);
            let ranking =
                information_gain(&matrix(&["a", "b"], rows, y), 10, Binning::EqualWidth).unwrap();
            for entry in &ranking.entries {
                assert!(entry.score <= h + 1e-9);
            }
        }
    }

    #[test]
    fn rank_binning_ignores_monotone_transforms() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let y = labels(10, 10);
        let raw: Vec<f64> = (0..20).map(|_| rng.gen_range(0.1..4.0)).collect();
        let rows_a: Vec<Vec<f64>> = raw.iter().map(|&v| vec![v]).collect();
        let rows_b: Vec<Vec<f64>> = raw.iter().map(|&v| vec![v.powi(3)]).collect();
        let a = information_gain(&matrix(&["f"], rows_a, y.clone()), 5, Binning::Rank).unwrap();
        let b = information_gain(&matrix(&["f"], rows_b, y), 5, Binning::Rank).unwrap();
        assert!((a.entries[0].score - b.entries[0].score).abs() < 1e-12);
    }

    #[test]
    fn equal_scores_rank_by_name() {
        let y = labels(4, 4);
        let rows: Vec<Vec<f64>> = y
            .iter()
            .map(|l| {
                let v = if *l == Label::Patient { 1.0 } else { 0.0 };
                vec![v, v]
            })
            .collect();
        let ranking =
            information_gain(&matrix(&["zeta", "alpha"], rows, y), 10, Binning::EqualWidth)
                .unwrap();
        assert_eq!(ranking.entries[0].name, "alpha");
        assert_eq!(ranking.entries[1].name, "zeta");
        assert_eq!(ranking.entries[0].rank, 1);
    }

    fn rfe_fixture(seed: u64) -> FeatureMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let y = labels(20, 20);
        let rows: Vec<Vec<f64>> = y
            .iter()
            .map(|l| {
                let signal = if *l == Label::Patient { 1.0 } else { -1.0 };
                let mut row = vec![signal + rng.gen_range(-0.2..0.2)];
                for _ in 0..9 {
                    row.push(rng.gen_range(-1.0..1.0));
                }
                row
            })
            .collect();
        let names: Vec<&str> = vec![
            "signal", "n1", "n2", "n3", "n4", "n5", "n6", "n7", "n8", "n9",
        ];
        matrix(&names, rows, y)
    }

    #[test]
    fn rfe_keeps_the_informative_feature() {
        for seed in 0..5 {
            let m = rfe_fixture(seed);
            let ranking = rfe(&m, &SvmConfig::new(seed), 0.1, 1).unwrap();
            assert_eq!(
                ranking.entries[0].name, "signal",
                "seed {seed}: {:?}",
                ranking.entries.iter().map(|e| &e.name).collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn ranking_covers_every_feature_with_contiguous_ranks() {
        let m = rfe_fixture(2);
        let ranking = rfe(&m, &SvmConfig::new(0), 0.25, 2).unwrap();
        assert_eq!(ranking.entries.len(), 10);
        for (i, entry) in ranking.entries.iter().enumerate() {
            assert_eq!(entry.rank, i + 1);
        }
        let unique: std::collections::BTreeSet<&str> = ranking
            .entries
            .iter()
            .map(|e| e.name.as_str())
            .collect();
        assert_eq!(unique.len(), 10);
    }

    #[test]
    fn target_equal_to_dimension_ranks_by_final_weights() {
        let m = rfe_fixture(3);
        let ranking = rfe(&m, &SvmConfig::new(1), 0.1, 10).unwrap();
        assert_eq!(ranking.entries.len(), 10);
        assert_eq!(ranking.entries[0].name, "signal");
        let scores: Vec<f64> = ranking.entries.iter().map(|e| e.score).collect();
        assert!(scores.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn one_per_round_elimination_is_column_order_invariant() {
        let m = rfe_fixture(4);
        let ranking_a = rfe(&m, &SvmConfig::new(0), 0.01, 1).unwrap();
        // permute columns: rotate them by 3
        let names: Vec<String> = m.space.names().to_vec();
        let d = names.len();
        let perm: Vec<usize> = (0..d).map(|i| (i + 3) % d).collect();
        let rows: Vec<Vec<f64>> = m
            .to_dense()
            .into_iter()
            .map(|row| perm.iter().map(|&p| row[p]).collect())
            .collect();
        let perm_names: Vec<&str> = perm.iter().map(|&p| names[p].as_str()).collect();
        let m2 = matrix(&perm_names, rows, m.labels.clone());
        let ranking_b = rfe(&m2, &SvmConfig::new(0), 0.01, 1).unwrap();
        let order_a: Vec<&str> = ranking_a.entries.iter().map(|e| e.name.as_str()).collect();
        let order_b: Vec<&str> = ranking_b.entries.iter().map(|e| e.name.as_str()).collect();
        assert_eq!(order_a, order_b);
    }

    #[test]
    fn csv_has_one_row_per_feature() {
        let m = rfe_fixture(5);
        let ranking = rfe(&m, &SvmConfig::new(0), 0.5, 5).unwrap();
        let csv = ranking.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "rank,feature,score,method");
        assert_eq!(lines.len(), 11);
        assert!(lines[1].ends_with(",rfe"));
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let m = rfe_fixture(6);
        assert!(rfe(&m, &SvmConfig::new(0), 0.0, 1).is_err());
        assert!(rfe(&m, &SvmConfig::new(0), 0.1, 0).is_err());
        assert!(rfe(&m, &SvmConfig::new(0), 0.1, 11).is_err());
        assert!(information_gain(&m, 1, Binning::EqualWidth).is_err());
    }
}
