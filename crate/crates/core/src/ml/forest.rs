//! Random forest: bagged CART trees split on Gini impurity over a random
//! feature subset per node, grown to purity by default. The positive-class
//! probability of the forest is the fraction of trees voting patient.

use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::check_training_inputs;
use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::io::{read_to_string, write_atomic};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Features sampled per split; defaults to ceil(sqrt(d)) when `None`.
    pub mtry: Option<usize>,
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
    pub seed: u64,
}

impl ForestConfig {
    pub fn new(seed: u64) -> ForestConfig {
        ForestConfig {
            n_trees: 100,
            mtry: None,
            min_leaf: 1,
            max_depth: None,
            seed,
        }
    }
}

impl Default for ForestConfig {
    fn default() -> ForestConfig {
        ForestConfig::new(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        pos: u32,
        neg: u32,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    fn vote(&self, row: &[f64]) -> bool {
        match self {
            Node::Leaf { pos, neg } => pos >= neg,
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                if row[*feature] <= *threshold {
                    left.vote(row)
                } else {
                    right.vote(row)
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn leaves(&self) -> Vec<(u32, u32)> {
        match self {
            Node::Leaf { pos, neg } => vec![(*pos, *neg)],
            Node::Split { left, right, .. } => {
                let mut out = left.leaves();
                out.extend(right.leaves());
                out
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub n_features: usize,
    pub config: ForestConfig,
    pub trees: Vec<Node>,
}

pub fn train_forest(x: &[Vec<f64>], y: &[Label], config: &ForestConfig) -> Result<ForestModel> {
    let d = check_training_inputs(x, y)?;
    if config.n_trees == 0 {
        return Err(Error::Config("forest needs at least one tree".into()));
    }
    if config.min_leaf == 0 {
        return Err(Error::Config("min_leaf must be at least 1".into()));
    }
    let mtry = config.mtry.unwrap_or_else(|| (d as f64).sqrt().ceil() as usize);
    let mtry = mtry.clamp(1, d);
    let positives: Vec<bool> = y.iter().map(|l| *l == Label::Patient).collect();
    let n = x.len();

    let trees: Vec<Node> = (0..config.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(t as u64));
            let sample: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            grow(
                x,
                &positives,
                sample,
                mtry,
                config.min_leaf,
                config.max_depth,
                0,
                &mut rng,
            )
        })
        .collect();

    Ok(ForestModel {
        n_features: d,
        config: *config,
        trees,
    })
}

#[allow(clippy::too_many_arguments)]
fn grow(
    x: &[Vec<f64>],
    positives: &[bool],
    indices: Vec<usize>,
    mtry: usize,
    min_leaf: usize,
    max_depth: Option<usize>,
    depth: usize,
    rng: &mut ChaCha8Rng,
) -> Node {
    let pos = indices.iter().filter(|&&i| positives[i]).count() as u32;
    let neg = indices.len() as u32 - pos;
    let at_depth_limit = max_depth.is_some_and(|limit| depth >= limit);
    if pos == 0 || neg == 0 || indices.len() < 2 * min_leaf || at_depth_limit {
        return Node::Leaf { pos, neg };
    }
    let d = x[0].len();
    let features = sample_features(d, mtry, rng);
    match find_best_split(x, positives, &indices, &features, min_leaf) {
        None => Node::Leaf { pos, neg },
        Some((feature, threshold, _gain)) => {
            let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
                .into_iter()
                .partition(|&i| x[i][feature] <= threshold);
            let left = grow(
                x, positives, left_idx, mtry, min_leaf, max_depth, depth + 1, rng,
            );
            let right = grow(
                x, positives, right_idx, mtry, min_leaf, max_depth, depth + 1, rng,
            );
            Node::Split {
                feature,
                threshold,
                left: Box::new(left),
                right: Box::new(right),
            }
        }
    }
}

/// Draws `mtry` distinct feature indices, returned sorted so ties between
/// equally good splits resolve to the lowest feature.
fn sample_features(d: usize, mtry: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..d).collect();
    for i in 0..mtry {
        let j = rng.gen_range(i..d);
        pool.swap(i, j);
    }
    let mut picked = pool[..mtry].to_vec();
    picked.sort_unstable();
    picked
}

fn gini(pos: f64, neg: f64) -> f64 {
    let n = pos + neg;
    if n == 0.0 {
        return 0.0;
    }
    let p = pos / n;
    let q = neg / n;
    1.0 - p * p - q * q
}

/// Best (feature, threshold, gain) over the candidate features, with
/// thresholds at midpoints of consecutive distinct values. Returns `None`
/// when no split satisfies `min_leaf` with positive gain. Ties keep the
/// first candidate in (feature, threshold) order.
pub(crate) fn find_best_split(
    x: &[Vec<f64>],
    positives: &[bool],
    indices: &[usize],
    features: &[usize],
    min_leaf: usize,
) -> Option<(usize, f64, f64)> {
    let n = indices.len() as f64;
    let total_pos = indices.iter().filter(|&&i| positives[i]).count() as f64;
    let total_neg = n - total_pos;
    let parent = gini(total_pos, total_neg);
    let mut best: Option<(usize, f64, f64)> = None;
    let mut values: Vec<(f64, bool)> = Vec::with_capacity(indices.len());
    for &feature in features {
        values.clear();
        values.extend(
            indices
                .iter()
                .map(|&i| (x[i][feature], positives[i])),
        );
        values.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut left_pos = 0.0;
        let mut left_n = 0.0;
        for w in 0..values.len() - 1 {
            left_n += 1.0;
            if values[w].1 {
                left_pos += 1.0;
            }
            if values[w].0 == values[w + 1].0 {
                continue;
            }
            let right_n = n - left_n;
            if (left_n as usize) < min_leaf || (right_n as usize) < min_leaf {
                continue;
            }
            let left_neg = left_n - left_pos;
            let right_pos = total_pos - left_pos;
            let right_neg = total_neg - left_neg;
            let gain = parent
                - (left_n / n) * gini(left_pos, left_neg)
                - (right_n / n) * gini(right_pos, right_neg);
            if gain > 1e-12 && best.map_or(true, |(_, _, g)| gain > g + 1e-12) {
                let threshold = (values[w].0 + values[w + 1].0) / 2.0;
                best = Some((feature, threshold, gain));
            }
        }
    }
    best
}

impl ForestModel {
    /// Fraction of trees voting for the patient class.
    pub fn proba(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                actual: row.len(),
            });
        }
        let votes = self.trees.iter().filter(|t| t.vote(row)).count();
        Ok(votes as f64 / self.trees.len() as f64)
    }

    pub fn predict(&self, row: &[f64]) -> Result<Label> {
        Ok(if self.proba(row)? >= 0.5 {
            Label::Patient
        } else {
            Label::Control
        })
    }

    pub fn to_json_bytes(&self) -> Vec<u8> {
        let file = ModelFile {
            format: MODEL_FORMAT.to_string(),
            model: self.clone(),
        };
        let mut bytes = serde_json::to_vec(&file).expect("forest model serialization");
        bytes.push(b'\n');
        bytes
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_json_bytes())
    }

    pub fn load(path: &Path) -> Result<ForestModel> {
        let text = read_to_string(path)?;
        let file: ModelFile = serde_json::from_str(&text).map_err(|e| Error::Json {
            line: e.line(),
            msg: e.to_string(),
        })?;
        if file.format != MODEL_FORMAT {
            return Err(Error::Invalid(format!(
                "unsupported forest model format {:?}",
                file.format
            )));
        }
        Ok(file.model)
    }
}

const MODEL_FORMAT: &str = "forest-model/v1";

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    #[serde(flatten)]
    model: ForestModel,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn informative() -> (Vec<Vec<f64>>, Vec<Label>) {
        // feature 0 decides the class, feature 1 is noise
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..12 {
            let noise = ((i * 7) % 5) as f64;
            let value = i as f64;
            x.push(vec![value, noise]);
            y.push(if value > 6.0 {
                Label::Patient
            } else {
                Label::Control
            });
        }
        (x, y)
    }

    #[test]
    fn informative_fixture_reaches_perfect_training_accuracy() {
        let (x, y) = informative();
        let mut config = ForestConfig::new(7);
        config.n_trees = 25;
        let model = train_forest(&x, &y, &config).unwrap();
        for (row, label) in x.iter().zip(&y) {
            assert_eq!(model.predict(row).unwrap(), *label);
        }
    }

    #[test]
    fn fixed_seed_serializes_byte_identically() {
        let (x, y) = informative();
        let mut config = ForestConfig::new(42);
        config.n_trees = 10;
        let a = train_forest(&x, &y, &config).unwrap();
        let b = train_forest(&x, &y, &config).unwrap();
        assert_eq!(a.to_json_bytes(), b.to_json_bytes());
        let mut other = config;
        other.seed = 43;
        let c = train_forest(&x, &y, &other).unwrap();
        assert_ne!(a.trees, c.trees, "different seeds should differ somewhere");
    }

    #[test]
    fn positive_scaling_of_a_feature_changes_nothing() {
        let (x, y) = informative();
        let scale = |rows: &[Vec<f64>], c: f64| -> Vec<Vec<f64>> {
            rows.iter().map(|r| vec![r[0] * c, r[1]]).collect()
        };
        let mut config = ForestConfig::new(5);
        config.n_trees = 15;
        let base = train_forest(&x, &y, &config).unwrap();
        // the integer grid keeps scaled values and midpoints exact for these factors
        for c in [0.5, 2.0, 3.0] {
            let scaled_model = train_forest(&scale(&x, c), &y, &config).unwrap();
            for row in &x {
                let scaled_row = vec![row[0] * c, row[1]];
                assert_eq!(
                    base.proba(row).unwrap(),
                    scaled_model.proba(&scaled_row).unwrap(),
                    "scale {c} moved a prediction"
                );
            }
        }
    }

    #[test]
    fn chosen_split_matches_brute_force_best_gain() {
        let (x, y) = informative();
        let positives: Vec<bool> = y.iter().map(|l| *l == Label::Patient).collect();
        let indices: Vec<usize> = (0..x.len()).collect();
        let all_features = [0, 1];
        let (feature, threshold, gain) =
            find_best_split(&x, &positives, &indices, &all_features, 1).unwrap();
        // brute force: every feature, every midpoint
        let mut best_gain: f64 = 0.0;
        for f in all_features {
            let mut vals: Vec<f64> = indices.iter().map(|&i| x[i][f]).collect();
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            vals.dedup();
            for w in vals.windows(2) {
                let thr = (w[0] + w[1]) / 2.0;
                let left: Vec<usize> = indices.iter().copied().filter(|&i| x[i][f] <= thr).collect();
                let right: Vec<usize> = indices.iter().copied().filter(|&i| x[i][f] > thr).collect();
                let g = |set: &[usize]| {
                    let p = set.iter().filter(|&&i| positives[i]).count() as f64;
                    let n = set.len() as f64;
                    gini(p, n - p)
                };
                let n = indices.len() as f64;
                let parent = g(&indices);
                let gain_bf = parent
                    - left.len() as f64 / n * g(&left)
                    - right.len() as f64 / n * g(&right);
                best_gain = best_gain.max(gain_bf);
            }
        }
        assert!(
            (gain - best_gain).abs() < 1e-12,
            "split ({feature}, {threshold}) gain {gain} vs brute force {best_gain}"
        );
    }

    #[test]
    fn constant_features_give_single_leaf_trees() {
        let x = vec![vec![1.0, 2.0]; 8];
        let y: Vec<Label> = (0..8)
            .map(|i| if i < 4 { Label::Patient } else { Label::Control })
            .collect();
        let mut config = ForestConfig::new(3);
        config.n_trees = 12;
        let model = train_forest(&x, &y, &config).unwrap();
        assert!(model.trees.iter().all(|t| t.depth() == 0));
    }

    #[test]
    fn min_leaf_bounds_every_leaf() {
        let (x, y) = informative();
        let mut config = ForestConfig::new(9);
        config.n_trees = 20;
        config.min_leaf = 3;
        let model = train_forest(&x, &y, &config).unwrap();
        for tree in &model.trees {
            for (pos, neg) in tree.leaves() {
                assert!(pos + neg >= 3, "leaf of size {}", pos + neg);
            }
        }
    }

    #[test]
    fn max_depth_caps_tree_height() {
        let (x, y) = informative();
        let mut config = ForestConfig::new(9);
        config.n_trees = 20;
        config.max_depth = Some(2);
        let model = train_forest(&x, &y, &config).unwrap();
        assert!(model.trees.iter().all(|t| t.depth() <= 2));
    }

    #[test]
    fn proba_is_the_positive_vote_fraction() {
        let trees: Vec<Node> = (0..10)
            .map(|i| {
                if i < 3 {
                    Node::Leaf { pos: 5, neg: 0 }
                } else {
                    Node::Leaf { pos: 0, neg: 5 }
                }
            })
            .collect();
        let model = ForestModel {
            n_features: 2,
            config: ForestConfig::new(0),
            trees,
        };
        assert_eq!(model.proba(&[0.0, 0.0]).unwrap(), 0.3);
    }

    #[test]
    fn proba_rejects_wrong_width_rows() {
        let (x, y) = informative();
        let mut config = ForestConfig::new(1);
        config.n_trees = 3;
        let model = train_forest(&x, &y, &config).unwrap();
        let err = model.proba(&[1.0]).unwrap_err();
        assert!(err.to_string().contains("mismatch"), "{err}");
    }

    #[test]
    fn model_file_round_trips() {
        let (x, y) = informative();
        let mut config = ForestConfig::new(13);
        config.n_trees = 5;
        let model = train_forest(&x, &y, &config).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("forest.json");
        model.save(&path).unwrap();
        let back = ForestModel::load(&path).unwrap();
        assert_eq!(back, model);
    }
}
