//! Word-vector handling: loading text-format embedding tables and grouping
//! words by k-means so documents can be described by cluster frequencies.

use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{read_to_string, write_atomic};

/// Word vectors in file order, L2-normalized on load.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorTable {
    words: Vec<String>,
    vectors: Vec<Vec<f64>>,
    dim: usize,
}

impl VectorTable {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn from_pairs(pairs: Vec<(String, Vec<f64>)>) -> Result<VectorTable> {
        let mut words = Vec::with_capacity(pairs.len());
        let mut vectors = Vec::with_capacity(pairs.len());
        let mut dim = None;
        for (word, mut vector) in pairs {
            match dim {
                None => dim = Some(vector.len()),
                Some(d) if d != vector.len() => {
                    return Err(Error::Invalid(format!(
                        "vector for {word:?} has {} components, expected {d}",
                        vector.len()
                    )))
                }
                _ => {}
            }
            normalize(&mut vector);
            words.push(word);
            vectors.push(vector);
        }
        Ok(VectorTable {
            dim: dim.unwrap_or(0),
            words,
            vectors,
        })
    }

    pub fn vector(&self, word: &str) -> Option<&[f64]> {
        self.words
            .iter()
            .position(|w| w == word)
            .map(|i| self.vectors[i].as_slice())
    }

    /// Text form accepted by [`load_vectors`]: one word and its components
    /// per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (word, vector) in self.words.iter().zip(&self.vectors) {
            out.push_str(word);
            for component in vector {
                out.push(' ');
                out.push_str(&component.to_string());
            }
            out.push('\n');
        }
        out
    }
}

fn normalize(vector: &mut [f64]) {
    let norm = vector.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in vector.iter_mut() {
            *v /= norm;
        }
    }
}

/// Loads a text embedding table: one word followed by its components per
/// line, whitespace-separated. Every vector is unit-normalized; duplicate
/// words and ragged dimensions are rejected with their line number.
pub fn load_vectors(path: &Path) -> Result<VectorTable> {
    parse_vectors(&read_to_string(path)?)
}

pub fn parse_vectors(content: &str) -> Result<VectorTable> {
    let mut words = Vec::new();
    let mut vectors: Vec<Vec<f64>> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    let mut dim: Option<usize> = None;
    for (idx, line) in content.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let word = parts.next().expect("non-empty line");
        let mut vector = Vec::new();
        for raw in parts {
            let value: f64 = raw.parse().map_err(|_| {
                Error::Invalid(format!("vectors line {line_no}: non-numeric component {raw:?}"))
            })?;
            vector.push(value);
        }
        if vector.is_empty() {
            return Err(Error::Invalid(format!(
                "vectors line {line_no}: no components for {word:?}"
            )));
        }
        match dim {
            None => dim = Some(vector.len()),
            Some(d) if d != vector.len() => {
                return Err(Error::Invalid(format!(
                    "vectors line {line_no}: expected {d} components, found {}",
                    vector.len()
                )))
            }
            _ => {}
        }
        if !seen.insert(word.to_string()) {
            return Err(Error::Invalid(format!(
                "vectors line {line_no}: duplicate word {word:?}"
            )));
        }
        normalize(&mut vector);
        words.push(word.to_string());
        vectors.push(vector);
    }
    Ok(VectorTable {
        dim: dim.unwrap_or(0),
        words,
        vectors,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KmeansConfig {
    pub k: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

impl KmeansConfig {
    pub fn new(k: usize, seed: u64) -> KmeansConfig {
        KmeansConfig {
            k,
            max_iter: 100,
            tol: 1e-7,
            seed,
        }
    }
}

/// A fitted cluster map over a vector table.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    k: usize,
    dim: usize,
    centroids: Vec<Vec<f64>>,
    assignment: BTreeMap<String, usize>,
    inertia: f64,
}

/// Per-iteration record of a k-means run, for monotonicity checks.
#[derive(Debug, Clone, Default)]
pub struct KmeansHistory {
    /// Inertia measured at each assignment step.
    pub inertia: Vec<f64>,
    /// Whether an empty-cluster repair ran after that step; monotonicity is
    /// only guaranteed between repair-free iterations.
    pub repaired: Vec<bool>,
}

/// Lloyd's algorithm with k-means++ seeding. Ties in the nearest-centroid
/// choice go to the lowest centroid index; empty clusters are reseeded to
/// the point currently farthest from its own centroid.
pub fn kmeans(table: &VectorTable, config: &KmeansConfig) -> Result<ClusterModel> {
    let (model, history) = kmeans_with_history(table, config)?;
    for i in 1..history.inertia.len() {
        if !history.repaired[i - 1] {
            assert!(
                history.inertia[i] <= history.inertia[i - 1] + 1e-9,
                "inertia rose from {} to {} at iteration {i}",
                history.inertia[i - 1],
                history.inertia[i]
            );
        }
    }
    Ok(model)
}

pub fn kmeans_with_history(
    table: &VectorTable,
    config: &KmeansConfig,
) -> Result<(ClusterModel, KmeansHistory)> {
    let n = table.len();
    let k = config.k;
    if k == 0 {
        return Err(Error::Config("cluster count must be at least 1".into()));
    }
    if k > n {
        return Err(Error::Config(format!(
            "cluster count {k} exceeds the {n} words in the vector table"
        )));
    }
    let points = &table.vectors;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut centroids = plus_plus_init(points, k, &mut rng);
    let mut history = KmeansHistory::default();
    let mut assignment = vec![0usize; n];

    for _iter in 0..config.max_iter {
        let mut inertia = 0.0;
        for (i, point) in points.iter().enumerate() {
            let (best, d2) = nearest_centroid(point, &centroids);
            assignment[i] = best;
            inertia += d2;
        }
        history.inertia.push(inertia);

        let mut sums = vec![vec![0.0; table.dim]; k];
        let mut counts = vec![0usize; k];
        for (i, point) in points.iter().enumerate() {
            counts[assignment[i]] += 1;
            for (s, v) in sums[assignment[i]].iter_mut().zip(point) {
                *s += v;
            }
        }
        let mut shift: f64 = 0.0;
        for c in 0..k {
            if counts[c] == 0 {
                continue; // handled by the repair pass below
            }
            let mut new_centroid = sums[c].clone();
            for v in &mut new_centroid {
                *v /= counts[c] as f64;
            }
            let d2 = dist2(&centroids[c], &new_centroid);
            shift = shift.max(d2.sqrt());
            centroids[c] = new_centroid;
        }

        let repaired = repair_empty_clusters(points, &assignment, &counts, &mut centroids);
        history.repaired.push(repaired);
        if repaired {
            continue;
        }
        if shift < config.tol {
            break;
        }
    }

    // final assignment and inertia against the converged centroids
    let mut inertia = 0.0;
    let mut map = BTreeMap::new();
    for (i, point) in points.iter().enumerate() {
        let (best, d2) = nearest_centroid(point, &centroids);
        inertia += d2;
        map.insert(table.words[i].clone(), best);
    }
    Ok((
        ClusterModel {
            k,
            dim: table.dim,
            centroids,
            assignment: map,
            inertia,
        },
        history,
    ))
}

fn plus_plus_init(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let first = rng.gen_range(0..n);
    let mut chosen = vec![first];
    let mut d2: Vec<f64> = points.iter().map(|p| dist2(p, &points[first])).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let target = rng.gen::<f64>() * total;
            let mut cum = 0.0;
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                cum += w;
                if cum > target {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            // every point coincides with a chosen centroid; take the lowest
            // index not yet chosen
            (0..n).find(|i| !chosen.contains(i)).unwrap()
        };
        chosen.push(next);
        for (i, point) in points.iter().enumerate() {
            let d = dist2(point, &points[next]);
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }
    chosen.into_iter().map(|i| points[i].clone()).collect()
}

pub(crate) fn nearest_centroid(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = 0;
    let mut best_d2 = f64::INFINITY;
    for (c, centroid) in centroids.iter().enumerate() {
        let d2 = dist2(point, centroid);
        if d2 < best_d2 {
            best_d2 = d2;
            best = c;
        }
    }
    (best, best_d2)
}

/// Moves each empty cluster's centroid onto the point farthest from its own
/// centroid (ties to the lowest point index). Returns whether any repair ran.
pub(crate) fn repair_empty_clusters(
    points: &[Vec<f64>],
    assignment: &[usize],
    counts: &[usize],
    centroids: &mut [Vec<f64>],
) -> bool {
    let mut repaired = false;
    let mut taken: Vec<usize> = Vec::new();
    for c in 0..centroids.len() {
        if counts[c] > 0 {
            continue;
        }
        let mut worst: Option<(usize, f64)> = None;
        for (i, point) in points.iter().enumerate() {
            if taken.contains(&i) {
                continue;
            }
            let d2 = dist2(point, &centroids[assignment[i]]);
            let better = match worst {
                None => true,
                Some((_, w)) => d2 > w,
            };
            if better {
                worst = Some((i, d2));
            }
        }
        if let Some((i, _)) = worst {
            centroids[c] = points[i].clone();
            taken.push(i);
            repaired = true;
        }
    }
    repaired
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl ClusterModel {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn inertia(&self) -> f64 {
        self.inertia
    }

    pub fn centroids(&self) -> &[Vec<f64>] {
        &self.centroids
    }

    pub fn assignment(&self) -> &BTreeMap<String, usize> {
        &self.assignment
    }

    pub fn cluster_of(&self, word: &str) -> Option<usize> {
        self.assignment.get(word).copied()
    }

    pub fn to_json_bytes(&self) -> Vec<u8> {
        let file = ModelFile {
            format: MODEL_FORMAT.to_string(),
            k: self.k,
            dim: self.dim,
            centroids: self.centroids.clone(),
            assignment: self.assignment.clone(),
            inertia: self.inertia,
        };
        let mut bytes = serde_json::to_vec(&file).expect("cluster model serialization");
        bytes.push(b'\n');
        bytes
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_json_bytes())
    }

    pub fn load(path: &Path) -> Result<ClusterModel> {
        let text = read_to_string(path)?;
        let file: ModelFile = serde_json::from_str(&text).map_err(|e| Error::Json {
            line: e.line(),
            msg: e.to_string(),
        })?;
        if file.format != MODEL_FORMAT {
            return Err(Error::Invalid(format!(
                "unsupported cluster model format {:?}",
                file.format
            )));
        }
        if file.centroids.len() != file.k
            || file.centroids.iter().any(|c| c.len() != file.dim)
            || file.assignment.values().any(|&c| c >= file.k)
        {
            return Err(Error::Invalid("cluster model has inconsistent shape".into()));
        }
        Ok(ClusterModel {
            k: file.k,
            dim: file.dim,
            centroids: file.centroids,
            assignment: file.assignment,
            inertia: file.inertia,
        })
    }
}

const MODEL_FORMAT: &str = "cluster-model/v1";

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    k: usize,
    dim: usize,
    centroids: Vec<Vec<f64>>,
    assignment: BTreeMap<String, usize>,
    inertia: f64,
}
