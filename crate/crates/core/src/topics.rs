//! Latent topic model trained by collapsed Gibbs sampling. Tokens are
//! lowercased, stopworded, and pruned to a minimum document frequency of 2;
//! document mixtures are recovered by resampling against the frozen
//! topic-word counts and averaging the post-burn-in states.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document};
use crate::error::{Error, Result};
use crate::io::{read_to_string, write_atomic};

/// Common function words excluded from the topic vocabulary.
const STOPWORDS: &[&str] = &[
    "a", "about", "after", "all", "also", "an", "and", "any", "are", "as", "at", "be", "because",
    "been", "before", "being", "but", "by", "can", "could", "did", "do", "does", "doing", "down",
    "for", "from", "had", "has", "have", "he", "her", "here", "him", "his", "how", "i", "if",
    "in", "into", "is", "it", "its", "just", "me", "more", "most", "my", "no", "not", "now", "of",
    "off", "on", "once", "only", "or", "our", "out", "over", "she", "so", "some", "such", "than",
    "that", "the", "their", "them", "then", "there", "these", "they", "this", "those", "through",
    "to", "too", "under", "until", "up", "very", "was", "we", "were", "what", "when", "where",
    "which", "while", "who", "why", "will", "with", "would", "you", "your",
];

const MIN_DOC_FREQ: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdaConfig {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
}

impl LdaConfig {
    /// Defaults: `alpha` = 5.0 / K, `beta` = 0.01, 1000 sweeps with a 200
    /// sweep burn-in.
    pub fn new(k: usize, seed: u64) -> LdaConfig {
        LdaConfig {
            k,
            alpha: 5.0 / k.max(1) as f64,
            beta: 0.01,
            iterations: 1000,
            burn_in: 200,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::Config("topic count must be at least 1".into()));
        }
        if self.alpha <= 0.0 || self.beta <= 0.0 {
            return Err(Error::Config("alpha and beta must be positive".into()));
        }
        if self.iterations <= self.burn_in {
            return Err(Error::Config(format!(
                "iterations ({}) must exceed burn-in ({})",
                self.iterations, self.burn_in
            )));
        }
        Ok(())
    }
}

/// A fitted topic model: the vocabulary plus the final topic-word counts of
/// the Gibbs chain.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicModel {
    vocabulary: Vec<String>,
    /// word-major counts, `[w * k + topic]`
    word_topic: Vec<u32>,
    topic_totals: Vec<u64>,
    config: LdaConfig,
    word_index: HashMap<String, usize>,
}

/// Result of mixture inference for one document.
#[derive(Debug, Clone, PartialEq)]
pub struct Inferred {
    pub theta: Vec<f64>,
    /// True when the document had no in-vocabulary token and the mixture
    /// fell back to uniform.
    pub uniform_fallback: bool,
}

/// True for tokens the vocabulary considers: at least one alphabetic
/// character and not a stopword once lowercased.
fn vocab_token(lowered: &str) -> bool {
    lowered.chars().any(|c| c.is_alphabetic()) && !STOPWORDS.contains(&lowered)
}

/// Lowercased, stopword-filtered, in-order token stream of a document.
fn doc_terms(doc: &Document) -> Vec<String> {
    doc.tokens()
        .map(|t| t.surface.to_lowercase())
        .filter(|t| vocab_token(t))
        .collect()
}

/// Builds the sorted vocabulary: every surviving term that appears in at
/// least [`MIN_DOC_FREQ`] distinct documents.
pub fn build_vocabulary(corpus: &Corpus) -> Vec<String> {
    build_vocabulary_docs(&corpus.documents.iter().collect::<Vec<_>>())
}

/// Vocabulary over an explicit document set, e.g. the training side of a fold.
pub fn build_vocabulary_docs(docs: &[&Document]) -> Vec<String> {
    let mut doc_freq: BTreeMap<String, usize> = BTreeMap::new();
    for doc in docs {
        let mut seen = std::collections::BTreeSet::new();
        for term in doc_terms(doc) {
            seen.insert(term);
        }
        for term in seen {
            *doc_freq.entry(term).or_insert(0) += 1;
        }
    }
    doc_freq
        .into_iter()
        .filter(|(_, df)| *df >= MIN_DOC_FREQ)
        .map(|(term, _)| term)
        .collect()
}

/// Trains a topic model on the corpus with collapsed Gibbs sampling. The
/// chain visits documents and tokens in corpus order, so a fixed seed fully
/// determines the result.
pub fn train_lda(corpus: &Corpus, config: &LdaConfig) -> Result<TopicModel> {
    train_lda_docs(&corpus.documents.iter().collect::<Vec<_>>(), config)
}

/// [`train_lda`] over an explicit document set.
pub fn train_lda_docs(input: &[&Document], config: &LdaConfig) -> Result<TopicModel> {
    train_lda_docs_observed(input, config, &mut |_| {})
}

/// Snapshot of the sampler counts handed to the observer after each sweep.
/// Sweep 0 is the state right after random initialization; sweep `i` the
/// state after the i-th full pass over the corpus.
pub struct SweepCounts<'a> {
    pub sweep: usize,
    pub k: usize,
    /// Kept tokens per document, after vocabulary filtering.
    pub doc_lengths: &'a [usize],
    pub doc_topic: &'a [Vec<u32>],
    /// Word-major `v * k` topic counts.
    pub word_topic: &'a [u32],
    pub topic_totals: &'a [u64],
}

/// [`train_lda_docs`] with a per-sweep observer, used to audit sampler
/// invariants such as count conservation.
pub fn train_lda_docs_observed(
    input: &[&Document],
    config: &LdaConfig,
    observe: &mut dyn FnMut(&SweepCounts),
) -> Result<TopicModel> {
    config.validate()?;
    let vocabulary = build_vocabulary_docs(input);
    if vocabulary.is_empty() {
        return Err(Error::Config(
            "empty vocabulary: no term passes the frequency threshold".into(),
        ));
    }
    let word_index: HashMap<String, usize> = vocabulary
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i))
        .collect();
    let docs: Vec<Vec<usize>> = input
        .iter()
        .map(|doc| {
            doc_terms(doc)
                .into_iter()
                .filter_map(|t| word_index.get(&t).copied())
                .collect()
        })
        .collect();
    let total_tokens: usize = docs.iter().map(Vec::len).sum();
    let k = config.k;
    if k > total_tokens {
        return Err(Error::Config(format!(
            "topic count {k} exceeds the {total_tokens} token occurrences in the corpus"
        )));
    }
    let v = vocabulary.len();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut word_topic = vec![0u32; v * k];
    let mut doc_topic: Vec<Vec<u32>> = docs.iter().map(|_| vec![0u32; k]).collect();
    let mut topic_totals = vec![0u64; k];
    let mut assignments: Vec<Vec<u32>> = Vec::with_capacity(docs.len());
    for (d, tokens) in docs.iter().enumerate() {
        let mut z_doc = Vec::with_capacity(tokens.len());
        for &w in tokens {
            let z = rng.gen_range(0..k);
            word_topic[w * k + z] += 1;
            doc_topic[d][z] += 1;
            topic_totals[z] += 1;
            z_doc.push(z as u32);
        }
        assignments.push(z_doc);
    }

    let alpha = config.alpha;
    let beta = config.beta;
    let v_beta = v as f64 * beta;
    let doc_lengths: Vec<usize> = docs.iter().map(Vec::len).collect();
    observe(&SweepCounts {
        sweep: 0,
        k,
        doc_lengths: &doc_lengths,
        doc_topic: &doc_topic,
        word_topic: &word_topic,
        topic_totals: &topic_totals,
    });
    let mut weights = vec![0.0f64; k];
    for sweep in 0..config.iterations {
        for (d, tokens) in docs.iter().enumerate() {
            for (t, &w) in tokens.iter().enumerate() {
                let old = assignments[d][t] as usize;
                word_topic[w * k + old] -= 1;
                doc_topic[d][old] -= 1;
                topic_totals[old] -= 1;
                for (topic, weight) in weights.iter_mut().enumerate() {
                    *weight = (doc_topic[d][topic] as f64 + alpha)
                        * (word_topic[w * k + topic] as f64 + beta)
                        / (topic_totals[topic] as f64 + v_beta);
                }
                let new = sample_discrete(&weights, &mut rng);
                word_topic[w * k + new] += 1;
                doc_topic[d][new] += 1;
                topic_totals[new] += 1;
                assignments[d][t] = new as u32;
            }
        }
        #[cfg(debug_assertions)]
        check_conservation(&docs, &doc_topic, &word_topic, &topic_totals, k);
        observe(&SweepCounts {
            sweep: sweep + 1,
            k,
            doc_lengths: &doc_lengths,
            doc_topic: &doc_topic,
            word_topic: &word_topic,
            topic_totals: &topic_totals,
        });
    }

    Ok(TopicModel {
        vocabulary,
        word_topic,
        topic_totals,
        config: *config,
        word_index,
    })
}

#[cfg(debug_assertions)]
fn check_conservation(
    docs: &[Vec<usize>],
    doc_topic: &[Vec<u32>],
    word_topic: &[u32],
    topic_totals: &[u64],
    k: usize,
) {
    for (d, tokens) in docs.iter().enumerate() {
        let sum: u32 = doc_topic[d].iter().sum();
        assert_eq!(
            sum as usize,
            tokens.len(),
            "doc {d}: topic counts do not sum to document length"
        );
    }
    let from_words: u64 = word_topic.iter().map(|&c| c as u64).sum();
    let from_totals: u64 = topic_totals.iter().sum();
    assert_eq!(from_words, from_totals, "topic totals drifted from word counts");
    for topic in 0..k {
        let col: u64 = word_topic
            .iter()
            .skip(topic)
            .step_by(k)
            .map(|&c| c as u64)
            .sum();
        assert_eq!(col, topic_totals[topic], "topic {topic} total drifted");
    }
}

fn sample_discrete(weights: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let mut target = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        target -= w;
        if target < 0.0 {
            return i;
        }
    }
    weights.len() - 1
}

impl TopicModel {
    pub fn k(&self) -> usize {
        self.config.k
    }

    pub fn config(&self) -> &LdaConfig {
        &self.config
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    /// Smoothed word distribution of one topic; sums to 1.
    pub fn phi(&self, topic: usize) -> Vec<f64> {
        let v = self.vocabulary.len();
        let denom = self.topic_totals[topic] as f64 + v as f64 * self.config.beta;
        (0..v)
            .map(|w| (self.word_topic[w * self.config.k + topic] as f64 + self.config.beta) / denom)
            .collect()
    }

    /// The `n` highest-probability words of a topic, probability descending
    /// with lexicographic tie-breaks.
    pub fn top_words(&self, topic: usize, n: usize) -> Vec<(String, f64)> {
        let phi = self.phi(topic);
        let mut pairs: Vec<(String, f64)> = self
            .vocabulary
            .iter()
            .cloned()
            .zip(phi)
            .collect();
        pairs.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
        pairs.truncate(n);
        pairs
    }

    /// Infers the topic mixture of a document against the frozen topic-word
    /// counts. Documents with no in-vocabulary token get the uniform mixture
    /// and are flagged.
    pub fn infer(&self, doc: &Document) -> Inferred {
        let tokens: Vec<usize> = doc_terms(doc)
            .into_iter()
            .filter_map(|t| self.word_index.get(&t).copied())
            .collect();
        let k = self.config.k;
        if tokens.is_empty() {
            return Inferred {
                theta: vec![1.0 / k as f64; k],
                uniform_fallback: true,
            };
        }
        let alpha = self.config.alpha;
        let beta = self.config.beta;
        let v_beta = self.vocabulary.len() as f64 * beta;
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        let mut doc_topic = vec![0u32; k];
        let mut z: Vec<usize> = Vec::with_capacity(tokens.len());
        for _ in &tokens {
            let topic = rng.gen_range(0..k);
            doc_topic[topic] += 1;
            z.push(topic);
        }
        let n_d = tokens.len() as f64;
        let mut theta_acc = vec![0.0f64; k];
        let mut kept = 0usize;
        let mut weights = vec![0.0f64; k];
        for sweep in 0..self.config.iterations {
            for (t, &w) in tokens.iter().enumerate() {
                let old = z[t];
                doc_topic[old] -= 1;
                for (topic, weight) in weights.iter_mut().enumerate() {
                    *weight = (doc_topic[topic] as f64 + alpha)
                        * (self.word_topic[w * k + topic] as f64 + beta)
                        / (self.topic_totals[topic] as f64 + v_beta);
                }
                let new = sample_discrete(&weights, &mut rng);
                doc_topic[new] += 1;
                z[t] = new;
            }
            if sweep >= self.config.burn_in {
                let denom = n_d + k as f64 * alpha;
                for topic in 0..k {
                    theta_acc[topic] += (doc_topic[topic] as f64 + alpha) / denom;
                }
                kept += 1;
            }
        }
        let theta: Vec<f64> = theta_acc.into_iter().map(|s| s / kept as f64).collect();
        Inferred {
            theta,
            uniform_fallback: false,
        }
    }

    pub fn to_json_bytes(&self) -> Vec<u8> {
        let k = self.config.k;
        let v = self.vocabulary.len();
        let topic_word_counts: Vec<Vec<u32>> = (0..k)
            .map(|topic| (0..v).map(|w| self.word_topic[w * k + topic]).collect())
            .collect();
        let file = ModelFile {
            format: MODEL_FORMAT.to_string(),
            config: self.config,
            vocabulary: self.vocabulary.clone(),
            topic_word_counts,
            topic_totals: self.topic_totals.clone(),
        };
        let mut bytes = serde_json::to_vec(&file).expect("topic model serialization");
        bytes.push(b'\n');
        bytes
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_json_bytes())
    }

    pub fn load(path: &Path) -> Result<TopicModel> {
        let text = read_to_string(path)?;
        let file: ModelFile = serde_json::from_str(&text).map_err(|e| Error::Json {
            line: e.line(),
            msg: e.to_string(),
        })?;
        if file.format != MODEL_FORMAT {
            return Err(Error::Invalid(format!(
                "unsupported topic model format {:?}",
                file.format
            )));
        }
        let k = file.config.k;
        let v = file.vocabulary.len();
        if file.topic_word_counts.len() != k
            || file.topic_word_counts.iter().any(|row| row.len() != v)
            || file.topic_totals.len() != k
        {
            return Err(Error::Invalid("topic model counts have wrong shape".into()));
        }
        let mut word_topic = vec![0u32; v * k];
        for (topic, row) in file.topic_word_counts.iter().enumerate() {
            for (w, &count) in row.iter().enumerate() {
                word_topic[w * k + topic] = count;
            }
        }
        let word_index = file
            .vocabulary
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        Ok(TopicModel {
            vocabulary: file.vocabulary,
            word_topic,
            topic_totals: file.topic_totals,
            config: file.config,
            word_index,
        })
    }
}

const MODEL_FORMAT: &str = "topic-model/v1";

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    config: LdaConfig,
    vocabulary: Vec<String>,
    topic_word_counts: Vec<Vec<u32>>,
    topic_totals: Vec<u64>,
}
