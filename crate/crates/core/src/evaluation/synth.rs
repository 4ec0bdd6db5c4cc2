//! Synthetic corpus generator. Each annotation channel samples from a
//! class-conditional distribution interpolated between a shared base and a
//! class-specific skew: `p = (1 - s) * base + s * skew`. At strength 0 the two
//! classes are generated from identical distributions; at strength 1 every
//! channel separates them strongly.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{
    BeliefTag, Corpus, Document, Label, Sentence, SentimentLevel, SentimentPhrase, Token,
};
use crate::embeddings::VectorTable;
use crate::error::{Error, Result};

/// Per-channel separation strengths, each in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthStrengths {
    /// POS tags, dependency relations, and frame labels.
    pub tag: f64,
    /// Word choice, which drives topic and cluster features.
    pub topic: f64,
    /// Sentence sentiment levels and phrase intensities.
    pub sentiment: f64,
    /// Belief commitment tags.
    pub belief: f64,
}

impl SynthStrengths {
    pub fn uniform(s: f64) -> SynthStrengths {
        SynthStrengths {
            tag: s,
            topic: s,
            sentiment: s,
            belief: s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub docs_per_class: usize,
    /// Inclusive sentence-count range per document.
    pub sentences_range: (usize, usize),
    /// Inclusive token-count range per sentence.
    pub tokens_range: (usize, usize),
    pub strengths: SynthStrengths,
    pub seed: u64,
}

impl SynthConfig {
    pub fn new(docs_per_class: usize, strength: f64, seed: u64) -> SynthConfig {
        SynthConfig {
            docs_per_class,
            sentences_range: (3, 8),
            tokens_range: (5, 12),
            strengths: SynthStrengths::uniform(strength),
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.docs_per_class == 0 {
            return Err(Error::Config("docs_per_class must be positive".into()));
        }
        for (name, s) in [
            ("tag", self.strengths.tag),
            ("topic", self.strengths.topic),
            ("sentiment", self.strengths.sentiment),
            ("belief", self.strengths.belief),
        ] {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::Config(format!(
                    "{name} strength {s} outside [0, 1]"
                )));
            }
        }
        for (name, (lo, hi)) in [
            ("sentence", self.sentences_range),
            ("token", self.tokens_range),
        ] {
            if lo == 0 || lo > hi {
                return Err(Error::Config(format!(
                    "{name} range {lo}..={hi} is empty or starts at zero"
                )));
            }
        }
        Ok(())
    }
}

pub const POS_TAGS: [&str; 12] = [
    "NN", "VB", "DT", "JJ", "RB", "PRP", "IN", "FW", "LS", "RP", "CD", "CC",
];
const POS_BASE: [f64; 12] = [
    0.22, 0.18, 0.12, 0.10, 0.08, 0.08, 0.10, 0.03, 0.03, 0.03, 0.015, 0.015,
];
// patients lean on foreign words, list markers, and particles
const POS_PATIENT: [f64; 12] = [
    0.16, 0.14, 0.08, 0.06, 0.10, 0.06, 0.04, 0.12, 0.12, 0.10, 0.01, 0.01,
];
const POS_CONTROL: [f64; 12] = [
    0.20, 0.16, 0.18, 0.16, 0.04, 0.08, 0.14, 0.005, 0.005, 0.01, 0.015, 0.005,
];

pub const DEPRELS: [&str; 9] = [
    "nsubj", "obj", "det", "advmod", "amod", "case", "conj", "mark", "nmod",
];
const DEP_BASE: [f64; 9] = [0.14, 0.12, 0.14, 0.10, 0.12, 0.12, 0.10, 0.08, 0.08];
const DEP_PATIENT: [f64; 9] = [0.10, 0.08, 0.08, 0.30, 0.06, 0.04, 0.14, 0.16, 0.04];
const DEP_CONTROL: [f64; 9] = [0.10, 0.08, 0.22, 0.02, 0.20, 0.18, 0.04, 0.02, 0.14];

pub const FRAMES: [&str; 8] = [
    "Event",
    "Quantity",
    "Motion",
    "Communication",
    "Emotion",
    "Perception",
    "Catastrophe",
    "Certainty",
];
const FRAME_BASE: [f64; 8] = [0.125; 8];
const FRAME_PATIENT: [f64; 8] = [0.05, 0.05, 0.05, 0.05, 0.22, 0.20, 0.25, 0.13];
const FRAME_CONTROL: [f64; 8] = [0.22, 0.20, 0.20, 0.18, 0.05, 0.05, 0.02, 0.08];

const BELIEF_BASE: [f64; 4] = [0.25; 4];
// patients commit to more of their statements; the full-strength tables are
// nearly disjoint so that a handful of sentences per document still separates
const BELIEF_PATIENT: [f64; 4] = [0.76, 0.08, 0.04, 0.12];
const BELIEF_CONTROL: [f64; 4] = [0.04, 0.42, 0.36, 0.18];

const LEVEL_BASE: [f64; 5] = [0.10, 0.20, 0.40, 0.20, 0.10];
const LEVEL_PATIENT: [f64; 5] = [0.35, 0.35, 0.20, 0.07, 0.03];
const LEVEL_CONTROL: [f64; 5] = [0.03, 0.07, 0.30, 0.38, 0.22];

pub const CONTROL_WORDS: [&str; 16] = [
    "church", "sunday", "family", "walk", "coffee", "garden", "friend", "dinner", "morning",
    "school", "music", "game", "summer", "beach", "team", "neighbor",
];
pub const PATIENT_WORDS: [&str; 16] = [
    "trust", "upset", "lie", "fear", "voice", "watch", "control", "threat", "alone", "secret",
    "doubt", "strange", "follow", "signal", "hidden", "worry",
];
pub const SHARED_WORDS: [&str; 20] = [
    "time", "day", "thing", "people", "home", "work", "life", "week", "place", "room", "door",
    "city", "street", "house", "hand", "word", "way", "year", "light", "night",
];

// word-group mixture: shared / control-themed / patient-themed
const GROUP_BASE: [f64; 3] = [0.40, 0.30, 0.30];
const GROUP_PATIENT: [f64; 3] = [0.30, 0.10, 0.60];
const GROUP_CONTROL: [f64; 3] = [0.30, 0.60, 0.10];

/// Every surface the generator can emit, in vector-table order.
pub fn lexicon() -> Vec<&'static str> {
    CONTROL_WORDS
        .iter()
        .chain(PATIENT_WORDS.iter())
        .chain(SHARED_WORDS.iter())
        .copied()
        .collect()
}

fn interpolate(base: &[f64], skew: &[f64], s: f64) -> Vec<f64> {
    base.iter()
        .zip(skew)
        .map(|(b, k)| (1.0 - s) * b + s * k)
        .collect()
}

fn sample(probs: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = probs.iter().sum();
    let mut draw = rng.gen_range(0.0..total);
    for (i, p) in probs.iter().enumerate() {
        if draw < *p {
            return i;
        }
        draw -= p;
    }
    probs.len() - 1
}

struct ClassTables {
    group: Vec<f64>,
    pos: Vec<f64>,
    dep: Vec<f64>,
    frame: Vec<f64>,
    belief: Vec<f64>,
    level: Vec<f64>,
}

impl ClassTables {
    fn build(label: Label, s: &SynthStrengths) -> ClassTables {
        let (group, pos, dep, frame, belief, level) = match label {
            Label::Patient => (
                &GROUP_PATIENT[..],
                &POS_PATIENT[..],
                &DEP_PATIENT[..],
                &FRAME_PATIENT[..],
                &BELIEF_PATIENT[..],
                &LEVEL_PATIENT[..],
            ),
            Label::Control => (
                &GROUP_CONTROL[..],
                &POS_CONTROL[..],
                &DEP_CONTROL[..],
                &FRAME_CONTROL[..],
                &BELIEF_CONTROL[..],
                &LEVEL_CONTROL[..],
            ),
        };
        ClassTables {
            group: interpolate(&GROUP_BASE, group, s.topic),
            pos: interpolate(&POS_BASE, pos, s.tag),
            dep: interpolate(&DEP_BASE, dep, s.tag),
            frame: interpolate(&FRAME_BASE, frame, s.tag),
            belief: interpolate(&BELIEF_BASE, belief, s.belief),
            level: interpolate(&LEVEL_BASE, level, s.sentiment),
        }
    }
}

fn intensity_for(level: SentimentLevel, rng: &mut ChaCha8Rng) -> f64 {
    match level {
        SentimentLevel::VeryNegative | SentimentLevel::VeryPositive => rng.gen_range(0.6..1.0),
        SentimentLevel::Negative | SentimentLevel::Positive => rng.gen_range(0.2..0.6),
        SentimentLevel::Neutral => rng.gen_range(0.0..0.2),
    }
}

fn generate_document(
    id: String,
    label: Label,
    tables: &ClassTables,
    config: &SynthConfig,
    rng: &mut ChaCha8Rng,
) -> Document {
    let n_sentences = rng.gen_range(config.sentences_range.0..=config.sentences_range.1);
    let mut sentences = Vec::with_capacity(n_sentences);
    let mut frames = Vec::new();
    let mut beliefs = Vec::new();
    for _ in 0..n_sentences {
        let n_tokens = rng.gen_range(config.tokens_range.0..=config.tokens_range.1);
        let mut tokens = Vec::with_capacity(n_tokens);
        for t in 0..n_tokens {
            let surface = match sample(&tables.group, rng) {
                0 => SHARED_WORDS[rng.gen_range(0..SHARED_WORDS.len())],
                1 => CONTROL_WORDS[rng.gen_range(0..CONTROL_WORDS.len())],
                _ => PATIENT_WORDS[rng.gen_range(0..PATIENT_WORDS.len())],
            };
            let pos = POS_TAGS[sample(&tables.pos, rng)];
            let (head, deprel) = if t == 0 {
                (0, "root".to_string())
            } else {
                (t, DEPRELS[sample(&tables.dep, rng)].to_string())
            };
            tokens.push(Token {
                surface: surface.to_string(),
                pos: Some(pos.to_string()),
                head: Some(head),
                deprel: Some(deprel),
            });
        }
        let sentiment = SentimentLevel::ALL[sample(&tables.level, rng)];
        let n_phrases = rng.gen_range(1..=2);
        let mut phrases = Vec::with_capacity(n_phrases);
        for _ in 0..n_phrases {
            let level = SentimentLevel::ALL[sample(&tables.level, rng)];
            phrases.push(SentimentPhrase {
                level,
                intensity: intensity_for(level, rng),
            });
        }
        beliefs.push(BeliefTag::ALL[sample(&tables.belief, rng)]);
        frames.push(FRAMES[sample(&tables.frame, rng)].to_string());
        sentences.push(Sentence {
            tokens,
            sentiment: Some(sentiment),
            phrases,
        });
    }
    frames.sort();
    beliefs.sort();
    let text = sentences
        .iter()
        .map(|s| {
            s.tokens
                .iter()
                .map(|t| t.surface.as_str())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join(". ")
        + ".";
    Document {
        id,
        label,
        text,
        sentences,
        frames,
        beliefs,
    }
}

/// Generates a fully annotated corpus: patients first, then controls, one RNG
/// stream, so a fixed seed yields byte-identical output.
pub fn synth_corpus(config: &SynthConfig) -> Result<Corpus> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut documents = Vec::with_capacity(config.docs_per_class * 2);
    for label in [Label::Patient, Label::Control] {
        let tables = ClassTables::build(label, &config.strengths);
        for i in 0..config.docs_per_class {
            let id = format!("{}_{:04}", label.as_str(), i + 1);
            documents.push(generate_document(id, label, &tables, config, &mut rng));
        }
    }
    Ok(Corpus::new(documents))
}

/// Word vectors for the generator's lexicon: each word-group sits on its own
/// coordinate axis plus noise, so clustering recovers the groups for any seed.
pub fn synth_vectors(dim: usize, seed: u64) -> Result<VectorTable> {
    if dim < 6 {
        return Err(Error::Config(format!(
            "vector dimension {dim} too small; the lexicon spans 6 word groups"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = lexicon();
    let mut vectors = Vec::with_capacity(words.len());
    for (w, _) in words.iter().enumerate() {
        let group = if w < CONTROL_WORDS.len() {
            0
        } else if w < CONTROL_WORDS.len() + PATIENT_WORDS.len() {
            1
        } else {
            2 + (w - CONTROL_WORDS.len() - PATIENT_WORDS.len()) % 4
        };
        let mut v = vec![0.0; dim];
        v[group] = 1.0;
        for component in v.iter_mut() {
            *component += rng.gen_range(-0.1..0.1);
        }
        vectors.push(v);
    }
    VectorTable::from_pairs(
        words
            .into_iter()
            .map(|w| w.to_string())
            .zip(vectors)
            .collect(),
    )
}

// --- chi-square utilities for the exchangeability checks ---

fn ln_gamma(x: f64) -> f64 {
    // Lanczos approximation, g = 7
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let t = x + 7.5;
        let mut a = COEF[0];
        for (i, &c) in COEF.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
    }
}

/// Upper regularized incomplete gamma Q(a, x), via the series for P when
/// x < a + 1 and a continued fraction otherwise.
fn upper_gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let log_prefix = -x + a * x.ln() - ln_gamma(a);
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut n = a;
        for _ in 0..500 {
            n += 1.0;
            term *= x / n;
            sum += term;
            if term.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        1.0 - sum * log_prefix.exp()
    } else {
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        log_prefix.exp() * h
    }
}

/// Upper-tail p-value of a chi-square statistic.
pub fn chi_square_p_value(stat: f64, df: usize) -> f64 {
    upper_gamma_q(df as f64 / 2.0, stat / 2.0).clamp(0.0, 1.0)
}

/// Two-sample homogeneity statistic over category counts. Categories absent
/// from both samples are dropped. Returns `(statistic, degrees_of_freedom)`,
/// or None when fewer than two categories or an empty sample make the test
/// undefined.
pub fn chi_square_homogeneity(
    a: &BTreeMap<String, u64>,
    b: &BTreeMap<String, u64>,
) -> Option<(f64, usize)> {
    let categories: Vec<&String> = a.keys().chain(b.keys()).collect();
    let mut columns: Vec<(u64, u64)> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for key in categories {
        if !seen.insert(key.clone()) {
            continue;
        }
        let ca = a.get(key).copied().unwrap_or(0);
        let cb = b.get(key).copied().unwrap_or(0);
        if ca + cb > 0 {
            columns.push((ca, cb));
        }
    }
    let row_a: u64 = columns.iter().map(|c| c.0).sum();
    let row_b: u64 = columns.iter().map(|c| c.1).sum();
    if columns.len() < 2 || row_a == 0 || row_b == 0 {
        return None;
    }
    let grand = (row_a + row_b) as f64;
    let mut stat = 0.0;
    for (ca, cb) in &columns {
        let col = (ca + cb) as f64;
        for (observed, row) in [(*ca as f64, row_a as f64), (*cb as f64, row_b as f64)] {
            let expected = row * col / grand;
            stat += (observed - expected).powi(2) / expected;
        }
    }
    Some((stat, columns.len() - 1))
}

/// POS-tag counts of one class, for the exchangeability tests.
pub fn pos_counts(corpus: &Corpus, label: Label) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    for doc in corpus.documents.iter().filter(|d| d.label == label) {
        for token in doc.tokens() {
            if let Some(tag) = &token.pos {
                *counts.entry(tag.clone()).or_insert(0) += 1;
            }
        }
    }
    counts
}
