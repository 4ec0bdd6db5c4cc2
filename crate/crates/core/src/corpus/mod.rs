//! Document model and ingestion: raw JSONL corpora, dependency-parse files,
//! annotation sidecars, and the deterministic fallback annotators used when
//! no external annotations are available.

mod conllu;
mod fallback;
mod jsonl;
mod sidecar;
mod tokenize;

pub use conllu::{parse_conllu, write_conllu, PosColumn};
pub use fallback::{
    fallback_pos_tag, lexicon_sentiment, load_pos_lexicon, load_sentiment_lexicon, PosLexicon,
    SentimentLexicon,
};
pub use jsonl::{load_corpus, write_corpus};
pub use sidecar::attach_annotations;
pub use tokenize::tokenize;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{read_to_string, write_atomic};

/// Class label of a writing sample. `Patient` is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Patient,
    Control,
}

impl Label {
    /// Signed target used by the margin classifiers: +1 patient, -1 control.
    pub fn sign(self) -> f64 {
        match self {
            Label::Patient => 1.0,
            Label::Control => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Patient => "patient",
            Label::Control => "control",
        }
    }
}

/// Four-way belief commitment tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BeliefTag {
    #[serde(rename = "CB")]
    Cb,
    #[serde(rename = "NCB")]
    Ncb,
    #[serde(rename = "ROB")]
    Rob,
    #[serde(rename = "NA")]
    Na,
}

impl BeliefTag {
    pub const ALL: [BeliefTag; 4] = [BeliefTag::Cb, BeliefTag::Ncb, BeliefTag::Rob, BeliefTag::Na];

    pub fn as_str(self) -> &'static str {
        match self {
            BeliefTag::Cb => "CB",
            BeliefTag::Ncb => "NCB",
            BeliefTag::Rob => "ROB",
            BeliefTag::Na => "NA",
        }
    }

    pub fn parse(s: &str) -> Option<BeliefTag> {
        match s {
            "CB" => Some(BeliefTag::Cb),
            "NCB" => Some(BeliefTag::Ncb),
            "ROB" => Some(BeliefTag::Rob),
            "NA" => Some(BeliefTag::Na),
            _ => None,
        }
    }
}

/// Five-point sentiment scale, ordered most negative to most positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SentimentLevel {
    VeryNegative,
    Negative,
    Neutral,
    Positive,
    VeryPositive,
}

impl SentimentLevel {
    pub const ALL: [SentimentLevel; 5] = [
        SentimentLevel::VeryNegative,
        SentimentLevel::Negative,
        SentimentLevel::Neutral,
        SentimentLevel::Positive,
        SentimentLevel::VeryPositive,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SentimentLevel::VeryNegative => "very_negative",
            SentimentLevel::Negative => "negative",
            SentimentLevel::Neutral => "neutral",
            SentimentLevel::Positive => "positive",
            SentimentLevel::VeryPositive => "very_positive",
        }
    }

    pub fn parse(s: &str) -> Option<SentimentLevel> {
        SentimentLevel::ALL.iter().copied().find(|l| l.as_str() == s)
    }

    /// Maps a score in [-1, 1] onto the scale.
    pub fn from_score(score: f64) -> SentimentLevel {
        if score < -0.6 {
            SentimentLevel::VeryNegative
        } else if score < -0.2 {
            SentimentLevel::Negative
        } else if score <= 0.2 {
            SentimentLevel::Neutral
        } else if score <= 0.6 {
            SentimentLevel::Positive
        } else {
            SentimentLevel::VeryPositive
        }
    }
}

/// One token of a sentence. `head` is a 1-based index into the same sentence,
/// 0 meaning the syntactic root; it is never the token's own index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub head: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deprel: Option<String>,
}

impl Token {
    pub fn new(surface: impl Into<String>) -> Token {
        Token {
            surface: surface.into(),
            pos: None,
            head: None,
            deprel: None,
        }
    }
}

/// A scored sentiment phrase; intensity is the phrase's absolute strength in [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentPhrase {
    pub level: SentimentLevel,
    pub intensity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Sentence {
    pub tokens: Vec<Token>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentiment: Option<SentimentLevel>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub phrases: Vec<SentimentPhrase>,
}

impl Sentence {
    pub fn from_surfaces<S: Into<String>>(surfaces: impl IntoIterator<Item = S>) -> Sentence {
        Sentence {
            tokens: surfaces.into_iter().map(Token::new).collect(),
            sentiment: None,
            phrases: Vec::new(),
        }
    }
}

/// A writing sample with whatever annotation layers have been attached.
/// `frames` and `beliefs` are multisets kept in sorted order so that
/// serialization is canonical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub label: Label,
    pub text: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sentences: Vec<Sentence>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub frames: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub beliefs: Vec<BeliefTag>,
}

impl Document {
    pub fn new(id: impl Into<String>, label: Label, text: impl Into<String>) -> Document {
        Document {
            id: id.into(),
            label,
            text: text.into(),
            sentences: Vec::new(),
            frames: Vec::new(),
            beliefs: Vec::new(),
        }
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flat_map(|s| s.tokens.iter())
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(|s| s.tokens.len()).sum()
    }

    /// True when every token carries a part-of-speech tag.
    pub fn pos_complete(&self) -> bool {
        self.token_count() > 0 && self.tokens().all(|t| t.pos.is_some())
    }

    /// True when every token carries a dependency relation and head.
    pub fn dep_complete(&self) -> bool {
        self.token_count() > 0 && self.tokens().all(|t| t.deprel.is_some() && t.head.is_some())
    }

    /// True when every sentence carries a sentiment level.
    pub fn sentiment_complete(&self) -> bool {
        !self.sentences.is_empty() && self.sentences.iter().all(|s| s.sentiment.is_some())
    }
}

const STORE_FORMAT: &str = "corpus-store/v1";

#[derive(Serialize, Deserialize)]
struct StoreFile {
    format: String,
    documents: Vec<Document>,
}

/// An ordered collection of documents with unique ids.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Corpus {
    pub documents: Vec<Document>,
}

impl Corpus {
    pub fn new(documents: Vec<Document>) -> Corpus {
        Corpus { documents }
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// (patient count, control count)
    pub fn label_counts(&self) -> (usize, usize) {
        let patients = self
            .documents
            .iter()
            .filter(|d| d.label == Label::Patient)
            .count();
        (patients, self.documents.len() - patients)
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.id == id)
    }

    pub fn get_mut(&mut self, id: &str) -> Option<&mut Document> {
        self.documents.iter_mut().find(|d| d.id == id)
    }

    /// Index of every document id, for sidecar attachment.
    pub fn id_index(&self) -> BTreeMap<String, usize> {
        self.documents
            .iter()
            .enumerate()
            .map(|(i, d)| (d.id.clone(), i))
            .collect()
    }

    /// Checks the preconditions shared by training and evaluation: a
    /// non-empty corpus, both classes present, and at least one token per
    /// document.
    pub fn validate_for_training(&self) -> Result<()> {
        if self.documents.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let (patients, controls) = self.label_counts();
        if patients == 0 {
            return Err(Error::MissingClass("patient"));
        }
        if controls == 0 {
            return Err(Error::MissingClass("control"));
        }
        for doc in &self.documents {
            if doc.token_count() == 0 {
                return Err(Error::BadAnnotation {
                    id: doc.id.clone(),
                    msg: "document has no tokens".into(),
                });
            }
        }
        Ok(())
    }

    /// Serializes the annotated corpus to its on-disk store format.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = StoreFile {
            format: STORE_FORMAT.to_string(),
            documents: self.documents.clone(),
        };
        let mut bytes = serde_json::to_vec_pretty(&file).expect("corpus serialization");
        bytes.push(b'\n');
        write_atomic(path, &bytes)
    }

    pub fn load(path: &Path) -> Result<Corpus> {
        let text = read_to_string(path)?;
        let file: StoreFile = serde_json::from_str(&text).map_err(|e| Error::Json {
            line: e.line(),
            msg: e.to_string(),
        })?;
        if file.format != STORE_FORMAT {
            return Err(Error::Invalid(format!(
                "unsupported corpus store format {:?}",
                file.format
            )));
        }
        let corpus = Corpus::new(file.documents);
        let mut seen = BTreeMap::new();
        for (i, doc) in corpus.documents.iter().enumerate() {
            if let Some(prev) = seen.insert(doc.id.clone(), i) {
                return Err(Error::DuplicateId {
                    id: corpus.documents[prev].id.clone(),
                    line: 0,
                });
            }
        }
        Ok(corpus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sentiment_scale_thresholds() {
        assert_eq!(SentimentLevel::from_score(-0.7), SentimentLevel::VeryNegative);
        assert_eq!(SentimentLevel::from_score(-0.6), SentimentLevel::Negative);
        assert_eq!(SentimentLevel::from_score(-0.2), SentimentLevel::Neutral);
        assert_eq!(SentimentLevel::from_score(0.0), SentimentLevel::Neutral);
        assert_eq!(SentimentLevel::from_score(0.2), SentimentLevel::Neutral);
        assert_eq!(SentimentLevel::from_score(0.5), SentimentLevel::Positive);
        assert_eq!(SentimentLevel::from_score(0.61), SentimentLevel::VeryPositive);
    }

    #[test]
    fn label_signs() {
        assert_eq!(Label::Patient.sign(), 1.0);
        assert_eq!(Label::Control.sign(), -1.0);
    }

    #[test]
    fn store_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("store.json");
        let mut doc = Document::new("d1", Label::Patient, "A day.");
        doc.sentences = tokenize("A day.");
        doc.frames = vec!["Quantity".into()];
        doc.beliefs = vec![BeliefTag::Cb, BeliefTag::Na];
        let corpus = Corpus::new(vec![doc, Document::new("d2", Label::Control, "x")]);
        corpus.save(&path).unwrap();
        let back = Corpus::load(&path).unwrap();
        assert_eq!(back, corpus);
    }

    #[test]
    fn training_validation_requires_both_classes() {
        let mut doc = Document::new("a", Label::Patient, "hi");
        doc.sentences = tokenize("hi");
        let corpus = Corpus::new(vec![doc]);
        let err = corpus.validate_for_training().unwrap_err();
        assert!(err.to_string().contains("control"), "{err}");
    }
}
