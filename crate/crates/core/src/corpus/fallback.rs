use std::collections::BTreeMap;
use std::path::Path;

use super::{Sentence, SentimentLevel, SentimentPhrase};
use crate::error::{Error, Result};
use crate::io::read_to_string;

/// Word-to-tag lookup for the fallback tagger, keyed by lowercased surface.
#[derive(Debug, Clone, Default)]
pub struct PosLexicon {
    entries: BTreeMap<String, String>,
}

impl PosLexicon {
    pub fn from_pairs<K: Into<String>, V: Into<String>>(
        pairs: impl IntoIterator<Item = (K, V)>,
    ) -> PosLexicon {
        PosLexicon {
            entries: pairs
                .into_iter()
                .map(|(k, v)| (k.into().to_lowercase(), v.into()))
                .collect(),
        }
    }

    pub fn get(&self, lowercased: &str) -> Option<&str> {
        self.entries.get(lowercased).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Loads a `word<TAB>tag` lexicon, one entry per line. Blank lines and `#`
/// comments are ignored.
pub fn load_pos_lexicon(path: &Path) -> Result<PosLexicon> {
    let content = read_to_string(path)?;
    let mut entries = BTreeMap::new();
    for (idx, line) in content.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (word, tag) = line.split_once('\t').ok_or_else(|| Error::Invalid(format!(
            "lexicon line {line_no}: expected word<TAB>tag"
        )))?;
        entries.insert(word.trim().to_lowercase(), tag.trim().to_string());
    }
    Ok(PosLexicon { entries })
}

/// Tags tokens with the deterministic fallback rules: the standalone
/// lowercase pronoun "i" is tagged `LS` (mirroring the behavior of the
/// reference tagger on informal writing), then lexicon lookup on the
/// lowercased surface, then suffix rules, then `NN`.
pub fn fallback_pos_tag(surfaces: &[&str], lexicon: &PosLexicon) -> Vec<String> {
    surfaces
        .iter()
        .map(|surface| tag_one(surface, lexicon))
        .collect()
}

fn tag_one(surface: &str, lexicon: &PosLexicon) -> String {
    if surface == "i" {
        return "LS".to_string();
    }
    let lowered = surface.to_lowercase();
    if let Some(tag) = lexicon.get(&lowered) {
        return tag.to_string();
    }
    if lowered.ends_with("ly") {
        return "RB".to_string();
    }
    if lowered.ends_with("ing") {
        return "VBG".to_string();
    }
    if lowered.ends_with("ed") {
        return "VBD".to_string();
    }
    if surface.chars().next().is_some_and(|c| c.is_uppercase()) {
        return "NNP".to_string();
    }
    if !surface.is_empty() && surface.chars().all(|c| c.is_ascii_digit()) {
        return "CD".to_string();
    }
    "NN".to_string()
}

/// Word-to-score lookup for the fallback sentiment annotator; scores are in
/// [-1, 1] and keyed by lowercased surface.
#[derive(Debug, Clone, Default)]
pub struct SentimentLexicon {
    entries: BTreeMap<String, f64>,
}

impl SentimentLexicon {
    pub fn from_pairs<K: Into<String>>(
        pairs: impl IntoIterator<Item = (K, f64)>,
    ) -> SentimentLexicon {
        SentimentLexicon {
            entries: pairs
                .into_iter()
                .map(|(k, v)| (k.into().to_lowercase(), v))
                .collect(),
        }
    }

    pub fn get(&self, lowercased: &str) -> Option<f64> {
        self.entries.get(lowercased).copied()
    }
}

/// Loads a `word<TAB>score` lexicon with scores in [-1, 1].
pub fn load_sentiment_lexicon(path: &Path) -> Result<SentimentLexicon> {
    let content = read_to_string(path)?;
    let mut entries = BTreeMap::new();
    for (idx, line) in content.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (word, raw) = line.split_once('\t').ok_or_else(|| Error::Invalid(format!(
            "lexicon line {line_no}: expected word<TAB>score"
        )))?;
        let score: f64 = raw.trim().parse().map_err(|_| {
            Error::Invalid(format!("lexicon line {line_no}: invalid score {raw:?}"))
        })?;
        if !(-1.0..=1.0).contains(&score) {
            return Err(Error::Invalid(format!(
                "lexicon line {line_no}: score {score} outside [-1, 1]"
            )));
        }
        entries.insert(word.trim().to_lowercase(), score);
    }
    Ok(SentimentLexicon { entries })
}

/// Scores one sentence with the fallback sentiment rules and writes the
/// result onto it. Maximal runs of consecutive lexicon-covered tokens form
/// phrases; a phrase's score is the mean of its token scores, its intensity
/// the absolute score. The sentence level comes from the mean of the phrase
/// scores, `Neutral` when there are no phrases.
pub fn lexicon_sentiment(sentence: &mut Sentence, lexicon: &SentimentLexicon) {
    let mut phrases: Vec<SentimentPhrase> = Vec::new();
    let mut phrase_scores: Vec<f64> = Vec::new();
    let mut run: Vec<f64> = Vec::new();
    let close_run = |run: &mut Vec<f64>,
                     phrases: &mut Vec<SentimentPhrase>,
                     phrase_scores: &mut Vec<f64>| {
        if run.is_empty() {
            return;
        }
        let score = run.iter().sum::<f64>() / run.len() as f64;
        phrases.push(SentimentPhrase {
            level: SentimentLevel::from_score(score),
            intensity: score.abs(),
        });
        phrase_scores.push(score);
        run.clear();
    };
    for token in &sentence.tokens {
        match lexicon.get(&token.surface.to_lowercase()) {
            Some(score) => run.push(score),
            None => close_run(&mut run, &mut phrases, &mut phrase_scores),
        }
    }
    close_run(&mut run, &mut phrases, &mut phrase_scores);

    sentence.sentiment = Some(if phrase_scores.is_empty() {
        SentimentLevel::Neutral
    } else {
        let mean = phrase_scores.iter().sum::<f64>() / phrase_scores.len() as f64;
        SentimentLevel::from_score(mean)
    });
    sentence.phrases = phrases;
}
