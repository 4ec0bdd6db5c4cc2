use std::path::Path;

use serde::Deserialize;

use super::{BeliefTag, Corpus, SentimentLevel, SentimentPhrase};
use crate::error::{Error, Result};
use crate::io::read_to_string;

#[derive(Deserialize)]
struct SidecarRecord {
    id: String,
    #[serde(default)]
    frames: Option<Vec<String>>,
    #[serde(default)]
    belief: Option<Vec<String>>,
    #[serde(default)]
    sentences: Option<Vec<SidecarSentence>>,
}

#[derive(Deserialize)]
struct SidecarSentence {
    level: String,
    #[serde(default)]
    phrases: Vec<SidecarPhrase>,
}

#[derive(Deserialize)]
struct SidecarPhrase {
    level: String,
    intensity: f64,
}

/// Applies an annotation sidecar (JSONL keyed by document id) to a corpus.
/// Each record overwrites exactly the layers it carries: `frames`, `belief`,
/// and per-sentence sentiment under `sentences`. Sentence entries are applied
/// positionally and must match the document's sentence count.
pub fn attach_annotations(corpus: &mut Corpus, path: &Path) -> Result<()> {
    let content = read_to_string(path)?;
    attach_annotations_str(corpus, &content)
}

pub fn attach_annotations_str(corpus: &mut Corpus, content: &str) -> Result<()> {
    for (idx, line) in content.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: SidecarRecord = serde_json::from_str(line).map_err(|e| Error::Json {
            line: line_no,
            msg: e.to_string(),
        })?;
        let doc = corpus
            .get_mut(&record.id)
            .ok_or_else(|| Error::UnknownDocId {
                id: record.id.clone(),
            })?;
        if let Some(frames) = record.frames {
            let mut frames = frames;
            frames.sort();
            doc.frames = frames;
        }
        if let Some(belief) = record.belief {
            let mut tags = Vec::with_capacity(belief.len());
            for raw in &belief {
                let tag = BeliefTag::parse(raw).ok_or_else(|| Error::BadAnnotation {
                    id: record.id.clone(),
                    msg: format!("unknown belief tag {raw:?}"),
                })?;
                tags.push(tag);
            }
            tags.sort();
            doc.beliefs = tags;
        }
        if let Some(sentences) = record.sentences {
            if sentences.len() != doc.sentences.len() {
                return Err(Error::BadAnnotation {
                    id: record.id.clone(),
                    msg: format!(
                        "sidecar has {} sentence entries, document has {} sentences",
                        sentences.len(),
                        doc.sentences.len()
                    ),
                });
            }
            for (i, entry) in sentences.iter().enumerate() {
                let level =
                    SentimentLevel::parse(&entry.level).ok_or_else(|| Error::BadAnnotation {
                        id: record.id.clone(),
                        msg: format!("unknown sentiment level {:?}", entry.level),
                    })?;
                let mut phrases = Vec::with_capacity(entry.phrases.len());
                for phrase in &entry.phrases {
                    let phrase_level =
                        SentimentLevel::parse(&phrase.level).ok_or_else(|| Error::BadAnnotation {
                            id: record.id.clone(),
                            msg: format!("unknown sentiment level {:?}", phrase.level),
                        })?;
                    if !(0.0..=1.0).contains(&phrase.intensity) {
                        return Err(Error::BadAnnotation {
                            id: record.id.clone(),
                            msg: format!("phrase intensity {} outside [0, 1]", phrase.intensity),
                        });
                    }
                    phrases.push(SentimentPhrase {
                        level: phrase_level,
                        intensity: phrase.intensity,
                    });
                }
                doc.sentences[i].sentiment = Some(level);
                doc.sentences[i].phrases = phrases;
            }
        }
    }
    Ok(())
}
