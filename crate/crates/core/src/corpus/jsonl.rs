use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Corpus, Document, Label};
use crate::error::{Error, Result};
use crate::io::{read_to_string, write_atomic};

#[derive(Serialize, Deserialize)]
struct RawRecord {
    id: String,
    label: String,
    text: String,
}

/// Reads a raw corpus: one JSON record per line with fields `id`, `label`
/// ("patient" or "control") and `text`. Annotation layers start empty.
pub fn load_corpus(path: &Path) -> Result<Corpus> {
    let content = read_to_string(path)?;
    let mut documents = Vec::new();
    let mut seen = BTreeSet::new();
    for (idx, line) in content.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: RawRecord = serde_json::from_str(line).map_err(|e| Error::Json {
            line: line_no,
            msg: e.to_string(),
        })?;
        let label = match record.label.as_str() {
            "patient" => Label::Patient,
            "control" => Label::Control,
            other => {
                return Err(Error::InvalidLabel {
                    line: line_no,
                    value: other.to_string(),
                })
            }
        };
        if !seen.insert(record.id.clone()) {
            return Err(Error::DuplicateId {
                id: record.id,
                line: line_no,
            });
        }
        documents.push(Document::new(record.id, label, record.text));
    }
    Ok(Corpus::new(documents))
}

/// Writes the raw view of a corpus back to JSONL, one record per line in
/// document order.
pub fn write_corpus(corpus: &Corpus, path: &Path) -> Result<()> {
    let mut out = String::new();
    for doc in &corpus.documents {
        let record = RawRecord {
            id: doc.id.clone(),
            label: doc.label.as_str().to_string(),
            text: doc.text.clone(),
        };
        out.push_str(&serde_json::to_string(&record).expect("record serialization"));
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}
