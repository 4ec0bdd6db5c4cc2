//! Channel-wise feature extraction. Documents become fixed-width vectors by
//! concatenating per-channel blocks in a fixed channel order; tag channels
//! hold relative frequencies, the intensity channel holds raw sums, and the
//! topic/cluster channels come from fitted models.

mod category;

pub use category::{catalog, resolve_categories, Category, Profile};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document, Label, SentimentLevel};
use crate::embeddings::ClusterModel;
use crate::error::{Error, Result};
use crate::topics::TopicModel;

/// The eight annotation channels, in the order their blocks appear inside a
/// composed feature vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Channel {
    Pos,
    Dep,
    Srl,
    Topic,
    Cluster,
    Lcb,
    Sent,
    Int,
}

impl Channel {
    pub const ORDER: [Channel; 8] = [
        Channel::Pos,
        Channel::Dep,
        Channel::Srl,
        Channel::Topic,
        Channel::Cluster,
        Channel::Lcb,
        Channel::Sent,
        Channel::Int,
    ];

    pub fn prefix(self) -> &'static str {
        match self {
            Channel::Pos => "pos_",
            Channel::Dep => "dep_",
            Channel::Srl => "srl_",
            Channel::Topic => "topic_",
            Channel::Cluster => "cluster_",
            Channel::Lcb => "lcb_",
            Channel::Sent => "sent_",
            Channel::Int => "int_",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Channel::Pos => "POS",
            Channel::Dep => "DEP",
            Channel::Srl => "SRL",
            Channel::Topic => "TOPIC",
            Channel::Cluster => "CLUSTER",
            Channel::Lcb => "LCB",
            Channel::Sent => "SENT",
            Channel::Int => "INT",
        };
        f.write_str(name)
    }
}

/// Ordered feature inventory. Columns are grouped into channel blocks laid
/// out in [`Channel::ORDER`]; open inventories (tags, relations, frames) are
/// sorted lexicographically within their block, topic and cluster columns
/// keep model index order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpace {
    names: Vec<String>,
    blocks: BTreeMap<Channel, Range<usize>>,
}

impl FeatureSpace {
    /// Builds the inventory for `channels` from the documents' observed
    /// annotations. `topic_k` / `cluster_k` size the model-backed blocks and
    /// must be present when the corresponding channel is requested.
    pub fn build(
        docs: &[&Document],
        channels: &[Channel],
        topic_k: Option<usize>,
        cluster_k: Option<usize>,
    ) -> Result<FeatureSpace> {
        let mut names = Vec::new();
        let mut blocks = BTreeMap::new();
        for &channel in Channel::ORDER.iter().filter(|c| channels.contains(c)) {
            let start = names.len();
            match channel {
                Channel::Pos | Channel::Dep | Channel::Srl => {
                    let mut tags = std::collections::BTreeSet::new();
                    for doc in docs {
                        match channel {
                            Channel::Pos => {
                                tags.extend(doc.tokens().filter_map(|t| t.pos.clone()))
                            }
                            Channel::Dep => {
                                tags.extend(doc.tokens().filter_map(|t| t.deprel.clone()))
                            }
                            Channel::Srl => tags.extend(doc.frames.iter().cloned()),
                            _ => unreachable!(),
                        }
                    }
                    if tags.is_empty() {
                        return Err(Error::ChannelUnavailable { channel });
                    }
                    names.extend(tags.into_iter().map(|t| format!("{}{}", channel.prefix(), t)));
                }
                Channel::Topic => {
                    let k = topic_k.ok_or_else(|| {
                        Error::Config("TOPIC channel requires a fitted topic model".into())
                    })?;
                    names.extend((0..k).map(|i| format!("topic_{i}")));
                }
                Channel::Cluster => {
                    let k = cluster_k.ok_or_else(|| {
                        Error::Config("CLUSTER channel requires a fitted cluster model".into())
                    })?;
                    names.extend((0..k).map(|i| format!("cluster_{i}")));
                }
                Channel::Lcb => {
                    if !docs.iter().any(|d| !d.beliefs.is_empty()) {
                        return Err(Error::ChannelUnavailable { channel });
                    }
                    names.extend(
                        crate::corpus::BeliefTag::ALL
                            .iter()
                            .map(|t| format!("lcb_{}", t.as_str())),
                    );
                }
                Channel::Sent => {
                    if !docs
                        .iter()
                        .any(|d| d.sentences.iter().any(|s| s.sentiment.is_some()))
                    {
                        return Err(Error::ChannelUnavailable { channel });
                    }
                    names.extend(
                        SentimentLevel::ALL
                            .iter()
                            .map(|l| format!("sent_{}", l.as_str())),
                    );
                }
                Channel::Int => {
                    if !docs
                        .iter()
                        .any(|d| d.sentences.iter().any(|s| !s.phrases.is_empty()))
                    {
                        return Err(Error::ChannelUnavailable { channel });
                    }
                    names.extend(
                        SentimentLevel::ALL
                            .iter()
                            .map(|l| format!("int_{}", l.as_str())),
                    );
                }
            }
            blocks.insert(channel, start..names.len());
        }
        Ok(FeatureSpace { names, blocks })
    }

    /// Space over bare column names with no channel structure, for matrices
    /// that come from flat files rather than annotated documents.
    pub fn from_names(names: Vec<String>) -> FeatureSpace {
        FeatureSpace {
            names,
            blocks: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn channels(&self) -> impl Iterator<Item = Channel> + '_ {
        Channel::ORDER
            .iter()
            .copied()
            .filter(|c| self.blocks.contains_key(c))
    }

    pub fn block(&self, channel: Channel) -> Option<Range<usize>> {
        self.blocks.get(&channel).cloned()
    }

    /// Tag names of a block, with the channel prefix stripped.
    fn block_tags(&self, channel: Channel) -> Vec<&str> {
        match self.block(channel) {
            Some(range) => self.names[range]
                .iter()
                .map(|n| &n[channel.prefix().len()..])
                .collect(),
            None => Vec::new(),
        }
    }
}

/// Sparse feature vector over a [`FeatureSpace`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureVector {
    dim: usize,
    values: BTreeMap<usize, f64>,
}

impl FeatureVector {
    pub fn zeros(dim: usize) -> FeatureVector {
        FeatureVector {
            dim,
            values: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, index: usize) -> f64 {
        self.values.get(&index).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, index: usize, value: f64) {
        assert!(index < self.dim, "index {index} out of bounds {}", self.dim);
        if value != 0.0 {
            self.values.insert(index, value);
        } else {
            self.values.remove(&index);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().map(|(&i, &v)| (i, v))
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (&i, &v) in &self.values {
            out[i] = v;
        }
        out
    }
}

/// Rows of feature vectors with their document ids and labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub space: FeatureSpace,
    pub ids: Vec<String>,
    pub labels: Vec<Label>,
    pub rows: Vec<FeatureVector>,
}

impl FeatureMatrix {
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(FeatureVector::to_dense).collect()
    }

    /// Renders the matrix as CSV: a header of `id,label` plus the feature
    /// names, then one row per document. Values use the shortest exact
    /// decimal form so output is reproducible byte for byte.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,label");
        for name in self.space.names() {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for ((id, label), row) in self.ids.iter().zip(&self.labels).zip(&self.rows) {
            out.push_str(id);
            out.push(',');
            out.push_str(label.as_str());
            for v in row.to_dense() {
                out.push(',');
                out.push_str(&format!("{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Relative tag frequencies of one channel for one document, in the block's
/// column order. The denominator counts every channel event in the document,
/// including tags absent from the space; zero events give an all-zero block.
pub fn tag_frequency(doc: &Document, channel: Channel, space: &FeatureSpace) -> Result<Vec<f64>> {
    let events = channel_events(doc, channel)?;
    let tags = space.block_tags(channel);
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for event in &events {
        *counts.entry(event.as_str()).or_insert(0) += 1;
    }
    let total = events.len();
    Ok(tags
        .iter()
        .map(|tag| {
            if total == 0 {
                0.0
            } else {
                counts.get(tag).copied().unwrap_or(0) as f64 / total as f64
            }
        })
        .collect())
}

fn channel_events(doc: &Document, channel: Channel) -> Result<Vec<String>> {
    match channel {
        Channel::Pos => {
            if !doc.pos_complete() {
                return Err(Error::MissingLayer {
                    id: doc.id.clone(),
                    channel,
                });
            }
            Ok(doc.tokens().map(|t| t.pos.clone().unwrap()).collect())
        }
        Channel::Dep => {
            if !doc.dep_complete() {
                return Err(Error::MissingLayer {
                    id: doc.id.clone(),
                    channel,
                });
            }
            Ok(doc.tokens().map(|t| t.deprel.clone().unwrap()).collect())
        }
        Channel::Srl => Ok(doc.frames.clone()),
        Channel::Lcb => Ok(doc.beliefs.iter().map(|b| b.as_str().to_string()).collect()),
        Channel::Sent => {
            if !doc.sentiment_complete() {
                return Err(Error::MissingLayer {
                    id: doc.id.clone(),
                    channel,
                });
            }
            Ok(doc
                .sentences
                .iter()
                .map(|s| s.sentiment.unwrap().as_str().to_string())
                .collect())
        }
        Channel::Topic | Channel::Cluster | Channel::Int => Err(Error::Config(format!(
            "{channel} is not a tag-frequency channel"
        ))),
    }
}

/// Total phrase intensity per sentiment level, in scale order. Raw sums, not
/// frequencies: longer or more emphatic documents score higher.
pub fn sentiment_intensity(doc: &Document) -> Vec<f64> {
    let mut sums = vec![0.0; SentimentLevel::ALL.len()];
    for sentence in &doc.sentences {
        for phrase in &sentence.phrases {
            let idx = SentimentLevel::ALL
                .iter()
                .position(|l| *l == phrase.level)
                .unwrap();
            sums[idx] += phrase.intensity;
        }
    }
    sums
}

/// Relative frequency of word-cluster occurrences. Tokens are matched
/// lowercased; tokens outside the cluster map still count toward the
/// denominator.
pub fn cluster_frequency(doc: &Document, model: &ClusterModel) -> Vec<f64> {
    let mut counts = vec![0usize; model.k()];
    let mut total = 0usize;
    for token in doc.tokens() {
        total += 1;
        if let Some(c) = model.cluster_of(&token.surface.to_lowercase()) {
            counts[c] += 1;
        }
    }
    counts
        .into_iter()
        .map(|c| {
            if total == 0 {
                0.0
            } else {
                c as f64 / total as f64
            }
        })
        .collect()
}

/// Fitted models needed for the TOPIC and CLUSTER blocks.
#[derive(Clone, Copy, Default)]
pub struct ModelContext<'a> {
    pub topics: Option<&'a TopicModel>,
    pub clusters: Option<&'a ClusterModel>,
}

/// A composed matrix plus extraction notes.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub matrix: FeatureMatrix,
    /// Documents whose topic mixture fell back to uniform because no token
    /// was in the model vocabulary.
    pub uniform_topic_docs: Vec<String>,
}

/// Composes one document's full vector over `space`.
pub fn compose(doc: &Document, space: &FeatureSpace, ctx: &ModelContext) -> Result<FeatureVector> {
    let (vector, _uniform) = compose_inner(doc, space, ctx)?;
    Ok(vector)
}

fn compose_inner(
    doc: &Document,
    space: &FeatureSpace,
    ctx: &ModelContext,
) -> Result<(FeatureVector, bool)> {
    let mut vector = FeatureVector::zeros(space.dim());
    let mut uniform = false;
    for channel in space.channels() {
        let range = space.block(channel).unwrap();
        let block = match channel {
            Channel::Pos | Channel::Dep | Channel::Srl | Channel::Lcb | Channel::Sent => {
                tag_frequency(doc, channel, space)?
            }
            Channel::Int => sentiment_intensity(doc),
            Channel::Topic => {
                let model = ctx.topics.ok_or_else(|| {
                    Error::Config("TOPIC channel requested without a topic model".into())
                })?;
                let inferred = model.infer(doc);
                uniform |= inferred.uniform_fallback;
                inferred.theta
            }
            Channel::Cluster => {
                let model = ctx.clusters.ok_or_else(|| {
                    Error::Config("CLUSTER channel requested without a cluster model".into())
                })?;
                cluster_frequency(doc, model)
            }
        };
        debug_assert_eq!(block.len(), range.len());
        for (offset, value) in block.into_iter().enumerate() {
            vector.set(range.start + offset, value);
        }
    }
    Ok((vector, uniform))
}

/// Composes every document in the corpus over `space`.
pub fn extract_matrix(
    corpus: &Corpus,
    space: &FeatureSpace,
    ctx: &ModelContext,
) -> Result<Extraction> {
    extract_rows(&corpus.documents.iter().collect::<Vec<_>>(), space, ctx)
}

pub fn extract_rows(
    docs: &[&Document],
    space: &FeatureSpace,
    ctx: &ModelContext,
) -> Result<Extraction> {
    let mut rows = Vec::with_capacity(docs.len());
    let mut ids = Vec::with_capacity(docs.len());
    let mut labels = Vec::with_capacity(docs.len());
    let mut uniform_topic_docs = Vec::new();
    for doc in docs {
        let (vector, uniform) = compose_inner(doc, space, ctx)?;
        if uniform {
            uniform_topic_docs.push(doc.id.clone());
        }
        rows.push(vector);
        ids.push(doc.id.clone());
        labels.push(doc.label);
    }
    Ok(Extraction {
        matrix: FeatureMatrix {
            space: space.clone(),
            ids,
            labels,
            rows,
        },
        uniform_topic_docs,
    })
}
