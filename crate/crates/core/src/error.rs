use crate::features::Channel;

/// Crate-wide error type. Variants that refer to input files carry 1-based
/// line numbers so messages can point at the offending record.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed json at line {line}: {msg}")]
    Json { line: usize, msg: String },

    #[error("invalid label at line {line}: {value:?} (expected \"patient\" or \"control\")")]
    InvalidLabel { line: usize, value: String },

    #[error("duplicate document id {id:?} at line {line}")]
    DuplicateId { id: String, line: usize },

    #[error("line {line}: expected 10 tab-separated columns, found {found}")]
    ConlluColumns { line: usize, found: usize },

    #[error("line {line}: {msg}")]
    ConlluField { line: usize, msg: String },

    #[error("line {line}: head index {head} out of range for sentence of {len} tokens")]
    HeadOutOfRange { line: usize, head: usize, len: usize },

    #[error("annotation references unknown document id {id:?}")]
    UnknownDocId { id: String },

    #[error("document {id:?}: {msg}")]
    BadAnnotation { id: String, msg: String },

    #[error("document {id:?}: {channel} layer absent")]
    MissingLayer { id: String, channel: Channel },

    #[error("channel {channel} has no annotations anywhere in the corpus")]
    ChannelUnavailable { channel: Channel },

    #[error("unknown feature category {name:?}")]
    UnknownCategory { name: String },

    #[error("category {category:?} is not available under the {profile} profile")]
    CategoryNotInProfile { category: String, profile: String },

    #[error("dimension mismatch: model expects {expected}, input has {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("corpus has no {0} documents; both classes are required")]
    MissingClass(&'static str),

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
