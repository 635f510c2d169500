use std::io;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OntologyError {
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("label {0:?} belongs to the other ontology level")]
    WrongLevel(String),
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("document {0:?}: tag layer length differs from token count")]
    LengthMismatch(String),
    #[error("document {doc_id:?}: invalid token {token:?}")]
    InvalidToken { doc_id: String, token: String },
    #[error("document {0:?}: identifier must be non-empty and contain no line breaks")]
    InvalidId(String),
    #[error("documents in one file must carry the same tag layers (document {0:?})")]
    InconsistentLayers(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl FormatError {
    pub(crate) fn malformed(line: usize, reason: impl Into<String>) -> Self {
        FormatError::Malformed {
            line,
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("HTTP status {0}")]
    HttpError(u16),
    #[error("bill {0} has no introduced text version in a supported format")]
    MissingTextVersion(String),
    #[error("missing API key")]
    MissingApiKey,
    #[error("invalid bill identifier {0:?}")]
    InvalidBillId(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("unexpected response: {0}")]
    Decode(String),
}

impl From<reqwest::Error> for FetchError {
    fn from(e: reqwest::Error) -> Self {
        match e.status() {
            Some(status) => FetchError::HttpError(status.as_u16()),
            None => FetchError::Transport(e.to_string()),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeqLabelError {
    #[error("mentions overlap at token {0}")]
    Overlap(usize),
    #[error("mention [{start}, {end}) out of range for length {len}")]
    OutOfRange { start: usize, end: usize, len: usize },
    #[error("invalid tag sequence ({0} violations)")]
    InvalidSequence(usize),
    #[error("subclass {sub} is not a child of {parent}")]
    ParentMismatch { sub: String, parent: String },
}

#[derive(Debug, Error)]
pub enum ScoringError {
    #[error("documents are not aligned: {0}")]
    AlignmentError(String),
    #[error("document {0:?} lacks the {1} tag layer")]
    MissingLayer(String, &'static str),
    #[error("document {doc_id:?}: {source}")]
    Sequence {
        doc_id: String,
        #[source]
        source: SeqLabelError,
    },
    #[error("document {doc_id:?}: unknown label {label:?}")]
    UnknownLabel { doc_id: String, label: String },
}

#[derive(Debug, Error)]
pub enum RouterError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("document {doc_id:?}: level-one layer is missing or invalid: {reason}")]
    InvalidInput { doc_id: String, reason: String },
    #[error("transcript cache: {0}")]
    Cache(#[from] io::Error),
}
