use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    MalformedLine { line: usize, message: String },

    #[error("line {line}: duplicate pub_id `{pub_id}`")]
    DuplicatePubId { line: usize, pub_id: String },

    #[error("cannot build an index from an empty corpus")]
    EmptyCorpus,

    #[error("query `{0}` has no indexable terms")]
    EmptyQuery(String),

    #[error("non-finite score {value} at position {position}")]
    NonFinite { position: usize, value: f64 },

    #[error("table shape mismatch: {0}")]
    Shape(String),

    #[error("entropy is undefined for a table with a single cell")]
    SingleCellEntropy,

    #[error("no sensor carries any evidence")]
    NoEvidence,

    #[error("mass functions `{left}` and `{right}` are defined over different frames")]
    FrameMismatch { left: String, right: String },

    #[error("total conflict (K = {conflict}) combining `{left}` with `{right}`")]
    TotalConflict {
        left: String,
        right: String,
        conflict: f64,
    },

    #[error("frame of {0} candidates exceeds the tableau limit of 12")]
    FrameTooLarge(usize),

    #[error("invalid mass function: {0}")]
    InvalidMass(String),

    #[error("relevant set is empty")]
    EmptyRelevant,

    #[error("no per-query scores to average")]
    EmptyScores,

    #[error("paired score vectors differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("query sets differ: only in A {only_a:?}, only in B {only_b:?}")]
    QuerySetMismatch {
        only_a: Vec<String>,
        only_b: Vec<String>,
    },

    #[error("index artifact: {0}")]
    Artifact(String),

    #[error("{0}")]
    InvalidInput(String),
}
