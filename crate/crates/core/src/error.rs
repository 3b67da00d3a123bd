use std::path::PathBuf;

use crate::graph::NodeId;

/// Crate-wide error type. Variants map one-to-one onto the failure modes the
/// public operations document.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("self-loop edge on node {0} is not allowed")]
    SelfLoop(NodeId),

    #[error("node {0} is not in the graph")]
    UnknownNode(NodeId),

    #[error("k={k} out of range (valid: {min}..={max})")]
    KOutOfRange { k: usize, min: usize, max: usize },

    #[error("map is not a bijection on the graph nodes: {0}")]
    NotBijective(String),

    #[error("mapping conflict: {0}")]
    MappingConflict(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("training labels contain a single class")]
    SingleClass,

    #[error("sampling exhausted: {0}")]
    SamplingExhausted(String),

    #[error("node {0} is already mapped")]
    AlreadyMapped(NodeId),

    #[error("node {0} is already claimed as a mapping target")]
    AlreadyClaimed(NodeId),

    #[error("seed mapping is empty")]
    EmptySeeds,

    #[error("missing artifact {0} (run the producing stage first)")]
    MissingArtifact(PathBuf),

    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
