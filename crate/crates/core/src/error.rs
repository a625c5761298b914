use std::path::PathBuf;

use thiserror::Error;

use crate::graph::VertexId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("angular radius {0} outside [0, pi]")]
    RadiusOutOfRange(f64),
    #[error("direction vector is not unit length (norm {0})")]
    NotUnit(f64),
    #[error("vertex {0} is already indexed")]
    DuplicateVertex(VertexId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("vertex set is empty")]
    EmptySet,
    #[error("vertex set covers the whole graph")]
    WholeSet,
    #[error("conductance undefined: min(vol(S), vol(complement)) is zero")]
    ZeroVolume,
    #[error("no candidates inside the attachment cap")]
    EmptyCandidateSet,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("tail k >= {k_min} has {found} samples, need at least {needed}")]
    InsufficientTail { k_min: usize, found: usize, needed: usize },
    #[error("degenerate histogram: all tail samples share one degree")]
    DegenerateHistogram,
    #[error("{kind} subgraph is not a tree: {reason}")]
    NotATree { kind: &'static str, reason: String },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
