use thiserror::Error;

/// Errors raised across the meshing pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),
    #[error("topology error: {0}")]
    Topology(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Wraps an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
