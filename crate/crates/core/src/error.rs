use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("node {0} is isolated; the normalized Laplacian is undefined")]
    IsolatedNode(usize),

    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("permutation has length {got}, graph has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },

    #[error("graph has {n} nodes, above the automorphism search limit of {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("automorphism search undecided after {expansions} node expansions")]
    Undecided { expansions: u64 },

    #[error("{what} exhausted after {attempts} attempts")]
    Exhausted { what: &'static str, attempts: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{0}")]
    Infeasible(String),

    #[error("empty base-graph source")]
    EmptySource,

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("layout has {got} positions for {expected} nodes")]
    MissingPosition { expected: usize, got: usize },

    #[error("{task}/{split} sample {index}: {source}")]
    Sample {
        task: String,
        split: String,
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("png encoding failed: {0}")]
    Png(#[from] png::EncodingError),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.into(),
            source,
        }
    }
}
