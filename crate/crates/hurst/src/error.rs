use std::path::PathBuf;

use hurst_core::Method;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] hurst_core::Error),
    #[error("invalid fBm spec: {0}")]
    InvalidSpec(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("summary needs at least 2 replications, got {0}")]
    TooFewReplications(usize),
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("cell n={n} h={h} method={method}{}: {source}", rep_suffix(*.replication))]
    Cell {
        n: usize,
        h: f64,
        method: Method,
        replication: Option<usize>,
        #[source]
        source: Box<Error>,
    },
    #[error("config: {0}")]
    Config(#[from] toml::de::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

fn rep_suffix(rep: Option<usize>) -> String {
    match rep {
        Some(r) => format!(" replication={r}"),
        None => String::new(),
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
