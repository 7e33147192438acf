use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Topology {
        path: PathBuf,
        source: eonpath::Error,
    },
    #[error(transparent)]
    Core(#[from] eonpath::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unmatched records: {0}")]
    UnmatchedRecords(String),
    #[error("need at least {needed} distinct values of {dimension}, got {got}")]
    InsufficientSpread {
        dimension: String,
        needed: usize,
        got: usize,
    },
}

impl LabError {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> LabError {
        let path = path.into();
        move |source| LabError::Io { path, source }
    }
}
