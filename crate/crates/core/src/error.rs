use thiserror::Error;

/// Errors raised by the library.
///
/// Bound violations that the underlying lemmas guarantee never happen are
/// reported as [`Error::Critical`]; failures of desk-scale searches whose
/// constants are only heuristics are reported as [`Error::SearchExhausted`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group specification `{0}`")]
    GroupSpec(String),

    #[error("element {0} does not belong to group {1}")]
    ElementMismatch(String, String),

    #[error("operands live in different groups ({0} vs {1})")]
    SpecMismatch(String, String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    #[error("critical: {0}")]
    Critical(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn stage(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |source| Error::Stage {
            stage,
            source: Box::new(source),
        }
    }

    /// Innermost error, skipping stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
