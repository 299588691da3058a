use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("unknown environment `{0}`")]
    UnknownEnv(String),
    #[error("not implemented: {0}")]
    NotImplemented(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("load failed at `{field}`: {message}")]
    Load { field: String, message: String },
    #[error("trajectory invalid at step {step}: {message}")]
    InvalidTrajectory { step: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn load(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Load {
            field: field.into(),
            message: message.into(),
        }
    }
}
