use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("unknown subsystem label `{0}`")]
    Label(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error("cannot normalize: {0}")]
    DegenerateNormalization(String),

    #[error("invariant violated at step {step}: {detail}")]
    InvariantViolation { step: usize, detail: String },

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {path}: {message}")]
    Format { path: String, message: String },
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// True for failures caused by the numerics rather than by the user's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::InvariantViolation { .. }
                | Error::DegenerateSpectrum(_)
                | Error::UndefinedCorrelation(_)
                | Error::DegenerateNormalization(_)
        )
    }
}
