use thiserror::Error;

#[derive(Debug, Error)]
pub enum FadeError {
    #[error("unknown fault model `{0}`")]
    UnknownFault(String),

    #[error("fault `{model}` targets the {expected} but was applied to the {actual}")]
    SensorMismatch {
        model: String,
        expected: &'static str,
        actual: &'static str,
    },

    #[error("fault instance for `{model}` is invalid: {reason}")]
    InvalidInstance { model: String, reason: String },

    #[error("individuals belong to different fault models ({0} vs {1})")]
    ModelMismatch(String, String),

    #[error("scenario generation failed after {attempts} attempts: {reason}")]
    Generation { attempts: usize, reason: String },

    #[error("traces do not belong to the same scenario ({0} vs {1})")]
    ScenarioMismatch(String, String),

    #[error("ADS adapter failure: {0}")]
    Adapter(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed container: {0}")]
    Container(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = FadeError> = std::result::Result<T, E>;

impl FadeError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        FadeError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
