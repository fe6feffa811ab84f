use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A configured range, setting or count is unusable. `field` names the
    /// offending key as it appears in configuration files.
    #[error("invalid configuration `{field}`: {message}")]
    Config { field: String, message: String },

    /// Caller-supplied data does not satisfy an operation's preconditions.
    #[error("invalid input: {0}")]
    Input(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    /// Failure while building one scene of a dataset.
    #[error("scene {seed}: {source}")]
    Scene {
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn image(path: impl Into<PathBuf>, source: image::ImageError) -> Self {
        Error::Image {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by configuration rather than by the run itself.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config { .. } => true,
            Error::Scene { source, .. } => source.is_config(),
            _ => false,
        }
    }
}
