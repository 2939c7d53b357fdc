use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Wav { path: PathBuf, message: String },

    #[error("unsupported audio encoding in {path}: found {found}, expected linear PCM")]
    UnsupportedEncoding { path: PathBuf, found: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A statistic has no defined value for the given input (too few cycles,
    /// no voiced frames, ...).
    #[error("undefined result: {0}")]
    Undefined(String),

    #[error("malformed lattice: {0}")]
    MalformedLattice(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("histogram bins do not match")]
    MismatchedBins,

    #[error("cohort '{0}' matched no data")]
    EmptyCohort(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// True for errors caused by invalid user configuration rather than by
    /// the data being processed.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::InvalidConfig(_))
    }
}
