use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("scene construction failed: {}", .0.join("; "))]
    Construction(Vec<String>),

    #[error("unsupported scene: {0}")]
    UnsupportedScene(String),

    #[error("record too short: path {index} at {delay_s:e} s needs {needed_s:e} s, duration is {duration_s:e} s")]
    Truncation {
        index: usize,
        delay_s: f64,
        needed_s: f64,
        duration_s: f64,
    },

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
