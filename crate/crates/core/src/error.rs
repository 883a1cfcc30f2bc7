use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("width {width} is outside the supported range 1..={cap}")]
    WidthOutOfRange { width: usize, cap: usize },

    #[error("not a bijection: {0}")]
    NotBijection(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("cost configuration: {0}")]
    Config(String),

    #[error("spectra integrity violation: {0}")]
    Integrity(String),

    #[error("invalid template: {0}")]
    Template(String),

    #[error("no selected engine converged")]
    Diverged,

    #[error("unknown benchmark `{0}`")]
    UnknownBenchmark(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
