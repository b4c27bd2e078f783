use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("density unavailable for {0}")]
    DensityUnavailable(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(
        "quadrature did not converge after {evaluations} evaluations \
         (best estimate {estimate:e}, error estimate {error:e})"
    )]
    NoConvergence {
        estimate: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("root bracketing failed: {0}")]
    Bracket(String),

    #[error("arity mismatch: topology expects {expected} channel values, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("evaluation failed at sweep point {index} ({rho_db} dB): {source}")]
    SweepPoint {
        index: usize,
        rho_db: f64,
        source: Box<Error>,
    },

    #[error("{}", format_config(.line, .key, .message))]
    Config {
        line: Option<usize>,
        key: Option<String>,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

fn format_config(line: &Option<usize>, key: &Option<String>, message: &str) -> String {
    match (line, key) {
        (Some(l), Some(k)) => format!("config error at line {l}, key `{k}`: {message}"),
        (Some(l), None) => format!("config error at line {l}: {message}"),
        (None, Some(k)) => format!("config error, key `{k}`: {message}"),
        (None, None) => format!("config error: {message}"),
    }
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            line: None,
            key: Some(key.into()),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
