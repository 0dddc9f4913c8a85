use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An anticommutation parameter (or similar bounded quantity) left its domain.
    #[error("{what} = {value} lies outside [-1, 1]")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid word {input:?}: unexpected character {found:?} at position {position}")]
    InvalidWord {
        input: String,
        found: char,
        position: usize,
    },

    #[error("coefficient {index} is not a finite real number ({value})")]
    InvalidCoefficient { index: usize, value: f64 },

    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("matrix is not Hermitian (|M - M*|_F = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("parameters ({alpha}, {beta}) lie outside the quantum region ({region})")]
    Region {
        alpha: f64,
        beta: f64,
        region: &'static str,
    },

    #[error("|alpha * beta| = {product} exceeds 1; the optimal anticommutation is undefined")]
    Range { product: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse classification used by front ends to pick an exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input data or configuration.
    Input,
    /// A mathematical precondition of the requested operation failed.
    Precondition,
    Io,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Config(_)
            | Error::InvalidWord { .. }
            | Error::InvalidCoefficient { .. }
            | Error::Json { .. } => ErrorClass::Input,
            Error::Domain { .. }
            | Error::NotHermitian { .. }
            | Error::Region { .. }
            | Error::Range { .. } => ErrorClass::Precondition,
            Error::Io(_) => ErrorClass::Io,
        }
    }

    /// Name of the violated contract, for diagnostics.
    pub fn contract(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "anticommutation-domain",
            Error::Config(_) => "config",
            Error::InvalidWord { .. } => "word-alphabet",
            Error::InvalidCoefficient { .. } => "finite-coefficients",
            Error::Json { .. } => "json-syntax",
            Error::NotHermitian { .. } => "hermitian-input",
            Error::Region { .. } => "quantum-region",
            Error::Range { .. } => "anticommutation-range",
            Error::Io(_) => "io",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Json {
            line: err.line(),
            column: err.column(),
            message: strip_position(&err.to_string()),
        }
    }
}

/// serde_json appends " at line L column C"; the position is kept in separate fields.
fn strip_position(message: &str) -> String {
    match message.rsplit_once(" at line ") {
        Some((head, _)) => head.to_string(),
        None => message.to_string(),
    }
}
