use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("puncture: {z} is one of the omitted points")]
    Puncture { z: Complex64 },

    #[error("singular evaluation at {z}")]
    Singular { z: Complex64 },

    #[error("quadrature did not reach tolerance: achieved error {achieved:e} (requested {requested:e})")]
    Accuracy { achieved: f64, requested: f64 },

    #[error("integral diverges: {0}")]
    Divergence(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("malformed chain at joint {joint}: mismatch {mismatch:e}")]
    MalformedChain { joint: usize, mismatch: f64 },

    #[error("audit failed at {witness}: {reason}")]
    Audit { witness: Complex64, reason: String },

    #[error("branch discontinuity near {location}: jump {jump:.3}")]
    Branch { location: Complex64, jump: f64 },

    #[error("tracks collide at z = {z}: labels {w1} and {w2}")]
    Injectivity {
        z: Complex64,
        w1: Complex64,
        w2: Complex64,
    },

    #[error("normalization failed: {0}")]
    Normalization(String),

    #[error("hypothesis violated at node ({i}, {j}): {reason}")]
    Hypothesis { i: usize, j: usize, reason: String },

    #[error("evaluation failed at sample {sample}: {source}")]
    AtSample {
        sample: Complex64,
        #[source]
        source: Box<Error>,
    },

    #[error("corrupt data in {file}: {reason}")]
    Corrupt { file: String, reason: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn at_sample(self, sample: Complex64) -> Self {
        Error::AtSample {
            sample,
            source: Box::new(self),
        }
    }

    /// Short machine-readable kind, used for CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Puncture { .. } => "puncture",
            Error::Singular { .. } => "singular",
            Error::Accuracy { .. } => "accuracy",
            Error::Divergence(_) => "divergence",
            Error::Internal(_) => "internal",
            Error::MalformedChain { .. } => "malformed-chain",
            Error::Audit { .. } => "audit",
            Error::Branch { .. } => "branch",
            Error::Injectivity { .. } => "injectivity",
            Error::Normalization(_) => "normalization",
            Error::Hypothesis { .. } => "hypothesis",
            Error::AtSample { source, .. } => source.kind(),
            Error::Corrupt { .. } => "corrupt",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
