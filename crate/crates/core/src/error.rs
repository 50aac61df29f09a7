use thiserror::Error;

/// Errors raised by the analysis pipeline.
///
/// Variants are grouped by the exit-code class the command-line front end
/// maps them to (see [`Error::exit_code`]).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),

    #[error("structure error: {0}")]
    Structure(String),
    #[error("axiom failure: {0}")]
    Axiom(String),
    #[error("graph too large for exhaustive search: {vertices} vertices (cap {cap})")]
    Size { vertices: usize, cap: usize },
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("blow-up graph has no origin vertex")]
    NoOrigin,
    #[error("asymptotics require bounded geometry (beta = 1), got beta = {0}")]
    UnboundedGeometry(u64),
    #[error("symmetry violation: {0}")]
    Symmetry(String),

    #[error("division by the zero function")]
    DivisionByZero,
    #[error("pole: {0}")]
    Pole(String),
    #[error("non-convergence: {0}")]
    NonConvergence(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("orbit escape: {0}")]
    OrbitEscape(String),
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),
    #[error("truncation invalid: {0}")]
    Truncation(String),
    #[error("memory cap exceeded: {0}")]
    MemoryCap(String),

    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code: 1 parse/IO, 2 axiom/structure, 3 numerical, 4 consistency.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            Parse(_) | Io(_) => 1,
            Structure(_) | Axiom(_) | Size { .. } | IndexOutOfRange(_) | NoOrigin
            | UnboundedGeometry(_) | Symmetry(_) => 2,
            DivisionByZero | Pole(_) | NonConvergence(_) | PrecisionExhausted(_)
            | OrbitEscape(_) | InsufficientSamples(_) | Truncation(_) | MemoryCap(_) => 3,
            TheoremViolation(_) | Internal(_) => 4,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
