use std::fmt;

/// Crate-wide error type. Variants map onto the CLI exit codes: config
/// problems exit 2, numeric failures exit 3, budget/acceptance failures 4.
#[derive(Debug)]
pub enum Error {
    /// Bad configuration or arguments (unknown keys, invalid ranges).
    Config(String),
    /// Grid too small for the requested frequency content.
    Aliasing { needed: usize, got: usize },
    /// A density failed validation (negative mass, zero integral, ...).
    InvalidDensity(String),
    /// A precondition of an operation was violated.
    Precondition(String),
    /// Numeric overflow guard triggered.
    Overflow(String),
    /// A sampling budget was exhausted (rejection caps, MC budgets).
    BudgetExhausted(String),
    /// The MCMC chain produced a non-finite log posterior.
    Divergence(String),
    Io(std::io::Error),
    Json(serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::Aliasing { needed, got } => {
                write!(f, "aliasing: grid of {got} points cannot hold {needed} required nodes")
            }
            Error::InvalidDensity(msg) => write!(f, "invalid density: {msg}"),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::Overflow(msg) => write!(f, "overflow guard: {msg}"),
            Error::BudgetExhausted(msg) => write!(f, "budget exhausted: {msg}"),
            Error::Divergence(msg) => write!(f, "chain divergence: {msg}"),
            Error::Io(e) => write!(f, "io error: {e}"),
            Error::Json(e) => write!(f, "json error: {e}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e)
    }
}

impl Error {
    /// CLI exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Precondition(_) => 2,
            Error::Aliasing { .. }
            | Error::InvalidDensity(_)
            | Error::Overflow(_)
            | Error::Divergence(_) => 3,
            Error::BudgetExhausted(_) => 4,
            Error::Io(_) | Error::Json(_) => 2,
        }
    }
}
