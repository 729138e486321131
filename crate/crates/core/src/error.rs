use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the solvers and model types.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("size limit exceeded: {0}")]
    Size(String),

    #[error(
        "fictitious play did not converge after {iterations} iterations \
         (lower {lower}, upper {upper}, gap {})",
        upper - lower
    )]
    NotConverged {
        lower: f64,
        upper: f64,
        iterations: usize,
    },

    #[error("no feasible leader commitment at grid resolution {0}")]
    InfeasibleResolution(f64),

    #[error("observed signal has zero likelihood under both user types")]
    DegenerateLikelihood,

    #[error("invalid scenario: {0}")]
    Config(String),
}

impl GameError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        GameError::InvalidInput(msg.into())
    }
}

/// Errors raised while loading a scenario file or writing results.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("{path}: field `{field}`: {message}")]
    Field {
        path: PathBuf,
        field: String,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv output {path}: {message}")]
    Csv { path: PathBuf, message: String },

    #[error(transparent)]
    Game(#[from] GameError),
}

impl RunError {
    /// Process exit code the CLI uses for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Parse { .. } | RunError::Field { .. } => 2,
            RunError::Game(GameError::NotConverged { .. }) => 3,
            RunError::Game(GameError::Config(_)) => 2,
            RunError::Game(_) => 4,
            RunError::Io { .. } | RunError::Csv { .. } => 5,
        }
    }
}

pub type Result<T, E = GameError> = std::result::Result<T, E>;
