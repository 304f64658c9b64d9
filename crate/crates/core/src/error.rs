use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the compression pipeline and its file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("history budget {budget} is smaller than the {frames} frames that need at least one token each")]
    BudgetTooSmall { budget: usize, frames: usize },

    #[error("token quota {quota} exceeds the frame's original token count {original}")]
    QuotaExceedsOriginal { quota: usize, original: usize },

    #[error("cannot select {k} tokens from a pool of {available}")]
    KTooLarge { k: usize, available: usize },

    #[error("current-frame budget is zero ({tokens} tokens at mu = {mu})")]
    EmptyBudget { tokens: usize, mu: f64 },

    #[error("map of {map_width}x{map_height} px does not cover a token grid spanning {grid_width}x{grid_height} px")]
    GridMismatch {
        map_width: u32,
        map_height: u32,
        grid_width: u32,
        grid_height: u32,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

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

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

/// Broad failure class, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Input,
    Domain,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidConfig(_) => ErrorKind::Config,
            Error::Parse { .. } | Error::Io { .. } | Error::Image { .. } | Error::Json { .. } => {
                ErrorKind::Input
            }
            Error::BudgetTooSmall { .. }
            | Error::QuotaExceedsOriginal { .. }
            | Error::KTooLarge { .. }
            | Error::EmptyBudget { .. }
            | Error::GridMismatch { .. }
            | Error::InvalidInput(_) => ErrorKind::Domain,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
