use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Truncation cutoffs or matrix shapes that do not fit together.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// An input that has no meaningful answer, e.g. a NOON state with zero
    /// photons or the (0,0) coincidence pattern.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("invalid input: {0}")]
    Input(String),

    /// The Fourier design matrix cannot determine every coefficient.
    #[error("fit is not identifiable: {0}")]
    Identifiability(String),

    #[error("visibility undefined: {0}")]
    UndefinedVisibility(String),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("arithmetic error: {0}")]
    Arithmetic(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
