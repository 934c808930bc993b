use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration or mismatched grids.
    #[error("configuration error: {0}")]
    Config(String),

    /// An operation was called with input violating its precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A numerical procedure failed (non-convergence, singular solve).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The time integrator detected a non-finite or exploding coefficient.
    #[error("blow-up at t = {time}: {detail}")]
    BlowUp { time: f64, detail: String },

    /// Malformed binary container.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
