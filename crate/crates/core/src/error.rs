use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Messages name the violated invariant and, where one exists, the grid node
/// or parameter that triggered it.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid space parameters: {0}")]
    InvalidSpace(String),

    #[error("point ({x}, {y}, {z}) is outside the chart domain: {reason}")]
    OutOfDomain { x: f64, y: f64, z: f64, reason: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field shape mismatch: {0}")]
    Shape(String),

    #[error("invalid fundamental data at node ({i}, {j}): {reason}")]
    InvalidData { i: usize, j: usize, reason: String },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("division guard tripped: |H + i tau| < {threshold:e} at node ({i}, {j})")]
    DivisionGuard { i: usize, j: usize, threshold: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("integration failed at parameter {at}: {reason}")]
    Integration { at: f64, reason: String },

    #[error("root finding failed: {0}")]
    Root(String),

    #[error("reconstruction failed at node ({i}, {j}): {reason}")]
    Reconstruction { i: usize, j: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            name,
            reason: reason.into(),
        }
    }
}
