use thiserror::Error;

use crate::grid::LlrGrid;

/// Errors produced by the density-evolution workbench.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid mismatch: {0} vs {1}")]
    GridMismatch(LlrGrid, LlrGrid),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("invalid degree distribution: {0}")]
    InvalidDegrees(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A check-node output carried more negative mass than quantization
    /// noise can explain.
    #[error("negative mass {0:e} in check-node output")]
    NegativeMass(f64),

    #[error("threshold bracket: {0}")]
    Bracket(String),

    #[error("BASC parameters out of domain: eps0 = {eps0}, eps1 = {eps1}")]
    BascDomain { eps0: f64, eps1: f64 },

    #[error("rate fit: {0}")]
    Fit(String),

    #[error("graph construction: {0}")]
    Graph(String),
}

pub type Result<T> = std::result::Result<T, Error>;
