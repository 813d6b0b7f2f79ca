use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShapeError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid immersion: {0}")]
    InvalidImmersion(String),

    #[error("shape mismatch: expected {expected} nodes, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("valence mismatch: cannot pair {left} with {right}")]
    ValenceMismatch {
        left: &'static str,
        right: &'static str,
    },

    #[error("degenerate metric at grid node {node} (det g = {det:e}, threshold {threshold:e})")]
    DegenerateMetric {
        node: usize,
        det: f64,
        threshold: f64,
    },

    #[error("operation requires a hypersurface (dim M = n - 1)")]
    NotHypersurface,

    #[error("iterative solve did not converge after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("invalid operator configuration: {0}")]
    InvalidOperator(String),

    #[error("step rejected: relative energy drift {drift:e} exceeds {tolerance:e}")]
    StepRejected { drift: f64, tolerance: f64 },

    #[error("integration aborted at t = {t}: {reason}")]
    Aborted { t: f64, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, ShapeError>;
