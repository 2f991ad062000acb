use thiserror::Error;

/// Errors produced by the construction and certification pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the parameter domain of an operation.
    #[error("domain violation: {0}")]
    Domain(String),

    /// A region-membership precondition failed (free-boundary or
    /// rotational region predicates).
    #[error("region membership violation: {0}")]
    Region(String),

    /// The ODE integrator could not complete a step.
    #[error("integration failure at t = {at}: {what}")]
    Integration { at: f64, what: String },

    /// An adaptive quadrature did not reach its tolerance.
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    /// A root or sign change expected by the theory was not found.
    #[error("root not found: {0}")]
    RootNotFound(String),

    /// Degenerate geometry (collapsed span, vanishing normalization).
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
