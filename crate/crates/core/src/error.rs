use thiserror::Error;

/// Errors produced across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter vector or model violates its invariants.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge: estimated error {achieved:e} exceeds tolerance {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    /// Inconsistent sampler, study or forecasting configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed or degenerate input data.
    #[error("data error: {0}")]
    Data(String),

    /// A numerical procedure produced a non-finite or degenerate result.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
