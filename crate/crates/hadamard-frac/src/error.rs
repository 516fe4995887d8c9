use thiserror::Error;

/// Errors produced by the operators and the numerical machinery.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A quadrature did not reach the requested tolerance. The best value
    /// and the achieved error estimate are reported, never silently used.
    #[error("quadrature failed to converge: value {value:.6e}, achieved {achieved:.3e}, requested {requested:.3e}")]
    QuadratureNonConvergence {
        value: f64,
        achieved: f64,
        requested: f64,
    },

    /// Inconsistent or insufficient configuration (e.g. proof-exponent guards).
    #[error("configuration error: {0}")]
    Config(String),

    /// Sampled-data grid problems (mismatch, too few nodes, bad CSV).
    #[error("grid error: {0}")]
    Grid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
