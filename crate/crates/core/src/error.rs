use thiserror::Error;

/// Failures raised by the numerical kernels, samplers and predictors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the region where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error("quadrature did not converge: estimated error {estimated_error:e} after {subdivisions} subdivisions")]
    Quadrature { estimated_error: f64, subdivisions: usize },

    /// Zone-of-control constants violate (Z2) or the Berry–Esseen exponent condition.
    #[error("invalid zone of control: {0}")]
    Zone(String),

    /// The sampler cannot draw from the requested parameter set.
    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),

    /// A structurally invalid request (empty grids, zero sample counts, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A computation produced NaN or an infinity.
    #[error("non-finite result in {0}")]
    NonFinite(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
