use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` must be strictly positive and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("{what} is outside its domain: {value}")]
    OutOfDomain { what: &'static str, value: f64 },

    #[error("invalid censored sample: {0}")]
    InvalidSample(String),

    #[error("need at least {needed} observed failures, got {got}")]
    TooFewObservations { needed: usize, got: usize },

    #[error(
        "bias correction undefined for n = {n}, m = {m}: correction factor {factor} is not positive"
    )]
    DegenerateBiasCorrection { n: usize, m: usize, factor: f64 },

    #[error("{what} did not converge after {iterations} iterations (gradient norm {grad_norm:e})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        grad_norm: f64,
    },

    #[error("invalid study configuration: {0}")]
    InvalidConfig(String),
}
