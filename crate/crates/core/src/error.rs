use thiserror::Error;

/// Errors raised by model construction, evaluation, and simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("process has monotone paths: {0}")]
    MonotonePath(String),
    #[error("invalid jump mixture: {0}")]
    BadMixture(String),
    #[error("parameter `{name}` must be nonnegative and finite, got {value}")]
    NegativeParameter { name: &'static str, value: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("root solver did not converge: {0}")]
    ConvergenceFailure(String),
    #[error("cannot factor 1/(phi(a) - q) into simple poles: {0}")]
    FactorizationFailure(String),
    #[error("unsupported backend: {0}")]
    UnsupportedBackend(String),
    #[error("inadmissible query: {0}")]
    Admissibility(String),
    #[error("transform diverges: {0}")]
    DivergedTransform(String),
    #[error("unsupported process for this simulator: {0}")]
    UnsupportedSpec(String),
    #[error("path exceeded its budget of {limit} {what}")]
    NonTermination { what: &'static str, limit: u64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
