use alloc::string::String;

/// Errors produced by the simulation core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported distribution pair: service={service}, arrival={arrival}")]
    UnsupportedPair {
        service: &'static str,
        arrival: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    /// A propagated state drifted outside tolerance.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("fixed point is not unique: eigenvalue-1 eigenspace has dimension {dimension}")]
    AmbiguousFixedPoint { dimension: usize },

    #[error("no stationary distribution: utilization r = {utilization} >= 1")]
    NoStationaryDistribution { utilization: f64 },

    #[error("iteration did not converge after {iterations} steps (last residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("empty sample window")]
    EmptyWindow,
}

impl Error {
    /// True for failures of numerical origin, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Numerical(_) | Error::AmbiguousFixedPoint { .. } | Error::NotConverged { .. }
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
